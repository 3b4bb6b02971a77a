# File: s3rec/src/services/dataio/loader.py
"""
TSV ingestion with iterate-to-fixpoint interaction filtering.

ratings: ``user<TAB>item<TAB>rating``; social: ``user<TAB>user[<TAB>weight]``.
Blank lines and ``#`` comments are skipped. Ids are arbitrary strings,
reindexed densely in order of first appearance among the survivors.
"""

import logging
import math
from collections import Counter
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ...utils.error_handling import ParseError, ValidationError
from .datasets import RATING_MAX, RATING_MIN, RatingDataset, SocialDataset

logger = logging.getLogger("s3rec.dataio.loader")

DEFAULT_MIN_INTERACTIONS = 15

PathLike = Union[str, Path]


def _records(path: PathLike) -> Iterator[Tuple[int, List[str]]]:
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"Cannot open {path}: {exc}", path=str(path)) from exc
    with handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield number, line.split("\t")


def _number(text: str, what: str, number: int, path: PathLike) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{what} '{text}' is not a number", line=number, path=str(path)) from None
    if not math.isfinite(value):
        raise ParseError(f"{what} '{text}' is not finite", line=number, path=str(path))
    return value


def read_ratings(path: PathLike) -> Dict[Tuple[str, str], float]:
    """Raw (user, item) -> rating, last write wins

    Raises:
        ParseError: For lines without exactly three fields or a non-numeric rating
        ValidationError: For a rating outside [0, 5]
    """
    ratings: Dict[Tuple[str, str], float] = {}
    duplicates = 0
    for number, fields in _records(path):
        if len(fields) != 3 or not fields[0] or not fields[1]:
            raise ParseError(f"Expected user<TAB>item<TAB>rating, got {len(fields)} fields",
                             line=number, path=str(path))
        value = _number(fields[2], "Rating", number, path)
        if not RATING_MIN <= value <= RATING_MAX:
            raise ValidationError(f"Rating {value} outside [{RATING_MIN}, {RATING_MAX}]",
                                  details={"line": number, "path": str(path)})
        key = (fields[0], fields[1])
        if key in ratings:
            duplicates += 1
            # keep the latest value at the latest position
            del ratings[key]
        ratings[key] = value
    if duplicates:
        logger.warning(f"{path}: {duplicates} duplicate (user, item) ratings, last write kept")
    return ratings


def read_social(path: PathLike) -> List[Tuple[str, str, float]]:
    """Raw (user, user, weight) ties in file order

    Raises:
        ParseError: For lines with other than two or three fields
    """
    ties = []
    for number, fields in _records(path):
        if len(fields) not in (2, 3) or not fields[0] or not fields[1]:
            raise ParseError(f"Expected user<TAB>user[<TAB>weight], got {len(fields)} fields",
                             line=number, path=str(path))
        weight = _number(fields[2], "Weight", number, path) if len(fields) == 3 else 1.0
        ties.append((fields[0], fields[1], weight))
    return ties


def filter_interactions(ratings: Dict[Tuple[str, str], float],
                        min_interactions: int) -> Dict[Tuple[str, str], float]:
    """Drop users and items with fewer than ``min_interactions`` ratings until nothing changes"""
    kept = dict(ratings)
    rounds = 0
    while True:
        user_counts = Counter(user for user, _ in kept)
        item_counts = Counter(item for _, item in kept)
        survivors = {
            key: value for key, value in kept.items()
            if user_counts[key[0]] >= min_interactions and item_counts[key[1]] >= min_interactions
        }
        rounds += 1
        if len(survivors) == len(kept):
            break
        kept = survivors
    logger.info(f"Filtering at {min_interactions} interactions kept {len(kept)} of {len(ratings)} "
                f"ratings after {rounds} rounds")
    return kept


def load(ratings_path: PathLike, social_path: Optional[PathLike],
         min_interactions: int = DEFAULT_MIN_INTERACTIONS) -> Tuple[RatingDataset, SocialDataset]:
    """Load both TSVs, filter to fixpoint and reindex densely

    Social ties touching a removed user are dropped; only ratings count
    toward the interaction threshold. Without a social path the social
    dataset is empty (the rating platform never sees the ties).

    Returns:
        (RatingDataset, SocialDataset)
    """
    raw = filter_interactions(read_ratings(ratings_path), min_interactions)
    user_index: Dict[str, int] = {}
    item_index: Dict[str, int] = {}
    for user, item in raw:
        user_index.setdefault(user, len(user_index))
        item_index.setdefault(item, len(item_index))

    users = np.array([user_index[user] for user, _ in raw], dtype=np.int64)
    items = np.array([item_index[item] for _, item in raw], dtype=np.int64)
    values = np.array(list(raw.values()), dtype=np.float64)
    ratings = RatingDataset(len(user_index), len(item_index), users, items, values,
                            list(user_index), list(item_index))

    social = load_social(social_path, ratings.user_ids) if social_path is not None \
        else SocialDataset(ratings.m, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0))
    logger.info(f"Loaded m={ratings.m} n={ratings.n} ratings={ratings.count} social ties={social.count}")
    return ratings, social


def load_social(social_path: PathLike, user_ids: Sequence[str]) -> SocialDataset:
    """Social ties mapped through a dense user id list; unknown users dropped"""
    user_index = {name: index for index, name in enumerate(user_ids)}
    raw = read_social(social_path)
    ties = [(user_index[a], user_index[b], w) for a, b, w in raw if a in user_index and b in user_index]
    if len(ties) < len(raw):
        logger.info(f"Dropped {len(raw) - len(ties)} ties touching unknown or filtered users")
    return SocialDataset(
        len(user_index),
        np.array([a for a, _, _ in ties], dtype=np.int64),
        np.array([b for _, b, _ in ties], dtype=np.int64),
        np.array([w for _, _, w in ties], dtype=np.float64),
    )


def read_id_map(path: PathLike) -> List[str]:
    """Inverse of write_id_map: original ids in dense order

    Raises:
        ParseError: For malformed lines or non-contiguous indices
    """
    ids: List[str] = []
    for number, fields in _records(path):
        if len(fields) != 2 or fields[0] != str(len(ids)):
            raise ParseError(f"Expected index {len(ids)}<TAB>id", line=number, path=str(path))
        ids.append(fields[1])
    return ids
