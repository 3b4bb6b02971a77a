# File: s3rec/src/services/dataio/writers.py
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Union

from .datasets import RatingDataset, SocialDataset

logger = logging.getLogger("s3rec.dataio.writers")

PathLike = Union[str, Path]


def _header(kind: str, provenance: Optional[str]) -> List[str]:
    lines = [f"# s3rec {kind}"]
    if provenance:
        lines.extend(line if line.startswith("#") else f"# {line}" for line in provenance.splitlines())
    return lines


def _write(path: PathLike, lines: Iterable[str]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in lines:
            handle.write(line + "\n")
    return path


def _format_value(value: float) -> str:
    return repr(float(value))


def write_ratings(path: PathLike, ratings: RatingDataset, provenance: Optional[str] = None) -> Path:
    """Write ``user<TAB>item<TAB>rating`` lines under a ``#`` provenance header

    Original string ids are written when the dataset carries them.
    """
    user_ids = ratings.user_ids or [str(u) for u in range(ratings.m)]
    item_ids = ratings.item_ids or [str(i) for i in range(ratings.n)]
    body = (
        f"{user_ids[u]}\t{item_ids[i]}\t{_format_value(r)}"
        for u, i, r in zip(ratings.users.tolist(), ratings.items.tolist(), ratings.ratings.tolist())
    )
    written = _write(path, [*_header("ratings", provenance), *body])
    logger.info(f"Wrote {ratings.count} ratings to {written}")
    return written


def write_social(path: PathLike, social: SocialDataset, user_ids: Optional[List[str]] = None,
                 provenance: Optional[str] = None) -> Path:
    """Write ``user<TAB>user<TAB>weight`` lines under a ``#`` provenance header"""
    user_ids = user_ids or [str(u) for u in range(social.m)]
    body = (
        f"{user_ids[a]}\t{user_ids[b]}\t{_format_value(w)}"
        for a, b, w in zip(social.sources.tolist(), social.targets.tolist(), social.weights.tolist())
    )
    written = _write(path, [*_header("social", provenance), *body])
    logger.info(f"Wrote {social.count} social ties to {written}")
    return written


def write_id_map(path: PathLike, ids: List[str], kind: str = "users") -> Path:
    """Dense id to original id, one ``index<TAB>id`` line each"""
    return _write(path, [f"# s3rec {kind} id map", *(f"{index}\t{name}" for index, name in enumerate(ids))])
