# File: s3rec/src/services/dataio/datasets.py
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from ...linalg.sparse import SparseMatrix
from ...utils.error_handling import ShapeError, UsageError, ValidationError

RATING_MIN = 0.0
RATING_MAX = 5.0


@dataclass(frozen=True)
class RatingDataset:
    """Ratings as parallel (user, item, rating) arrays over dense ids

    ``user_ids`` / ``item_ids`` map dense ids back to the original strings.
    """
    m: int
    n: int
    users: np.ndarray
    items: np.ndarray
    ratings: np.ndarray
    user_ids: List[str] = field(default_factory=list)
    item_ids: List[str] = field(default_factory=list)

    def __post_init__(self):
        if not (len(self.users) == len(self.items) == len(self.ratings)):
            raise ShapeError("users, items and ratings must have equal length")
        if len(self.users) and (self.users.min() < 0 or self.users.max() >= self.m
                                or self.items.min() < 0 or self.items.max() >= self.n):
            raise ShapeError(f"Rating ids outside [0, {self.m}) x [0, {self.n})")
        if len(self.ratings) and (self.ratings.min() < RATING_MIN or self.ratings.max() > RATING_MAX):
            raise ValidationError(f"Ratings must lie in [{RATING_MIN}, {RATING_MAX}]")

    @property
    def count(self) -> int:
        return int(len(self.ratings))

    def subset(self, index: np.ndarray) -> "RatingDataset":
        """Same id space, only the ratings at ``index``"""
        return RatingDataset(self.m, self.n, self.users[index], self.items[index], self.ratings[index],
                             self.user_ids, self.item_ids)

    def to_matrices(self) -> Tuple[np.ndarray, np.ndarray]:
        """Dense (R, I): m x n ratings and 0/1 indicator"""
        R = np.zeros((self.m, self.n))
        I = np.zeros((self.m, self.n))
        R[self.users, self.items] = self.ratings
        I[self.users, self.items] = 1.0
        return R, I


@dataclass(frozen=True)
class SocialDataset:
    """Directed weighted ties between users of a RatingDataset"""
    m: int
    sources: np.ndarray
    targets: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if not (len(self.sources) == len(self.targets) == len(self.weights)):
            raise ShapeError("sources, targets and weights must have equal length")
        if len(self.sources) and (min(self.sources.min(), self.targets.min()) < 0
                                  or max(self.sources.max(), self.targets.max()) >= self.m):
            raise ShapeError(f"Social ids outside [0, {self.m})")

    @property
    def count(self) -> int:
        return int(len(self.sources))

    def to_sparse(self) -> SparseMatrix:
        """m x m social matrix S, duplicate ties summed"""
        return SparseMatrix.from_coo(self.m, self.m, self.sources, self.targets, self.weights)

    @classmethod
    def from_sparse(cls, S: SparseMatrix) -> "SocialDataset":
        return cls(S.rows, S.row_idx.copy(), S.col_idx.copy(), S.val.astype(np.float64))


@dataclass(frozen=True)
class FoldSplit:
    """Seeded partition of rating indices into ``count`` folds"""
    count: int
    seed: int
    assignment: np.ndarray

    def test_indices(self, fold: int) -> np.ndarray:
        self._check(fold)
        return np.flatnonzero(self.assignment == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        self._check(fold)
        return np.flatnonzero(self.assignment != fold)

    def _check(self, fold: int) -> None:
        if not 0 <= fold < self.count:
            raise UsageError(f"Fold {fold} outside [0, {self.count})")


def folds(size: int, count: int = 5, seed: int = 0) -> FoldSplit:
    """Assign ``size`` ratings to ``count`` folds of near-equal size

    Raises:
        UsageError: If count < 2 or there are fewer ratings than folds
    """
    if count < 2:
        raise UsageError(f"Need at least 2 folds, got {count}")
    if size < count:
        raise UsageError(f"Cannot split {size} ratings into {count} folds")
    permutation = np.random.default_rng(seed).permutation(size)
    assignment = np.empty(size, dtype=np.int64)
    assignment[permutation] = np.arange(size) % count
    return FoldSplit(count, seed, assignment)


@dataclass(frozen=True)
class TrainingData:
    """Everything one training run needs for one fold

    R and I hold the training ratings only; the test triples are held out.
    S is the raw directed social matrix (the trainers symmetrise it).
    """
    m: int
    n: int
    R: np.ndarray
    I: np.ndarray
    test_users: np.ndarray
    test_items: np.ndarray
    test_ratings: np.ndarray
    S: SparseMatrix

    @property
    def train_users(self) -> np.ndarray:
        return np.nonzero(self.I)[0]

    @property
    def train_items(self) -> np.ndarray:
        return np.nonzero(self.I)[1]

    @property
    def train_ratings(self) -> np.ndarray:
        return self.R[np.nonzero(self.I)]


def make_training_data(ratings: RatingDataset, social: SocialDataset, split: FoldSplit,
                       fold: int = 0) -> TrainingData:
    """Bundle fold ``fold`` of ``split`` with the social matrix

    Raises:
        ShapeError: If the datasets disagree on m
    """
    if social.m != ratings.m:
        raise ShapeError(f"Social data covers {social.m} users, ratings {ratings.m}")
    train = ratings.subset(split.train_indices(fold))
    test = ratings.subset(split.test_indices(fold))
    R, I = train.to_matrices()
    return TrainingData(ratings.m, ratings.n, R, I, test.users, test.items, test.ratings, social.to_sparse())
