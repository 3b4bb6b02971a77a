# File: s3rec/src/linalg/sparse.py
"""
Plaintext matrix types for the secure protocols.

Dense matrices are plain numpy arrays (float64 for reals, uint64 for ring
encodings). A ``SparseMatrix`` is the location/value pair (l_y, v_y):
``loc`` holds the (row, col) pairs of the nonzeros in strictly increasing
row-major order and ``val`` the parallel values.
"""

import hashlib
import logging
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from ..mpc.ring import RING_DTYPE, as_ring
from ..utils.error_handling import ShapeError, UsageError

logger = logging.getLogger("s3rec.linalg.sparse")


class SparseMatrix:
    """Sparse matrix as a location vector and a value vector"""

    def __init__(self, rows: int, cols: int, loc, val):
        loc = np.asarray(loc, dtype=np.int64).reshape(-1, 2)
        val = np.asarray(val)
        if loc.shape[0] != val.shape[0]:
            raise ShapeError(f"{loc.shape[0]} locations but {val.shape[0]} values")
        if loc.size and (loc[:, 0].min() < 0 or loc[:, 0].max() >= rows
                         or loc[:, 1].min() < 0 or loc[:, 1].max() >= cols):
            raise ShapeError(f"Location outside a {rows}x{cols} matrix")
        keys = loc[:, 0] * cols + loc[:, 1]
        if np.any(np.diff(keys) <= 0):
            raise UsageError("Locations must be strictly increasing in row-major order")
        self.rows = int(rows)
        self.cols = int(cols)
        self.loc = loc
        self.val = val

    @classmethod
    def from_coo(cls, rows: int, cols: int, row_idx, col_idx, values) -> "SparseMatrix":
        """Canonicalise arbitrary triplets: duplicates summed, zeros dropped, row-major order"""
        row_idx = np.asarray(row_idx, dtype=np.int64)
        col_idx = np.asarray(col_idx, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        if row_idx.size and (row_idx.min() < 0 or row_idx.max() >= rows
                             or col_idx.min() < 0 or col_idx.max() >= cols):
            raise ShapeError(f"Triplet outside a {rows}x{cols} matrix")
        csr = coo_matrix((values, (row_idx, col_idx)), shape=(rows, cols)).tocsr()
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        canonical = csr.tocoo()
        loc = np.stack([canonical.row.astype(np.int64), canonical.col.astype(np.int64)], axis=1)
        return cls(rows, cols, loc, canonical.data.astype(np.float64))

    @classmethod
    def from_dense(cls, matrix) -> "SparseMatrix":
        dense = np.asarray(matrix)
        if dense.ndim != 2:
            raise ShapeError(f"Expected a 2-D matrix, got shape {dense.shape}")
        rows, cols = np.nonzero(dense)
        return cls(dense.shape[0], dense.shape[1], np.stack([rows, cols], axis=1), dense[rows, cols])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols, np.zeros((0, 2), dtype=np.int64), np.zeros(0))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def t(self) -> int:
        return int(self.loc.shape[0])

    @property
    def nnz(self) -> int:
        return self.t

    @property
    def density(self) -> float:
        return self.t / float(self.rows * self.cols) if self.rows and self.cols else 0.0

    @property
    def row_idx(self) -> np.ndarray:
        return self.loc[:, 0]

    @property
    def col_idx(self) -> np.ndarray:
        return self.loc[:, 1]

    def distinct_rows(self) -> np.ndarray:
        """Sorted distinct row indices carrying a nonzero"""
        return np.unique(self.row_idx)

    def loc_digest(self) -> bytes:
        """SHA-256 over the shape and l_y, for cheap agreement checks"""
        digest = hashlib.sha256()
        digest.update(np.array([self.rows, self.cols], dtype="<i8").tobytes())
        digest.update(np.ascontiguousarray(self.loc, dtype="<i8").tobytes())
        return digest.digest()

    def to_csr(self) -> csr_matrix:
        """scipy CSR view for plaintext sparse products"""
        return csr_matrix((self.val.astype(np.float64), (self.row_idx, self.col_idx)), shape=self.shape)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.rows, self.cols), dtype=self.val.dtype)
        dense[self.row_idx, self.col_idx] = self.val
        return dense

    def transpose(self) -> "SparseMatrix":
        order = np.lexsort((self.row_idx, self.col_idx))
        loc = self.loc[order][:, ::-1]
        return SparseMatrix(self.cols, self.rows, loc, self.val[order])

    @property
    def T(self) -> "SparseMatrix":
        return self.transpose()

    def map_values(self, fn: Callable[[np.ndarray], np.ndarray]) -> "SparseMatrix":
        """Same support, values transformed (e.g. fixed-point encoded)"""
        return SparseMatrix(self.rows, self.cols, self.loc.copy(), np.asarray(fn(self.val)))

    def with_support(self, mask: np.ndarray) -> "SparseMatrix":
        """Keep only the nonzeros selected by a boolean mask over l_y"""
        return SparseMatrix(self.rows, self.cols, self.loc[mask], self.val[mask])

    def row_sums(self) -> np.ndarray:
        sums = np.zeros(self.rows, dtype=np.float64)
        np.add.at(sums, self.row_idx, self.val.astype(np.float64))
        return sums

    def col_sums(self) -> np.ndarray:
        sums = np.zeros(self.cols, dtype=np.float64)
        np.add.at(sums, self.col_idx, self.val.astype(np.float64))
        return sums

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.shape == other.shape and np.array_equal(self.loc, other.loc)
                and np.array_equal(self.val, other.val))

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}x{self.cols}, t={self.t})"


@dataclass(frozen=True)
class DiagonalMatrix:
    """Square diagonal matrix; semantically sparse with l_y = {(i, i)}"""
    diag: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.diag.shape[0])

    def to_sparse(self, keep_zeros: bool = False) -> SparseMatrix:
        """Sparse view; ``keep_zeros`` keeps the full diagonal as the support"""
        index = np.arange(self.dim) if keep_zeros else np.flatnonzero(self.diag)
        return SparseMatrix(self.dim, self.dim, np.stack([index, index], axis=1), self.diag[index])

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag)

    def __add__(self, other: "DiagonalMatrix") -> "DiagonalMatrix":
        if self.dim != other.dim:
            raise ShapeError(f"Diagonal sizes differ: {self.dim} vs {other.dim}")
        return DiagonalMatrix(self.diag + other.diag)


def build_d_e(S: SparseMatrix) -> Tuple[DiagonalMatrix, DiagonalMatrix]:
    """Row-sum diagonal D and column-sum diagonal E of a square social matrix

    Raises:
        ShapeError: If S is not square
    """
    if S.rows != S.cols:
        raise ShapeError(f"Social matrix must be square, got {S.rows}x{S.cols}")
    return DiagonalMatrix(S.row_sums()), DiagonalMatrix(S.col_sums())


def to_loc_val(matrix) -> SparseMatrix:
    return SparseMatrix.from_dense(matrix)


def from_loc_val(sparse: SparseMatrix) -> np.ndarray:
    return sparse.to_dense()


@dataclass
class BinTable:
    """Per output column j, the aligned (index, value) pairs feeding z_{i,j}"""
    bins: List[List[Tuple[int, object]]]

    def sizes(self) -> List[int]:
        return [len(b) for b in self.bins]

    @property
    def total(self) -> int:
        return sum(self.sizes())


def column_order(Y: SparseMatrix) -> np.ndarray:
    """Permutation of l_y grouping nonzeros by column, ascending row inside each column"""
    return np.lexsort((Y.row_idx, Y.col_idx))


def build_bins(x_row, Y: SparseMatrix) -> Tuple[BinTable, BinTable]:
    """Bin tables for one output row

    For column j, T_x(j) holds {x_a : y_{a,j} != 0} and T_y(j) holds those
    y_{a,j}, both ascending in a.

    Raises:
        ShapeError: If x_row's length differs from Y's row count
    """
    x_row = np.asarray(x_row)
    if x_row.ndim != 1 or x_row.shape[0] != Y.rows:
        raise ShapeError(f"Row of length {x_row.shape} does not conform with {Y.rows} rows of Y")
    x_bins: List[List[Tuple[int, object]]] = [[] for _ in range(Y.cols)]
    y_bins: List[List[Tuple[int, object]]] = [[] for _ in range(Y.cols)]
    for s in column_order(Y):
        a, j = int(Y.loc[s, 0]), int(Y.loc[s, 1])
        x_bins[j].append((a, x_row[a]))
        y_bins[j].append((a, Y.val[s]))
    return BinTable(x_bins), BinTable(y_bins)


def bin_product(X, Y: SparseMatrix) -> np.ndarray:
    """X @ Y evaluated by summing over the bin tables

    Ring inputs (uint64) wrap mod 2^64; real inputs give float64.
    """
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] != Y.rows:
        raise ShapeError(f"Cannot multiply {X.shape} by {Y.shape}")
    ring = X.dtype == RING_DTYPE or Y.val.dtype == RING_DTYPE
    out = np.zeros((X.shape[0], Y.cols), dtype=object if ring else np.float64)
    for i in range(X.shape[0]):
        x_table, y_table = build_bins(X[i], Y)
        for j in range(Y.cols):
            for (_, x), (_, y) in zip(x_table.bins[j], y_table.bins[j]):
                if ring:
                    out[i, j] += int(x) * int(y)
                else:
                    out[i, j] += float(x) * float(y)
    return as_ring(out) if ring else out


def matmul_oracle(X, Y) -> np.ndarray:
    """Exact plaintext product

    Ring (uint64) inputs are multiplied with big-integer accumulation and
    reduced mod 2^64; other integers stay exact Python ints; reals use float64.

    Raises:
        ShapeError: On non-conforming shapes
    """
    if isinstance(Y, SparseMatrix):
        Y = Y.to_dense()
    if isinstance(X, SparseMatrix):
        X = X.to_dense()
    X = np.asarray(X)
    Y = np.asarray(Y)
    if X.ndim != 2 or Y.ndim != 2 or X.shape[1] != Y.shape[0]:
        raise ShapeError(f"Cannot multiply {X.shape} by {Y.shape}")
    if X.dtype.kind in "iu" and Y.dtype.kind in "iu":
        exact = X.astype(object).dot(Y.astype(object))
        if X.dtype == RING_DTYPE or Y.dtype == RING_DTYPE:
            return as_ring(exact)
        return exact
    return X.astype(np.float64) @ Y.astype(np.float64)
