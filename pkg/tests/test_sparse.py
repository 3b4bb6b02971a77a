# File: s3rec/tests/test_sparse.py
import numpy as np
import pytest

from src.linalg.sparse import (
    DiagonalMatrix,
    SparseMatrix,
    bin_product,
    build_bins,
    build_d_e,
    column_order,
    from_loc_val,
    matmul_oracle,
    to_loc_val,
)
from src.mpc.ring import as_ring, random_ring
from src.utils.error_handling import ShapeError, UsageError


@pytest.fixture
def sample():
    dense = np.array([
        [0.0, 2.0, 0.0],
        [1.0, 0.0, 3.0],
        [0.0, 0.0, 4.0],
    ])
    return dense, to_loc_val(dense)


class TestSparseMatrix:

    def test_loc_val_round_trip(self, sample):
        dense, sparse = sample
        assert sparse.t == 4
        np.testing.assert_array_equal(sparse.loc, [[0, 1], [1, 0], [1, 2], [2, 2]])
        np.testing.assert_array_equal(from_loc_val(sparse), dense)

    def test_from_coo_sums_duplicates_and_drops_zeros(self):
        sparse = SparseMatrix.from_coo(2, 2, [1, 0, 1, 0], [1, 1, 1, 0], [2.0, 5.0, 3.0, 0.0])
        np.testing.assert_array_equal(sparse.loc, [[0, 1], [1, 1]])
        np.testing.assert_array_equal(sparse.val, [5.0, 5.0])

    def test_unsorted_locations_rejected(self):
        with pytest.raises(UsageError):
            SparseMatrix(2, 2, [[1, 0], [0, 1]], [1.0, 1.0])

    def test_location_outside_shape(self):
        with pytest.raises(ShapeError):
            SparseMatrix(2, 2, [[0, 2]], [1.0])

    def test_transpose(self, sample):
        dense, sparse = sample
        np.testing.assert_array_equal(sparse.T.to_dense(), dense.T)

    def test_distinct_rows_and_density(self, sample):
        _, sparse = sample
        np.testing.assert_array_equal(sparse.distinct_rows(), [0, 1, 2])
        assert sparse.density == pytest.approx(4 / 9)

    def test_digest_depends_only_on_locations(self, sample):
        _, sparse = sample
        assert sparse.loc_digest() == sparse.map_values(np.zeros_like).loc_digest()
        assert sparse.loc_digest() != sparse.T.loc_digest()

    def test_csr_view(self, sample):
        dense, sparse = sample
        np.testing.assert_array_equal(sparse.to_csr().toarray(), dense)


class TestDiagonals:

    def test_row_and_column_sums(self, sample):
        dense, sparse = sample
        D, E = build_d_e(sparse)
        np.testing.assert_array_equal(D.diag, dense.sum(axis=1))
        np.testing.assert_array_equal(E.diag, dense.sum(axis=0))
        np.testing.assert_array_equal((D + E).to_dense(), np.diag(dense.sum(axis=1) + dense.sum(axis=0)))

    def test_full_support_keeps_zero_entries(self):
        diagonal = DiagonalMatrix(np.array([0.0, 2.0, 0.0]))
        assert diagonal.to_sparse().t == 1
        assert diagonal.to_sparse(keep_zeros=True).t == 3

    def test_square_required(self):
        with pytest.raises(ShapeError):
            build_d_e(SparseMatrix.zeros(2, 3))


class TestBins:

    def test_bins_group_by_column(self, sample):
        _, sparse = sample
        x_table, y_table = build_bins(np.array([10.0, 20.0, 30.0]), sparse)
        assert x_table.bins[2] == [(1, 20.0), (2, 30.0)]
        assert y_table.bins[2] == [(1, 3.0), (2, 4.0)]
        assert x_table.total == sparse.t

    def test_column_order(self, sample):
        _, sparse = sample
        np.testing.assert_array_equal(sparse.loc[column_order(sparse)][:, 1], [0, 1, 2, 2])

    def test_bin_product_matches_dense_product(self, rng, sample):
        dense, sparse = sample
        X = rng.normal(size=(4, 3))
        np.testing.assert_allclose(bin_product(X, sparse), X @ dense)

    def test_ring_bin_product_wraps(self, rng):
        X = random_ring(rng, (2, 5))
        Y = SparseMatrix.from_dense(rng.integers(0, 3, size=(5, 4))).map_values(as_ring)
        np.testing.assert_array_equal(bin_product(X, Y), matmul_oracle(X, Y))

    def test_row_length_checked(self, sample):
        _, sparse = sample
        with pytest.raises(ShapeError):
            build_bins(np.zeros(2), sparse)


class TestOracle:

    def test_ring_product_is_exact_mod_2_64(self):
        X = as_ring(np.array([[2**63, 3]], dtype=object))
        Y = as_ring(np.array([[2], [5]], dtype=object))
        np.testing.assert_array_equal(matmul_oracle(X, Y), as_ring([[15]]))

    def test_shape_checked(self):
        with pytest.raises(ShapeError):
            matmul_oracle(np.zeros((2, 3)), np.zeros((2, 3)))
