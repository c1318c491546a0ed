"""Sparse storage, matvec, spectral bounds, and Matrix Market round-trips."""

import math

import numpy as np
import pytest

from entrace.sparse import (
    MatrixMarketError,
    SpectralBound,
    SymmetricSparseMatrix,
    gershgorin_upper_bound,
    power_iteration_bound,
    read_matrix_market,
    write_matrix_market,
)


def tridiag(m):
    rows = list(range(m)) + list(range(m - 1)) + list(range(1, m))
    cols = list(range(m)) + list(range(1, m)) + list(range(m - 1))
    vals = [2.0] * m + [-1.0] * (2 * (m - 1))
    return SymmetricSparseMatrix(m, rows, cols, vals)


def random_symmetric(m, seed, density=0.3):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(m, m))
    a = (a + a.T) / 2.0
    mask = rng.uniform(size=(m, m)) < density
    mask = mask | mask.T
    np.fill_diagonal(mask, True)
    a = np.where(mask, a, 0.0)
    return SymmetricSparseMatrix.from_dense(a), a


class TestConstruction:
    def test_round_trips_dense(self):
        mat, a = random_symmetric(9, 0)
        np.testing.assert_array_equal(mat.to_dense(), a)

    def test_trace_and_diagonal(self):
        mat = tridiag(5)
        assert mat.trace() == 10.0
        np.testing.assert_array_equal(mat.diagonal(), np.full(5, 2.0))

    def test_nnz_counts_stored_entries(self):
        assert tridiag(4).nnz == 4 + 2 * 3

    def test_rejects_asymmetric_values(self):
        with pytest.raises(ValueError, match="symmetr"):
            SymmetricSparseMatrix(2, [0, 1], [1, 0], [1.0, 2.0])

    def test_rejects_asymmetric_pattern(self):
        with pytest.raises(ValueError, match="symmetr"):
            SymmetricSparseMatrix(3, [0], [1], [1.0])

    def test_rejects_duplicate_entries(self):
        with pytest.raises(ValueError, match="duplicate"):
            SymmetricSparseMatrix(2, [0, 0], [0, 0], [1.0, 1.0])

    def test_rejects_out_of_range_indices(self):
        with pytest.raises(ValueError):
            SymmetricSparseMatrix(2, [0, 2], [0, 2], [1.0, 1.0])

    def test_rejects_non_finite_values(self):
        with pytest.raises(ValueError):
            SymmetricSparseMatrix(1, [0], [0], [math.nan])
        with pytest.raises(ValueError):
            SymmetricSparseMatrix(1, [0], [0], [math.inf])

    def test_accepts_tiny_symmetric_mismatch(self):
        # within the documented relative tolerance for stored pairs
        eps = 1e-13
        mat = SymmetricSparseMatrix(2, [0, 1], [1, 0], [1.0, 1.0 + eps])
        assert mat.dim == 2

    def test_arrays_are_read_only(self):
        mat = tridiag(3)
        with pytest.raises(ValueError):
            mat.val[0] = 99.0

    def test_from_dense_droptol(self):
        a = np.array([[1.0, 1e-15], [1e-15, 1.0]])
        mat = SymmetricSparseMatrix.from_dense(a, droptol=1e-12)
        assert mat.nnz == 2

    def test_from_dense_droptol_keeps_symmetry(self):
        # one of the mirrored pair above threshold keeps both entries
        a = np.array([[1.0, 0.5], [0.5, 2.0]])
        a[0, 1] = 0.5
        a[1, 0] = 0.5 + 1e-13
        mat = SymmetricSparseMatrix.from_dense(a, droptol=0.0)
        assert mat.nnz == 4


class TestMatvec:
    def test_matches_dense_products(self):
        for seed in range(5):
            mat, a = random_symmetric(30, seed)
            v = np.random.default_rng(100 + seed).normal(size=30)
            np.testing.assert_allclose(mat.matvec(v), a @ v, rtol=1e-13, atol=1e-13)

    def test_matvec_is_bit_reproducible(self):
        mat, _ = random_symmetric(50, 3)
        v = np.random.default_rng(7).normal(size=50)
        first = mat.matvec(v)
        for _ in range(5):
            np.testing.assert_array_equal(mat.matvec(v), first)

    def test_zero_matrix(self):
        mat = SymmetricSparseMatrix(3, [], [], [])
        np.testing.assert_array_equal(mat.matvec(np.ones(3)), np.zeros(3))
        assert mat.trace() == 0.0


class TestSpectralBounds:
    def test_gershgorin_dominates_lambda_max(self):
        for seed in range(8):
            mat, a = random_symmetric(25, seed)
            a = a @ a.T  # make it PSD
            mat = SymmetricSparseMatrix.from_dense(a)
            bound = gershgorin_upper_bound(mat)
            lam_max = float(np.linalg.eigvalsh(a)[-1])
            assert bound.lambda_max_upper >= lam_max - 1e-10 * abs(lam_max)
            assert bound.method == "gershgorin"

    def test_gershgorin_tridiagonal_value(self):
        assert gershgorin_upper_bound(tridiag(50)).lambda_max_upper == 4.0

    def test_gershgorin_never_negative(self):
        mat = SymmetricSparseMatrix(2, [0, 1], [0, 1], [-3.0, -1.0])
        assert gershgorin_upper_bound(mat).lambda_max_upper == 0.0

    def test_power_iteration_brackets_lambda_max(self):
        for seed in range(5):
            _, a = random_symmetric(20, seed)
            a = a @ a.T
            mat = SymmetricSparseMatrix.from_dense(a)
            lam_max = float(np.linalg.eigvalsh(a)[-1])
            bound = power_iteration_bound(mat, seed=seed)
            assert bound.method == "power-iteration"
            assert lam_max - 1e-6 * lam_max <= bound.lambda_max_upper <= 1.10 * lam_max

    def test_power_iteration_zero_matrix(self):
        mat = SymmetricSparseMatrix(4, [], [], [])
        assert power_iteration_bound(mat).lambda_max_upper == 0.0

    def test_spectral_bound_validation(self):
        with pytest.raises(ValueError):
            SpectralBound(-1.0, "gershgorin")
        with pytest.raises(ValueError):
            SpectralBound(1.0, "made-up")


class TestMatrixMarket:
    def test_round_trip_exact(self, tmp_path):
        mat, _ = random_symmetric(17, 11)
        path = tmp_path / "m.mtx"
        write_matrix_market(mat, path)
        back = read_matrix_market(path)
        assert back.dim == mat.dim
        np.testing.assert_array_equal(back.to_dense(), mat.to_dense())

    def test_writes_lower_triangle_only(self, tmp_path):
        mat = tridiag(3)
        path = tmp_path / "t.mtx"
        write_matrix_market(mat, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("%%MatrixMarket matrix coordinate real symmetric")
        entries = [tuple(map(int, ln.split()[:2])) for ln in lines[2:]]
        assert all(i >= j for i, j in entries)
        assert len(entries) == 3 + 2  # diagonal + one off-diagonal band

    def test_read_general_format_with_mirror_pairs(self, tmp_path):
        text = (
            "%%MatrixMarket matrix coordinate real general\n"
            "2 2 3\n1 1 2.0\n1 2 -1.0\n2 1 -1.0\n"
        )
        path = tmp_path / "g.mtx"
        path.write_text(text)
        mat = read_matrix_market(path)
        np.testing.assert_array_equal(mat.to_dense(), [[2.0, -1.0], [-1.0, 0.0]])

    def test_read_general_missing_mirror_is_error(self, tmp_path):
        text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 -1.0\n"
        path = tmp_path / "g.mtx"
        path.write_text(text)
        with pytest.raises(MatrixMarketError):
            read_matrix_market(path)

    def test_read_symmetric_upper_entry_is_error(self, tmp_path):
        text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 -1.0\n"
        path = tmp_path / "s.mtx"
        path.write_text(text)
        with pytest.raises(MatrixMarketError, match="line 3"):
            read_matrix_market(path)

    def test_error_messages_carry_line_numbers(self, tmp_path):
        path = tmp_path / "bad.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1\n")
        with pytest.raises(MatrixMarketError, match="line 3"):
            read_matrix_market(path)

    def test_rejects_rectangular(self, tmp_path):
        path = tmp_path / "rect.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real symmetric\n2 3 0\n")
        with pytest.raises(MatrixMarketError):
            read_matrix_market(path)

    def test_rejects_duplicate_entries(self, tmp_path):
        path = tmp_path / "dup.mtx"
        path.write_text(
            "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n1 1 2.0\n"
        )
        with pytest.raises(MatrixMarketError):
            read_matrix_market(path)

    def test_rejects_wrong_entry_count(self, tmp_path):
        path = tmp_path / "count.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n")
        with pytest.raises(MatrixMarketError):
            read_matrix_market(path)

    def test_full_precision_survives(self, tmp_path):
        val = 1.0 / 3.0 + 1e-16
        mat = SymmetricSparseMatrix(1, [0], [0], [val])
        path = tmp_path / "p.mtx"
        write_matrix_market(mat, path)
        assert read_matrix_market(path).val[0] == val
