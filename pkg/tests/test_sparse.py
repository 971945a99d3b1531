"""Laplacian assembly and the sparse solve residual contract."""

import numpy as np
import pytest

from ipiano.errors import SingularSystemError
from ipiano.sparse import (LUSolver, SparseMatrix, assemble_laplacian,
                           assemble_system, solve, solve_transpose)


def dense_laplacian_oracle(h, w):
    n = h * w
    L = np.zeros((n, n))
    idx = np.arange(n).reshape(h, w)
    for i in range(h):
        for j in range(w):
            p = idx[i, j]
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                ni, nj = i + di, j + dj
                if 0 <= ni < h and 0 <= nj < w:
                    L[p, idx[ni, nj]] += 1.0
                    L[p, p] -= 1.0
    return L


class TestLaplacian:
    def test_symmetry_exact(self):
        L = assemble_laplacian(6, 7).to_dense()
        assert np.array_equal(L, L.T)

    def test_row_sums_zero(self):
        L = assemble_laplacian(9, 5).to_dense()
        assert np.max(np.abs(L.sum(axis=1))) <= 1e-14

    def test_constant_vector_in_kernel(self):
        L = assemble_laplacian(8, 8)
        np.testing.assert_allclose(L @ np.full(64, 3.0), 0.0, atol=1e-13)

    def test_negative_semidefinite(self):
        L = assemble_laplacian(6, 6).to_dense()
        eig = np.linalg.eigvalsh(L)
        assert eig.max() <= 1e-12

    def test_center_row_stencil(self):
        L = assemble_laplacian(3, 3).to_dense()
        row = L[4]
        assert row[4] == -4.0
        assert row[1] == row[3] == row[5] == row[7] == 1.0
        assert row[0] == row[2] == row[6] == row[8] == 0.0

    def test_corner_row_stencil(self):
        L = assemble_laplacian(3, 3).to_dense()
        row = L[0]
        assert row[0] == -2.0
        assert row[1] == 1.0 and row[3] == 1.0

    def test_matches_dense_oracle(self):
        for h, w in ((1, 1), (1, 5), (4, 4), (3, 7)):
            got = assemble_laplacian(h, w).to_dense()
            np.testing.assert_array_equal(got, dense_laplacian_oracle(h, w))

    def test_operator_symmetry_and_nsd(self):
        L = assemble_laplacian(7, 7)
        rng = np.random.default_rng(0)
        for _ in range(5):
            u, v = rng.normal(size=49), rng.normal(size=49)
            assert float((L @ u) @ v) == pytest.approx(float(u @ (L @ v)), abs=1e-10)
            assert float((L @ u) @ u) <= 1e-12

    def test_invalid_dims(self):
        with pytest.raises(ValueError):
            assemble_laplacian(0, 3)


class TestAssembleSystem:
    def test_full_mask_gives_identity(self):
        L = assemble_laplacian(4, 4)
        A = assemble_system(np.ones(16), L).to_dense()
        np.testing.assert_array_equal(A, np.eye(16))

    def test_zero_mask_gives_negative_laplacian(self):
        L = assemble_laplacian(4, 4)
        A = assemble_system(np.zeros(16), L).to_dense()
        np.testing.assert_array_equal(A, -L.to_dense())

    def test_matches_dense_construction(self):
        L = assemble_laplacian(4, 4)
        c = np.random.default_rng(1).uniform(0, 1, size=16)
        A = assemble_system(c, L).to_dense()
        want = np.diag(c) + np.diag(c - 1.0) @ L.to_dense()
        np.testing.assert_allclose(A, want, atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            assemble_system(np.ones(5), assemble_laplacian(2, 2))


class TestSolve:
    def test_identity_system(self):
        A = SparseMatrix(np.eye(5))
        b = np.arange(5, dtype=float)
        np.testing.assert_allclose(solve(A, b), b, atol=1e-14)

    def test_zero_rhs(self):
        L = assemble_laplacian(4, 4)
        A = assemble_system(np.full(16, 0.5), L)
        np.testing.assert_allclose(solve(A, np.zeros(16)), 0.0, atol=1e-14)
        np.testing.assert_allclose(solve_transpose(A, np.zeros(16)), 0.0, atol=1e-14)

    def test_hundred_random_systems_vs_dense_lu(self):
        L = assemble_laplacian(8, 8)
        rng = np.random.default_rng(2)
        for _ in range(100):
            c = rng.uniform(0.1, 1.0, size=64)
            b = rng.normal(size=64)
            A = assemble_system(c, L)
            dense = A.to_dense()
            np.testing.assert_allclose(solve(A, b), np.linalg.solve(dense, b),
                                       atol=1e-8)
            np.testing.assert_allclose(solve_transpose(A, b),
                                       np.linalg.solve(dense.T, b), atol=1e-8)

    def test_symmetric_system_transpose_equals_solve(self):
        # -L + I is symmetric positive definite
        L = assemble_laplacian(5, 5)
        A = SparseMatrix(np.eye(25) - L.to_dense())
        b = np.random.default_rng(3).normal(size=25)
        np.testing.assert_allclose(solve(A, b), solve_transpose(A, b), atol=1e-10)

    def test_residual_contract(self):
        L = assemble_laplacian(8, 8)
        c = np.random.default_rng(4).uniform(0.1, 1.0, size=64)
        A = assemble_system(c, L)
        b = np.random.default_rng(5).normal(size=64)
        lu = LUSolver(A, tol=1e-10)
        x = lu.solve(b)
        assert np.linalg.norm(A.to_dense() @ x - b) <= 1e-10 * np.linalg.norm(b)

    def test_singular_system_raises(self):
        L = assemble_laplacian(4, 4)  # singular: constants in the kernel
        with pytest.raises(SingularSystemError):
            solve(SparseMatrix(L.to_scipy()), np.random.default_rng(6).normal(size=16))


class TestSparseMatrix:
    def test_canonical_structure(self):
        m = SparseMatrix(np.array([[0.0, 2.0], [3.0, 0.0]]))
        assert m.rows == m.cols == 2
        assert list(m.values) == [2.0, 3.0]
        offs = m.row_offsets
        for r in range(m.rows):
            cols = m.col_indices[offs[r]:offs[r + 1]]
            assert np.all(np.diff(cols) > 0)

    def test_transpose_roundtrip(self):
        rng = np.random.default_rng(7)
        dense = rng.normal(size=(6, 6)) * (rng.random((6, 6)) < 0.3)
        m = SparseMatrix(dense)
        np.testing.assert_array_equal(m.transpose().to_dense(), dense.T)

    def test_matrix_market_roundtrip(self, tmp_path):
        from scipy.io import mmread
        L = assemble_laplacian(3, 3)
        path = tmp_path / "lap.mtx"
        L.to_matrix_market(path)
        back = np.asarray(mmread(str(path)).todense())
        np.testing.assert_allclose(back, L.to_dense(), atol=0)
