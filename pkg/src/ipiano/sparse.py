"""Sparse operators for the mask-optimization problem.

A thin compressed-row wrapper around ``scipy.sparse`` plus the two
assembly routines the problem needs: the 5-point Neumann Laplacian ``L``
and the reconstruction system ``A = C + (C - I) L`` for a mask ``c``.
Solves go through a sparse LU factorization and are verified against an
explicit residual contract.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import SingularSystemError

DEFAULT_TOL = 1e-10


class SparseMatrix:
    """Immutable CSR matrix with canonical structure.

    Column indices are strictly increasing within each row and explicit
    zeros are dropped, so equal operators compare equal structurally.
    """

    def __init__(self, matrix: sp.spmatrix):
        m = sp.csr_matrix(matrix, copy=True)
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        self._m = m

    @property
    def rows(self) -> int:
        return self._m.shape[0]

    @property
    def cols(self) -> int:
        return self._m.shape[1]

    @property
    def row_offsets(self) -> np.ndarray:
        return self._m.indptr

    @property
    def col_indices(self) -> np.ndarray:
        return self._m.indices

    @property
    def values(self) -> np.ndarray:
        return self._m.data

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self._m @ np.asarray(v, dtype=float)

    __matmul__ = matvec

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self._m.T)

    def to_scipy(self) -> sp.csr_matrix:
        return self._m.copy()

    def to_dense(self) -> np.ndarray:
        return self._m.toarray()

    def to_matrix_market(self, path) -> None:
        """Dump in Matrix Market coordinate text format (debugging aid)."""
        from scipy.io import mmwrite
        mmwrite(str(path), self._m.tocoo())


def assemble_laplacian(height: int, width: int) -> SparseMatrix:
    """5-point Laplacian with homogeneous Neumann boundary.

    The center coefficient at each pixel is minus the number of existing
    grid neighbors, so every row sums to zero, the matrix is symmetric,
    and it is negative semidefinite (it equals ``-D^T D`` for the
    zero-flux forward-difference operator ``D``).
    """
    if height < 1 or width < 1:
        raise ValueError("grid dimensions must be >= 1")
    n = height * width
    idx = np.arange(n).reshape(height, width)
    rows, cols, vals = [], [], []
    # each neighboring pair contributes -1 to both diagonals, +1 off-diagonal
    for a, b in ((idx[:, :-1].ravel(), idx[:, 1:].ravel()),
                 (idx[:-1, :].ravel(), idx[1:, :].ravel())):
        ones = np.ones(a.size)
        rows.extend([a, b, a, b])
        cols.extend([a, b, b, a])
        vals.extend([-ones, -ones, ones, ones])
    if not rows:  # 1x1 grid: no neighbors, L = 0
        return SparseMatrix(sp.csr_matrix((n, n)))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    return SparseMatrix(sp.coo_matrix((vals, (rows, cols)), shape=(n, n)))


def assemble_system(c: np.ndarray, L: SparseMatrix) -> SparseMatrix:
    """Reconstruction system ``A = C + (C - I) L`` for mask ``c``.

    Row ``i`` equals ``c_i e_i^T + (c_i - 1) (row i of L)``; singular when
    ``c = 0`` (downstream guards reject that case).
    """
    c = np.asarray(c, dtype=float).ravel()
    if c.size != L.rows:
        raise ValueError(f"mask length {c.size} != system size {L.rows}")
    Ls = L.to_scipy()
    A = sp.diags(c) + sp.diags(c - 1.0) @ Ls
    return SparseMatrix(A)


class LUSolver:
    """Sparse LU factorization reused for repeated (transpose) solves."""

    def __init__(self, A: SparseMatrix, tol: float = DEFAULT_TOL):
        if A.rows != A.cols:
            raise ValueError("matrix must be square")
        self._A = A
        self.tol = tol
        try:
            self._lu = spla.splu(sp.csc_matrix(A.to_scipy()))
        except RuntimeError as exc:
            raise SingularSystemError(f"sparse LU factorization failed: {exc}") from exc

    def _solve(self, b: np.ndarray, trans: str) -> np.ndarray:
        b = np.asarray(b, dtype=float).ravel()
        x = self._lu.solve(b, trans=trans)
        if not np.all(np.isfinite(x)):
            raise SingularSystemError("non-finite solution; system is singular")
        op = self._A.to_scipy() if trans == "N" else self._A.to_scipy().T
        res = np.linalg.norm(op @ x - b)
        scale = max(np.linalg.norm(b), np.finfo(float).tiny)
        if res > self.tol * scale:
            # one round of iterative refinement before giving up
            x = x + self._lu.solve(b - op @ x, trans=trans)
            res = np.linalg.norm(op @ x - b)
            if res > self.tol * scale:
                raise SingularSystemError(
                    f"residual {res:.3e} exceeds {self.tol:g} * ||b||; "
                    "system is singular or severely ill-conditioned")
        return x

    def solve(self, b: np.ndarray) -> np.ndarray:
        return self._solve(b, "N")

    def solve_transpose(self, b: np.ndarray) -> np.ndarray:
        return self._solve(b, "T")


def solve(A: SparseMatrix, b: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Solve ``A x = b`` with residual ``||Ax - b|| <= tol * ||b||``."""
    return LUSolver(A, tol).solve(b)


def solve_transpose(A: SparseMatrix, b: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Solve ``A^T x = b`` without materializing the transpose."""
    return LUSolver(A, tol).solve_transpose(b)
