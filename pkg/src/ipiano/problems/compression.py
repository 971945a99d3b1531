"""Mask optimization for homogeneous-diffusion image compression.

A per-pixel mask ``c`` selects the stored pixels; the reconstruction
solves ``A u = C u0`` with ``A = C + (C - I) L`` (``C = diag(c)``, ``L``
the Neumann Laplacian).  The mask is found by minimizing

    ``0.5 ||A^{-1} C u0 - u0||^2 + lam ||c||_1``

over unconstrained real ``c``.  The gradient of the smooth part is
``diag(-(I + L) u + u0) A^{-T} (u - u0)``, needing one extra transpose
solve per evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateMaskError
from ..objective import Objective
from ..prox import prox_l1
from ..sparse import DEFAULT_TOL, LUSolver, SparseMatrix, assemble_laplacian, assemble_system

#: Masks with all entries at or below this magnitude are rejected.
DEGENERATE_EPS = 1e-12

#: Entries with magnitude above this count toward the mask density.
DENSITY_EPS = 1e-8


@dataclass(frozen=True)
class CompressionModel:
    u0: np.ndarray
    image_shape: tuple[int, int]
    lam: float
    laplacian: SparseMatrix = field(default=None, repr=False)
    solver_tol: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "u0", np.asarray(self.u0, dtype=float).ravel())
        h, w = self.image_shape
        if self.u0.size != h * w:
            raise ValueError("image size mismatch")
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if self.laplacian is None:
            object.__setattr__(self, "laplacian", assemble_laplacian(h, w))


def _system_solver(c: np.ndarray, model: CompressionModel) -> tuple[np.ndarray, LUSolver]:
    c = np.asarray(c, dtype=float).ravel()
    if c.size != model.u0.size:
        raise ValueError("mask size mismatch")
    if np.max(np.abs(c)) <= DEGENERATE_EPS:
        raise DegenerateMaskError("mask is numerically zero; system singular")
    A = assemble_system(c, model.laplacian)
    return c, LUSolver(A, model.solver_tol)


def compression_reconstruct(c: np.ndarray, model: CompressionModel) -> np.ndarray:
    """Reconstruction ``u`` solving ``A u = C u0``."""
    c, lu = _system_solver(c, model)
    return lu.solve(c * model.u0)


def compression_f_grad(c: np.ndarray, model: CompressionModel) -> tuple[float, np.ndarray]:
    """Value and gradient of ``0.5 ||u(c) - u0||^2``."""
    c, lu = _system_solver(c, model)
    u = lu.solve(c * model.u0)
    diff = u - model.u0
    value = 0.5 * float(diff @ diff)
    t = model.u0 - u - model.laplacian @ u
    z = lu.solve_transpose(diff)
    return value, t * z


def compression_objective(model: CompressionModel) -> Objective:
    lam = model.lam
    return Objective(
        smooth_value=lambda c: compression_f_grad(c, model)[0],
        smooth_grad=lambda c: compression_f_grad(c, model)[1],
        convex_value=lambda c: lam * float(np.sum(np.abs(c))),
        prox=lambda y, alpha: prox_l1(y, alpha * lam),
        lower_bound=0.0,
    )


def mse(u: np.ndarray, u0: np.ndarray) -> float:
    """Mean squared error ``(1/N) sum (u_i - u0_i)^2``."""
    u = np.asarray(u, dtype=float).ravel()
    u0 = np.asarray(u0, dtype=float).ravel()
    if u.shape != u0.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {u0.shape}")
    d = u - u0
    return float(d @ d) / u.size


def mask_density(c: np.ndarray, eps: float = DENSITY_EPS) -> float:
    """Fraction of mask entries with magnitude above ``eps``."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    c = np.asarray(c, dtype=float).ravel()
    return float(np.count_nonzero(np.abs(c) > eps)) / c.size
