"""Composite objective ``h = f + g`` and solver bookkeeping types."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class Objective:
    """Composite objective: smooth (possibly non-convex) ``f`` plus convex ``g``.

    ``prox(y, alpha)`` must return the minimizer of
    ``0.5 * ||x - y||^2 + alpha * g(x)``.  ``lower_bound`` is any constant
    below ``inf h``; the shipped problems are sums of nonnegative terms, so
    0 is valid for all of them.
    """

    smooth_value: Callable[[np.ndarray], float]
    smooth_grad: Callable[[np.ndarray], np.ndarray]
    convex_value: Callable[[np.ndarray], float]
    prox: Callable[[np.ndarray, float], np.ndarray]
    lower_bound: float = 0.0

    def value(self, x: np.ndarray) -> float:
        return float(self.smooth_value(x)) + float(self.convex_value(x))


@dataclass
class SolverState:
    """Current and previous iterate plus the per-iteration parameters.

    At initialization ``x_prev`` equals ``x_curr``, so the first step has no
    inertial contribution and ``step_norm`` is 0.
    """

    x_curr: np.ndarray
    x_prev: np.ndarray
    iter: int = 0
    alpha: float = float("nan")
    beta: float = float("nan")
    lipschitz: float = float("nan")
    delta: float = float("nan")
    gamma: float = float("nan")
    delta_prev: float = float("inf")
    f_curr: float = float("nan")
    g_curr: float = float("nan")
    step_norm: float = 0.0
    backtracks: int = 0

    @classmethod
    def initial(cls, x0: np.ndarray, obj: Optional[Objective] = None) -> "SolverState":
        x0 = np.asarray(x0, dtype=float).copy()
        state = cls(x_curr=x0, x_prev=x0.copy())
        if obj is not None:
            state.f_curr = float(obj.smooth_value(x0))
            state.g_curr = float(obj.convex_value(x0))
        return state

    @property
    def h_curr(self) -> float:
        return self.f_curr + self.g_curr


@dataclass(frozen=True)
class StopCriterion:
    """Stopping rules; ``max_iters`` is always active.

    ``tol_energy`` stops once successive objective values differ by less
    than the tolerance.  ``tol_residual`` stops once the proximal residual
    norm drops below the tolerance.  If ``target_energy`` is given, the run
    instead stops once ``h - target_energy <= tol_energy`` (used to
    reproduce iterations-to-threshold tables).
    """

    max_iters: int
    tol_energy: Optional[float] = None
    tol_residual: Optional[float] = None
    target_energy: Optional[float] = None

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.target_energy is not None and self.tol_energy is None:
            raise ValueError("target_energy requires tol_energy as its threshold")
