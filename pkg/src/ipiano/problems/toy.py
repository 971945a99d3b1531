"""Two-dimensional toy problem with a non-convex log data term.

``h(x) = 0.5 sum_i log(1 + mu (x_i - u0_i)^2) + lam ||x||_1``.

Coercive, nonnegative, and riddled with spurious stationary points, which
makes it a good test bed for the effect of the inertial term.  The
gradient of the smooth part has Lipschitz constant exactly ``mu``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..objective import Objective
from ..prox import prox_l1


@dataclass(frozen=True)
class ToyProblem:
    u0: np.ndarray = field(default_factory=lambda: np.ones(2))
    mu: float = 100.0
    lam: float = 1.0

    def __post_init__(self):
        if self.mu <= 0 or self.lam <= 0:
            raise ValueError("mu and lam must be > 0")
        object.__setattr__(self, "u0", np.asarray(self.u0, dtype=float))

    @property
    def lipschitz(self) -> float:
        return self.mu


def toy_f_grad(x: np.ndarray, prob: ToyProblem) -> tuple[float, np.ndarray]:
    """Value and gradient of the smooth part."""
    x = np.asarray(x, dtype=float)
    s = x - prob.u0
    q = prob.mu * s * s
    value = 0.5 * float(np.sum(np.log1p(q)))
    grad = prob.mu * s / (1.0 + q)
    return value, grad


def toy_objective(prob: ToyProblem) -> Objective:
    return Objective(
        smooth_value=lambda x: toy_f_grad(x, prob)[0],
        smooth_grad=lambda x: toy_f_grad(x, prob)[1],
        convex_value=lambda x: prob.lam * float(np.sum(np.abs(x))),
        prox=lambda y, alpha: prox_l1(y, alpha * prob.lam),
        lower_bound=0.0,
    )


def toy_coordinate_minimizers(prob: ToyProblem) -> tuple[float, float]:
    """The two per-coordinate local minimizers ``(0, x_star)``.

    Assumes the default-style setting where all entries of ``u0`` are
    equal.  ``x_star`` solves the first-order condition on the positive
    side, ``mu s + lam (1 + mu s^2) = 0`` with ``s = x - u0``, picked as
    the root nearest 0 (the basin around ``u0``).  0 itself is stationary
    whenever ``|grad f(0)| <= lam``.
    """
    u = float(prob.u0.ravel()[0])
    if not np.allclose(prob.u0, u):
        raise ValueError("coordinate analysis needs a constant target vector")
    mu, lam = prob.mu, prob.lam

    def stationarity(s):
        return mu * s + lam * (1.0 + mu * s * s)

    if mu < 4.0 * lam:
        raise ValueError("no positive-side minimizer exists for mu < 4 lam")
    # root of smallest magnitude lies in (-2 lam / mu * 2, 0); bracket at the
    # vertex of the quadratic where the other root takes over
    vertex = -0.5 / lam
    s_star = brentq(stationarity, vertex, 0.0, xtol=1e-15, rtol=1e-15)
    x_star = u + s_star
    grad0 = abs(mu * (0.0 - u) / (1.0 + mu * u * u))
    if grad0 > lam:
        raise ValueError("0 is not a stationary point for these parameters")
    return 0.0, x_star


def toy_stationary_points(prob: ToyProblem) -> list[np.ndarray]:
    """The four local minimizers ``{0, x_star}^2`` for the 2-D default.

    (The first-order condition admits further stationary points that are
    local maxima of the coordinate-wise energy; descent methods do not
    terminate there, so they are not listed.)
    """
    if prob.u0.size != 2:
        raise ValueError("stationary point list is for the 2-D problem")
    lo, hi = toy_coordinate_minimizers(prob)
    return [np.array([a, b]) for a in (lo, hi) for b in (lo, hi)]
