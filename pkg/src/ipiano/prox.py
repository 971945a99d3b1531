"""Closed-form proximal maps for the convex terms used by the shipped problems.

All maps are pure functions of their inputs.  ``prox_*(y, tau)`` returns the
minimizer of ``0.5 * ||x - y||^2 + tau * g(x)`` for the respective ``g``.
The sign convention ``sgn(0) = 0`` makes the shrinkage maps continuous at 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class ConvexTerm:
    """A convex function bundled with its proximal map.

    ``value(x)`` may return ``inf`` outside the domain; ``prox(y, alpha)``
    must return a point of the domain.
    """

    value: Callable[[np.ndarray], float]
    prox: Callable[[np.ndarray, float], np.ndarray]
    description: str = ""


def prox_l1(y, tau):
    """Componentwise soft shrinkage: ``max(0, |y| - tau) * sgn(y)``."""
    if tau < 0:
        raise ValueError(f"shrinkage threshold must be >= 0, got {tau}")
    y = np.asarray(y, dtype=float)
    return np.maximum(0.0, np.abs(y) - tau) * np.sign(y)


def prox_weighted_quadratic(y_hat, u0, alpha_lambda):
    """Prox of ``(lambda/2) ||u - u0||^2``: pull ``y_hat`` toward ``u0``.

    Componentwise ``(y_hat + alpha_lambda * u0) / (1 + alpha_lambda)``.
    """
    if alpha_lambda < 0:
        raise ValueError(f"alpha*lambda must be >= 0, got {alpha_lambda}")
    y_hat = np.asarray(y_hat, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    if y_hat.shape != u0.shape:
        raise ValueError(f"shape mismatch: {y_hat.shape} vs {u0.shape}")
    return (y_hat + alpha_lambda * u0) / (1.0 + alpha_lambda)


def prox_shifted_l1(y_hat, u0, tau):
    """Prox of ``lambda ||u - u0||_1``: shrink ``y_hat - u0``, shift back."""
    y_hat = np.asarray(y_hat, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    if y_hat.shape != u0.shape:
        raise ValueError(f"shape mismatch: {y_hat.shape} vs {u0.shape}")
    return prox_l1(y_hat - u0, tau) + u0


def prox_zero(y, alpha):
    """Prox of the zero function: the identity."""
    return np.asarray(y, dtype=float).copy()


def l1_term(lam: float) -> ConvexTerm:
    """``g(x) = lam * ||x||_1`` with its shrinkage prox."""
    return ConvexTerm(
        value=lambda x: lam * float(np.sum(np.abs(x))),
        prox=lambda y, alpha: prox_l1(y, alpha * lam),
        description=f"{lam} * ||x||_1",
    )


def zero_term() -> ConvexTerm:
    """``g = 0``; the proximal step is the identity."""
    return ConvexTerm(
        value=lambda x: 0.0,
        prox=prox_zero,
        description="0",
    )
