"""Step-size policies for the inertial proximal gradient iteration.

Four policies are provided:

* ``ConstantStep``: a priori constants ``alpha < 2 (1 - beta) / L``.
* ``BacktrackingStep``: per-iteration Lipschitz search with ``alpha`` and
  ``beta`` derived from the feasibility analysis, keeping the sequence
  ``delta_n`` monotonically decreasing.
* ``LazyBacktrackingStep``: fixed ``beta``, non-decreasing Lipschitz search
  within each iteration, ``alpha_n = safety * 2 (1 - beta) / L_n``; an
  optional relaxation divides the accepted constant by ``shrink_factor``
  before the next iteration.
* ``GeneralStep``: user-supplied schedules, validated each iteration
  against the feasibility inequalities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Union

from .errors import ConfigurationError

#: Defaults for the "close to 0" constants of the general rule.
DEFAULT_C1 = 1e-8
DEFAULT_C2 = 1e-6

#: Largest admissible Lipschitz estimate before backtracking gives up.
LIPSCHITZ_CAP = 1e12


def delta_gamma(alpha: float, beta: float, L: float) -> tuple[float, float]:
    """The two feasibility quantities attached to a parameter pair.

    ``delta = 1/alpha - L/2 - beta/(2 alpha)`` and
    ``gamma = 1/alpha - L/2 - beta/alpha``.
    """
    delta = 1.0 / alpha - L / 2.0 - beta / (2.0 * alpha)
    gamma = 1.0 / alpha - L / 2.0 - beta / alpha
    return delta, gamma


def constant_params(L: float, beta: float, safety: float = 0.995) -> tuple[float, float]:
    """Constant step size ``alpha = safety * 2 (1 - beta) / L``.

    ``safety = 0.995`` reproduces the ``alpha_n = 1.99 (1 - beta) / L_n``
    rule used in the denoising experiments.
    """
    if L <= 0:
        raise ValueError(f"L must be > 0, got {L}")
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must be in [0, 1), got {beta}")
    if safety <= 0:
        raise ValueError(f"safety must be > 0, got {safety}")
    return safety * 2.0 * (1.0 - beta) / L, beta


def bipiano_params(L_n: float, delta_prev: float, c2: float) -> tuple[float, float, float, float]:
    """Derived parameters for the monotone backtracking rule.

    With ``b = (delta_prev + L_n/2) / (c2 + L_n/2)`` the extrapolation
    factor ``beta = (b - 1) / (b - 1/2)`` and step size
    ``alpha = 2 (1 - beta) / (2 c2 + L_n)`` are the extremal feasible
    choices: they give ``gamma = c2`` and ``delta = delta_prev`` exactly
    (up to rounding; ``delta`` is clamped so monotonicity is exact).

    Returns ``(alpha, beta, delta, gamma)``.
    """
    if not (delta_prev >= c2 > 0):
        raise ValueError(f"need delta_prev >= c2 > 0, got delta_prev={delta_prev}, c2={c2}")
    if L_n <= 0:
        raise ValueError(f"L_n must be > 0, got {L_n}")
    b = (delta_prev + L_n / 2.0) / (c2 + L_n / 2.0)
    beta = (b - 1.0) / (b - 0.5)
    alpha = 2.0 * (1.0 - beta) / (2.0 * c2 + L_n)
    delta, gamma = delta_gamma(alpha, beta, L_n)
    # Rounding can push delta a few ulps past delta_prev; the analysis only
    # needs delta <= delta_prev, so clamp.
    delta = min(delta, delta_prev)
    return alpha, beta, delta, gamma


class ParamCheck(NamedTuple):
    """Outcome of validating a raw ``(alpha, beta)`` pair."""

    ok: bool
    delta: float
    gamma: float
    reason: str = ""


def general_param_check(alpha: float, beta: float, L: float,
                        c1: float, c2: float, delta_prev: float) -> ParamCheck:
    """Validate a raw parameter pair against the general feasibility law.

    Reports ok iff ``alpha >= c1``, ``beta >= 0``, ``delta >= gamma >= c2``
    and ``delta <= delta_prev``.  Violations are a return value, not an
    error.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    delta, gamma = delta_gamma(alpha, beta, L)
    if beta < 0:
        return ParamCheck(False, delta, gamma, f"beta = {beta} < 0")
    if alpha < c1:
        return ParamCheck(False, delta, gamma, f"alpha = {alpha} < c1 = {c1}")
    if gamma < c2:
        return ParamCheck(False, delta, gamma, f"gamma = {gamma} < c2 = {c2}")
    if delta < gamma:
        return ParamCheck(False, delta, gamma, f"delta = {delta} < gamma = {gamma}")
    if delta > delta_prev:
        return ParamCheck(False, delta, gamma,
                          f"delta = {delta} > delta_prev = {delta_prev}")
    return ParamCheck(True, delta, gamma)


@dataclass(frozen=True)
class ConstantStep:
    """Fixed ``(alpha, beta)`` from a known Lipschitz constant.

    ``safety`` must lie in (0, 1) for the convergence theory to apply;
    larger values are accepted so that deliberately infeasible runs can be
    produced as negative controls for the certificates.
    """

    beta: float
    lipschitz: float
    safety: float = 0.995

    def __post_init__(self):
        if not 0.0 <= self.beta < 1.0:
            raise ConfigurationError(f"beta must be in [0, 1), got {self.beta}")
        if self.lipschitz <= 0:
            raise ConfigurationError(f"lipschitz must be > 0, got {self.lipschitz}")
        if self.safety <= 0:
            raise ConfigurationError(f"safety must be > 0, got {self.safety}")

    @property
    def alpha(self) -> float:
        return constant_params(self.lipschitz, self.beta, self.safety)[0]


@dataclass(frozen=True)
class BacktrackingStep:
    """Backtracked Lipschitz constant with derived ``(alpha_n, beta_n)``.

    Keeps ``delta_n`` monotonically decreasing, so the full convergence
    theory applies along the whole trace.
    """

    c2: float = DEFAULT_C2
    delta_init: float = 1.0
    eta: float = 1.2
    L_init: float = 1.0

    def __post_init__(self):
        if not self.delta_init >= self.c2 > 0:
            raise ConfigurationError(
                f"need delta_init >= c2 > 0, got delta_init={self.delta_init}, c2={self.c2}")
        if self.eta <= 1:
            raise ConfigurationError(f"eta must be > 1, got {self.eta}")
        if self.L_init <= 0:
            raise ConfigurationError(f"L_init must be > 0, got {self.L_init}")


@dataclass(frozen=True)
class LazyBacktrackingStep:
    """Fixed ``beta`` with a non-decreasing in-iteration Lipschitz search.

    ``shrink_factor > 1`` enables the relaxation that divides the accepted
    constant before the next iteration; this speeds up practical runs but
    gives up the monotonicity of ``delta_n``, so certificate checks fall
    back to per-step inequalities.  With ``shrink_factor = 1`` and
    ``L_init`` at or above the true Lipschitz constant the rule is
    bit-identical to ``ConstantStep`` with the same ``beta``.
    """

    beta: float
    L_init: float = 1.0
    eta: float = 1.2
    shrink_factor: float = 1.05
    safety: float = 0.995

    def __post_init__(self):
        if not 0.0 <= self.beta < 1.0:
            raise ConfigurationError(f"beta must be in [0, 1), got {self.beta}")
        if self.L_init <= 0:
            raise ConfigurationError(f"L_init must be > 0, got {self.L_init}")
        if self.eta <= 1:
            raise ConfigurationError(f"eta must be > 1, got {self.eta}")
        if self.shrink_factor < 1:
            raise ConfigurationError(
                f"shrink_factor must be >= 1, got {self.shrink_factor}")
        if not 0 < self.safety < 1:
            raise ConfigurationError(f"safety must be in (0, 1), got {self.safety}")


@dataclass(frozen=True)
class GeneralStep:
    """Raw schedules ``n -> alpha_n`` and ``n -> beta_n``, checked per step.

    ``lipschitz`` is a known global constant for the smooth part.  Every
    produced pair must pass :func:`general_param_check`; the solver raises
    :class:`ConfigurationError` otherwise.
    """

    alpha_schedule: Callable[[int], float]
    beta_schedule: Callable[[int], float]
    lipschitz: float
    c1: float = DEFAULT_C1
    c2: float = DEFAULT_C2

    def __post_init__(self):
        if self.lipschitz <= 0:
            raise ConfigurationError(f"lipschitz must be > 0, got {self.lipschitz}")
        if not (self.c1 > 0 and self.c2 > 0):
            raise ConfigurationError("c1 and c2 must be > 0")


StepRule = Union[ConstantStep, BacktrackingStep, LazyBacktrackingStep, GeneralStep]
