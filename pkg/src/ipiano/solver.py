"""The inertial forward-backward iteration and its driver loop.

The update is

    x_{n+1} = prox_{alpha_n g}(x_n - alpha_n grad f(x_n) + beta_n (x_n - x_{n-1}))

with ``x_{-1} = x_0``.  :func:`solve` runs the iteration under one of the
step rules from :mod:`ipiano.rules` and records one :class:`TraceRecord`
per iteration, which is what the diagnostics layer consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import ConfigurationError, NonSmoothnessError, NumericalError
from .objective import Objective, SolverState, StopCriterion
from .rules import (LIPSCHITZ_CAP, BacktrackingStep, ConstantStep, GeneralStep,
                    LazyBacktrackingStep, StepRule, bipiano_params,
                    constant_params, delta_gamma, general_param_check)

#: Relative slack when accepting the descent-lemma inequality; absorbs
#: rounding in the two function evaluations being compared.
BACKTRACK_SLACK = 1e-12


@dataclass
class TraceRecord:
    """Diagnostics row for iteration ``n``.

    ``f``, ``g``, ``h``, ``step_norm`` (``||x_n - x_{n-1}||``),
    ``residual_norm`` and ``x`` describe the iterate ``x_n``;
    ``alpha`` ... ``gamma`` and ``backtracks`` describe the parameters
    chosen for the step from ``x_n`` to ``x_{n+1}``.  ``lyapunov`` is
    ``h(x_n) + delta_n ||x_n - x_{n-1}||^2``.
    """

    n: int
    f: float
    g: float
    h: float
    alpha: float
    beta: float
    lipschitz: float
    delta: float
    gamma: float
    step_norm: float
    lyapunov: float
    residual_norm: float
    backtracks: int
    x: np.ndarray = field(repr=False, default=None)

    #: Column order used by the CSV exporter.
    CSV_FIELDS = ("n", "f", "g", "h", "alpha", "beta", "L", "delta", "gamma",
                  "step_norm", "residual", "lyapunov", "backtracks")

    def csv_values(self):
        return (self.n, self.f, self.g, self.h, self.alpha, self.beta,
                self.lipschitz, self.delta, self.gamma, self.step_norm,
                self.residual_norm, self.lyapunov, self.backtracks)


def _check_finite(x: np.ndarray, what: str):
    if not np.all(np.isfinite(x)):
        raise NumericalError(f"non-finite {what}; step size parameters likely divergent")


def ipiano_step(state: SolverState, obj: Objective, alpha: float, beta: float,
                grad: Optional[np.ndarray] = None) -> SolverState:
    """One inertial forward-backward update with explicit ``(alpha, beta)``.

    Returns a new state with refreshed cached values; the input state is
    not modified.  ``grad`` may supply a precomputed ``grad f(x_curr)``.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    if grad is None:
        grad = np.asarray(obj.smooth_grad(state.x_curr), dtype=float)
    _check_finite(grad, "gradient")
    forward = state.x_curr - alpha * grad + beta * (state.x_curr - state.x_prev)
    x_next = np.asarray(obj.prox(forward, alpha), dtype=float)
    _check_finite(x_next, "prox output")
    new = SolverState(
        x_curr=x_next,
        x_prev=state.x_curr.copy(),
        iter=state.iter + 1,
        alpha=alpha,
        beta=beta,
        lipschitz=state.lipschitz,
        delta=state.delta,
        gamma=state.gamma,
        delta_prev=state.delta_prev,
        f_curr=float(obj.smooth_value(x_next)),
        g_curr=float(obj.convex_value(x_next)),
        step_norm=float(np.linalg.norm(x_next - state.x_curr)),
    )
    return new


def proximal_residual_from_grad(x: np.ndarray, grad: np.ndarray, obj: Objective) -> np.ndarray:
    """Residual ``x - prox_g(x - grad f(x))`` with unit step size."""
    return x - np.asarray(obj.prox(x - grad, 1.0), dtype=float)


def _backtrack(obj: Objective, x, x_prev, f_x, grad, L_start, eta,
               params_for_L, slack_scale) -> tuple[float, np.ndarray, float, int]:
    """Find the minimal ``L in {L_start * eta**k}`` passing the descent lemma.

    ``params_for_L(L) -> (alpha, beta)`` supplies the step parameters for a
    trial constant; the candidate iterate is recomputed for every trial
    because ``alpha`` (and possibly ``beta``) depend on ``L``.

    Returns ``(L, x_next, f_next, backtracks)``.
    """
    L = L_start
    backtracks = 0
    tol = BACKTRACK_SLACK * slack_scale
    while True:
        alpha, beta = params_for_L(L)
        forward = x - alpha * grad + beta * (x - x_prev)
        accept = False
        try:
            cand = np.asarray(obj.prox(forward, alpha), dtype=float)
            _check_finite(cand, "prox output")
            d = cand - x
            f_cand = float(obj.smooth_value(cand))
            bound = (f_x + float(grad.ravel() @ d.ravel())
                     + 0.5 * L * float(d.ravel() @ d.ravel()))
            accept = f_cand <= bound + tol
        except NonSmoothnessError:
            raise
        except NumericalError:
            # trial step left the domain where f is finite; treat as a
            # failed descent test and shorten the step
            accept = False
        if accept:
            return L, cand, f_cand, backtracks
        L *= eta
        backtracks += 1
        if L > LIPSCHITZ_CAP:
            raise NonSmoothnessError(
                f"Lipschitz estimate exceeded {LIPSCHITZ_CAP:g}; "
                "the smooth part looks non-Lipschitz (or the objective is buggy)")


def backtrack_step(obj: Objective, state: SolverState, rule: StepRule,
                   grad: Optional[np.ndarray] = None) -> Tuple[float, SolverState]:
    """One iteration of a backtracking rule; returns ``(L_n, new state)``.

    For :class:`LazyBacktrackingStep` the search starts from the previous
    constant (shrunk by ``shrink_factor`` after the previous acceptance and
    recorded in ``state.lipschitz``); for :class:`BacktrackingStep` the
    derived ``(alpha, beta)`` keep ``delta_n`` monotone.
    """
    x, x_prev = state.x_curr, state.x_prev
    f_x = state.f_curr
    if not np.isfinite(f_x):
        f_x = float(obj.smooth_value(x))
    if grad is None:
        grad = np.asarray(obj.smooth_grad(x), dtype=float)
    _check_finite(grad, "gradient")
    slack_scale = 1.0 + abs(f_x)

    if isinstance(rule, LazyBacktrackingStep):
        L_start = state.lipschitz if np.isfinite(state.lipschitz) else rule.L_init

        def params_for_L(L):
            return constant_params(L, rule.beta, rule.safety)

        L, cand, f_cand, backtracks = _backtrack(
            obj, x, x_prev, f_x, grad, L_start, rule.eta, params_for_L, slack_scale)
        alpha, beta = params_for_L(L)
        delta, gamma = delta_gamma(alpha, beta, L)
        next_L_start = L / rule.shrink_factor
        delta_prev = state.delta_prev
    elif isinstance(rule, BacktrackingStep):
        L_start = state.lipschitz if np.isfinite(state.lipschitz) else rule.L_init
        delta_before = state.delta_prev if np.isfinite(state.delta_prev) else rule.delta_init

        def params_for_L(L):
            return bipiano_params(L, delta_before, rule.c2)[:2]

        L, cand, f_cand, backtracks = _backtrack(
            obj, x, x_prev, f_x, grad, L_start, rule.eta, params_for_L, slack_scale)
        alpha, beta, delta, gamma = bipiano_params(L, delta_before, rule.c2)
        next_L_start = L
        delta_prev = delta
    else:
        raise TypeError(f"not a backtracking rule: {type(rule).__name__}")

    new = SolverState(
        x_curr=cand,
        x_prev=x.copy(),
        iter=state.iter + 1,
        alpha=alpha,
        beta=beta,
        lipschitz=next_L_start,
        delta=delta,
        gamma=gamma,
        delta_prev=delta_prev,
        f_curr=f_cand,
        g_curr=float(obj.convex_value(cand)),
        step_norm=float(np.linalg.norm(cand - x)),
        backtracks=backtracks,
    )
    # report the accepted constant, not the (possibly shrunk) next start
    return L, new


def _choose_and_step(obj: Objective, state: SolverState, rule: StepRule,
                     grad: Optional[np.ndarray] = None):
    """Perform one iteration under ``rule``.

    Returns ``(alpha, beta, L, delta, gamma, backtracks, new_state)``.
    """
    if isinstance(rule, ConstantStep):
        alpha, beta = constant_params(rule.lipschitz, rule.beta, rule.safety)
        delta, gamma = delta_gamma(alpha, beta, rule.lipschitz)
        new = ipiano_step(state, obj, alpha, beta, grad=grad)
        return alpha, beta, rule.lipschitz, delta, gamma, 0, new
    if isinstance(rule, GeneralStep):
        n = state.iter
        alpha = float(rule.alpha_schedule(n))
        beta = float(rule.beta_schedule(n))
        delta_prev = state.delta_prev
        check = general_param_check(alpha, beta, rule.lipschitz, rule.c1, rule.c2, delta_prev)
        if not check.ok:
            raise ConfigurationError(
                f"infeasible parameters at iteration {n}: {check.reason}")
        new = ipiano_step(state, obj, alpha, beta, grad=grad)
        new.delta_prev = check.delta
        return alpha, beta, rule.lipschitz, check.delta, check.gamma, 0, new
    if isinstance(rule, (BacktrackingStep, LazyBacktrackingStep)):
        L, new = backtrack_step(obj, state, rule, grad=grad)
        return new.alpha, new.beta, L, new.delta, new.gamma, new.backtracks, new
    raise TypeError(f"unknown step rule: {type(rule).__name__}")


def solve(obj: Objective, rule: StepRule, x0: np.ndarray,
          stop: StopCriterion) -> Tuple[np.ndarray, List[TraceRecord]]:
    """Run the inertial proximal iteration until a stopping bound fires.

    Returns the final iterate and one trace row per executed iteration.
    The run is deterministic: identical inputs give identical traces.
    """
    state = SolverState.initial(np.asarray(x0, dtype=float), obj)
    if isinstance(rule, (BacktrackingStep, LazyBacktrackingStep)):
        state.lipschitz = rule.L_init
    if isinstance(rule, BacktrackingStep):
        state.delta_prev = rule.delta_init

    trace: List[TraceRecord] = []
    for n in range(stop.max_iters):
        f_n, g_n = state.f_curr, state.g_curr
        h_n = f_n + g_n
        if not np.isfinite(h_n):
            raise NumericalError(f"non-finite objective at iteration {n}")
        grad_n = np.asarray(obj.smooth_grad(state.x_curr), dtype=float)
        _check_finite(grad_n, "gradient")
        residual = float(np.linalg.norm(
            proximal_residual_from_grad(state.x_curr, grad_n, obj)))
        step_norm_n = state.step_norm

        if stop.tol_residual is not None and residual <= stop.tol_residual:
            break

        alpha, beta, L, delta, gamma, backtracks, new_state = _choose_and_step(
            obj, state, rule, grad=grad_n)

        trace.append(TraceRecord(
            n=n, f=f_n, g=g_n, h=h_n,
            alpha=alpha, beta=beta, lipschitz=L, delta=delta, gamma=gamma,
            step_norm=step_norm_n,
            lyapunov=h_n + delta * step_norm_n ** 2,
            residual_norm=residual,
            backtracks=backtracks,
            x=state.x_curr.copy(),
        ))

        h_next = new_state.h_curr
        state = new_state
        if stop.target_energy is not None:
            if h_next - stop.target_energy <= stop.tol_energy:
                break
        elif stop.tol_energy is not None and abs(h_next - h_n) <= stop.tol_energy:
            break

    return state.x_curr, trace
