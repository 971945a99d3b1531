"""Runtime certificates derived from the convergence theory.

Each certificate replays inequalities that the analysis guarantees along a
valid run, against the numbers actually recorded in the trace.  A failing
certificate means either an infeasible parameter choice (useful as a
negative control) or an implementation bug.  Slack tolerances are scaled
by ``1 + |h(x0)|`` so they are unit-free across problems whose energies
span orders of magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Sequence

import numpy as np

from .errors import ConfigurationError
from .objective import Objective
from .solver import TraceRecord, proximal_residual_from_grad

LYAPUNOV_TOL = 1e-10


@dataclass
class Certificate:
    """Outcome of one certificate check over a trace.

    ``worst_slack`` is the most negative margin encountered (nonnegative
    margins mean the inequality held); ``location`` is the iteration index
    where it occurred.  ``satisfied`` is ``worst_slack >= -tolerance``.
    """

    name: str
    satisfied: bool
    worst_slack: float
    location: int
    note: str = ""


def _finish(name, slacks, locations, tol, note=""):
    if not slacks:
        return Certificate(name, True, float("inf"), -1, note or "no checkable steps")
    i = int(np.argmin(slacks))
    worst = float(slacks[i])
    return Certificate(name, worst >= -tol, worst, int(locations[i]), note)


def proximal_residual(x: np.ndarray, obj: Objective) -> np.ndarray:
    """``r(x) = x - prox_g(x - grad f(x))`` with step size fixed at 1.

    Zero exactly at critical points; using a fixed unit step keeps the
    residual comparable across runs with different step sizes.
    """
    grad = np.asarray(obj.smooth_grad(x), dtype=float)
    return proximal_residual_from_grad(np.asarray(x, dtype=float), grad, obj)


def lyapunov_certificate(trace: Sequence[TraceRecord]) -> Certificate:
    """Descent of ``H_n = h(x_n) + delta_n ||x_n - x_{n-1}||^2``.

    Checks, for every executed step,

    * the raw per-step estimate
      ``h_{n+1} + delta_n s_{n+1}^2 <= h_n + delta_n s_n^2 - gamma_n s_n^2``
      (with ``s_n`` the step norm), which holds regardless of how
      ``delta_n`` evolves;
    * the telescoped form ``H_{n+1} <= H_n - gamma_n s_n^2`` and plain
      monotonicity of ``H_n`` on steps with ``delta_{n+1} <= delta_n``
      (runs using the Lipschitz shrink relaxation may increase ``delta``,
      where the telescoped form is not guaranteed);
    * the summed form
      ``sum gamma_n s_n^2 <= H_start - H_N``, accumulated over each maximal
      window of non-increasing ``delta`` (telescoping is only valid there;
      a ``delta`` increase restarts the window).
    """
    if len(trace) < 2:
        return Certificate("lyapunov_descent", True, float("inf"), -1, "trace too short")
    h0 = trace[0].h
    tol = LYAPUNOV_TOL * (1.0 + abs(h0))
    slacks, locs = [], []
    skipped = 0
    window_start = trace[0].lyapunov
    partial = 0.0
    for prev, cur in zip(trace[:-1], trace[1:]):
        decrease = prev.gamma * prev.step_norm ** 2
        # raw estimate, same delta on both sides
        lhs = cur.h + prev.delta * cur.step_norm ** 2
        rhs = prev.h + prev.delta * prev.step_norm ** 2 - decrease
        slacks.append(rhs - lhs)
        locs.append(prev.n)
        if cur.delta <= prev.delta + tol:
            slacks.append(prev.lyapunov - decrease - cur.lyapunov)
            locs.append(prev.n)
            slacks.append(prev.lyapunov - cur.lyapunov)
            locs.append(prev.n)
            partial += decrease
            slacks.append(window_start - cur.lyapunov - partial)
            locs.append(cur.n)
        else:
            skipped += 1
            window_start = cur.lyapunov
            partial = 0.0
    note = f"{skipped} step(s) with increasing delta checked in raw form only" if skipped else ""
    return _finish("lyapunov_descent", slacks, locs, tol, note)


def rate_certificate(trace: Sequence[TraceRecord], c1: float, c2: float,
                     h_lower: float = 0.0) -> Certificate:
    """Worst-case rate and summed-residual bounds along the trace.

    For every ``N``: ``min_{n<=N} s_n^2 <= (h(x0) - h_lower)/(c2 (N+1))``
    and ``sum_{n<=N} ||r(x_n)|| <= (2/c1) sum_{n<=N} s_{n+1}``.
    Requires ``c1 <= min(1, min_n alpha_n)`` and ``c2 <= min_n gamma_n``.
    The note records how loose the rate bound is at the final ``N`` and
    the observed ``min ||r||^2 / min s^2`` ratio.
    """
    if not trace:
        return Certificate("rate_bound", True, float("inf"), -1, "empty trace")
    alpha_min = min(1.0, min(r.alpha for r in trace))
    if c1 > alpha_min * (1 + 1e-12):
        raise ConfigurationError(
            f"c1 = {c1} exceeds min(1, min alpha_n) = {alpha_min}")
    h0 = trace[0].h
    tol = LYAPUNOV_TOL * (1.0 + abs(h0))
    slacks, locs = [], []
    mu = float("inf")
    res_sum = 0.0
    step_sum = 0.0
    for N, rec in enumerate(trace):
        mu = min(mu, rec.step_norm ** 2)
        bound = (h0 - h_lower) / (c2 * (N + 1))
        slacks.append(bound - mu)
        locs.append(rec.n)
        if N + 1 < len(trace):
            res_sum += rec.residual_norm
            step_sum += trace[N + 1].step_norm
            slacks.append((2.0 / c1) * step_sum - res_sum)
            locs.append(rec.n)
    mu_res = min(r.residual_norm ** 2 for r in trace)
    looseness = ((h0 - h_lower) / (c2 * len(trace))) / mu if mu > 0 else float("inf")
    note = (f"rate bound looseness at final N: {looseness:.3g}; "
            f"min||r||^2 / min s^2 = {mu_res / mu if mu > 0 else float('inf'):.3g}")
    return _finish("rate_bound", slacks, locs, tol, note)


def h_certificates(trace: Sequence[TraceRecord], obj: Objective, delta: float,
                   c1: float, c2: float) -> Certificate:
    """Sufficient-decrease (H1) and relative-subgradient (H2) checks.

    Valid on windows where ``delta_n`` is constant.  For each step the
    subgradient pair

    ``w_x = (x_n - x_{n+1})/alpha_n - grad f(x_n)
    + (beta_n/alpha_n)(x_n - x_{n-1}) + grad f(x_{n+1})
    + 2 delta (x_{n+1} - x_n)`` and ``w_y = -2 delta (x_{n+1} - x_n)``

    must satisfy ``||w_x|| + ||w_y|| <= (7/c1)(s_n + s_{n+1})``, and the
    Lyapunov value must drop by at least ``c2 s_n^2``.
    """
    if len(trace) < 2:
        return Certificate("h1_h2", True, float("inf"), -1, "trace too short")
    deltas = [r.delta for r in trace]
    span = max(deltas) - min(deltas)
    if span > 1e-9 * (1.0 + abs(deltas[0])):
        raise ConfigurationError(
            f"delta_n varies over the trace (span {span:g}); "
            "restrict to a constant-delta window first")
    h0 = trace[0].h
    tol = LYAPUNOV_TOL * (1.0 + abs(h0))
    # slack on the H2 norm bound is naturally on the scale of gradients;
    # keep the same unit-free tolerance
    slacks, locs = [], []
    for i in range(len(trace) - 1):
        prev, cur = trace[i], trace[i + 1]
        # H1
        slacks.append(prev.lyapunov - c2 * prev.step_norm ** 2 - cur.lyapunov)
        locs.append(prev.n)
        # H2
        x_n, x_next = prev.x, cur.x
        x_before = trace[i - 1].x if i > 0 else prev.x  # x_{-1} = x_0
        w_x = ((x_n - x_next) / prev.alpha
               - np.asarray(obj.smooth_grad(x_n), dtype=float)
               + np.asarray(obj.smooth_grad(x_next), dtype=float)
               + (prev.beta / prev.alpha) * (x_n - x_before)
               + 2.0 * delta * (x_next - x_n))
        w_y = -2.0 * delta * (x_next - x_n)
        total = float(np.linalg.norm(w_x) + np.linalg.norm(w_y))
        bound = (7.0 / c1) * (prev.step_norm + cur.step_norm)
        slacks.append(bound - total)
        locs.append(prev.n)
    return _finish("h1_h2", slacks, locs, tol)


def grad_check(f_value: Callable[[np.ndarray], float],
               f_grad: Callable[[np.ndarray], np.ndarray],
               x: np.ndarray, h: float | None = None,
               max_coords: int = 64, seed: int = 0) -> float:
    """Max relative error between ``f_grad`` and central differences.

    For large inputs only ``max_coords`` randomly chosen coordinates are
    probed (deterministic for a fixed ``seed``).
    """
    x = np.asarray(x, dtype=float).ravel()
    if h is None:
        h = 1e-5 * (1.0 + (float(np.max(np.abs(x))) if x.size else 0.0))
    grad = np.asarray(f_grad(x), dtype=float).ravel()
    n = x.size
    if n <= max_coords:
        coords = np.arange(n)
    else:
        coords = np.random.default_rng(seed).choice(n, size=max_coords, replace=False)
    worst = 0.0
    for i in coords:
        e = np.zeros_like(x)
        e[i] = h
        fd = (float(f_value(x + e)) - float(f_value(x - e))) / (2.0 * h)
        err = abs(fd - grad[i]) / (1.0 + abs(grad[i]))
        worst = max(worst, err)
    return worst
