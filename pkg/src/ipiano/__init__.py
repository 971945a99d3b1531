"""Inertial proximal gradient solver for non-convex composite problems.

Minimizes ``h = f + g`` with smooth possibly non-convex ``f`` and convex
possibly non-smooth ``g`` via an inertial forward-backward iteration,
with four step-size policies and runtime certificates that replay the
convergence theory against the recorded trace.
"""

from .objective import Objective, SolverState, StopCriterion
from .rules import (BacktrackingStep, ConstantStep, GeneralStep,
                    LazyBacktrackingStep, ParamCheck, StepRule,
                    bipiano_params, constant_params, delta_gamma,
                    general_param_check)
from .solver import TraceRecord, backtrack_step, ipiano_step, solve
from .diagnostics import (Certificate, grad_check, h_certificates,
                          lyapunov_certificate, proximal_residual,
                          rate_certificate)
from .errors import (ConfigurationError, DegenerateMaskError, IPianoError,
                     NonSmoothnessError, NumericalError, SingularSystemError)

__version__ = "0.1.0"

__all__ = [
    "Objective", "SolverState", "StopCriterion",
    "ConstantStep", "BacktrackingStep", "LazyBacktrackingStep", "GeneralStep",
    "StepRule", "ParamCheck",
    "constant_params", "bipiano_params", "general_param_check", "delta_gamma",
    "TraceRecord", "ipiano_step", "backtrack_step", "solve",
    "Certificate", "proximal_residual", "lyapunov_certificate",
    "rate_certificate", "h_certificates", "grad_check",
    "IPianoError", "ConfigurationError", "NumericalError",
    "NonSmoothnessError", "SingularSystemError", "DegenerateMaskError",
]
