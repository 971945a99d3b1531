"""Exception hierarchy shared across the package."""


class IPianoError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(IPianoError):
    """Invalid or infeasible parameter configuration."""


class NumericalError(IPianoError):
    """Non-finite values encountered; usually divergent step sizes."""


class NonSmoothnessError(NumericalError):
    """Backtracking exceeded the Lipschitz growth cap.

    Indicates that the smooth part does not behave like a function with
    Lipschitz gradient on the visited region (or a bug upstream).
    """


class SingularSystemError(NumericalError):
    """Sparse linear solve failed or did not meet its residual contract."""


class DegenerateMaskError(NumericalError):
    """Inpainting mask is (numerically) zero, so the system is singular."""
