"""Exception types shared across the package."""


class AltxyError(Exception):
    """Base class for all package-specific errors."""


class NonHermitianError(AltxyError):
    """Input matrix violates the Hermiticity tolerance."""


class ConvergenceError(AltxyError):
    """An iterative routine hit its cap before reaching tolerance.

    Carries the best estimate and an error bound so callers can decide
    whether to proceed anyway.
    """

    def __init__(self, message, estimate=None, bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.bound = bound


class PositivityError(AltxyError):
    """A density matrix has a negative eigenvalue beyond tolerance."""


class ConfigError(AltxyError):
    """Sweep configuration could not be parsed or validated."""
