"""Exception hierarchy shared across the package."""


class NlsrError(Exception):
    """Base class for all package errors."""


class ConfigurationError(NlsrError):
    """Invalid grid, parameter, or config-file input."""


class NumericsError(NlsrError):
    """Non-finite intermediate values produced by a kernel."""


class BlowUpError(NumericsError):
    """Solution norm exceeded the blow-up guard during integration."""

    def __init__(self, message, t=None, norm=None):
        super().__init__(message)
        self.t = t
        self.norm = norm


class ImplicitSolveError(NumericsError):
    """Fixed-point iteration of an implicit kernel failed to converge."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class RelaxationFailureError(NumericsError):
    """Relaxation coefficient left (0, 2); the step was rejected."""

    def __init__(self, message, gamma=None, t=None):
        super().__init__(message)
        self.gamma = gamma
        self.t = t


class CacheError(NlsrError):
    """Snapshot cache file missing, truncated, or corrupt."""
