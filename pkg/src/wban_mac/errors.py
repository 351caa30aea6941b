"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised when a scenario, scheme or experiment file is invalid."""


class PhaseTooShortError(ConfigError):
    """Raised when an access phase cannot hold a single frame exchange."""


class ConvergenceError(RuntimeError):
    """Raised when the fixed-point solver does not reach the tolerance.

    Carries the last residual and the iteration count so callers can
    report diagnostics instead of a bare failure.
    """

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ModelStateError(RuntimeError):
    """Raised when solver state violates a structural assumption."""
