"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration or parameter value violates its contract."""


class NonPositiveParameter(ConfigError):
    """A strictly-positive parameter is zero or negative."""


class DimensionOutOfRange(ConfigError):
    """Spatial dimension outside the supported set {1, 2, 3}."""


class DivergentRegime(ConfigError):
    """Parameter combination for which the requested quantity diverges."""


class InvalidKernel(ConfigError):
    """Noise kernel is not positive semi-definite at the probed points."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of the function."""


class QuadratureNotConverged(RuntimeError):
    """Integration failed to reach the requested tolerance.

    Carries the best estimate so callers may degrade gracefully.
    """

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class ResonanceSingularity(ValueError):
    """Parametric-drive occupation evaluated at the formula pole."""


class IoError(OSError):
    """Output files could not be written."""
