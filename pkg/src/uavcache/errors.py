"""Exception types shared across the package."""


class UavCacheError(Exception):
    """Base class for all package errors."""


class ConfigurationError(UavCacheError):
    """Invalid parameter set, preset, or run configuration."""


class ConstraintViolationError(UavCacheError):
    """A physical or feasibility constraint is violated (e.g. descent speed)."""


class QuadratureError(UavCacheError):
    """A numerical integration did not meet its tolerance.

    Carries enough context (offending point, achieved error) to diagnose or
    retry with a refined quadrature specification.
    """

    def __init__(self, message, point=None, error_estimate=None):
        super().__init__(message)
        self.point = point
        self.error_estimate = error_estimate
