"""Exception types shared across the package."""


class WarpMetricError(Exception):
    """Base class for all package errors."""


class DomainError(WarpMetricError, ValueError):
    """A coordinate or point lies outside the space it was given for."""


class UsageError(WarpMetricError, ValueError):
    """Invalid arguments, unknown names or malformed input."""


class ResourceError(WarpMetricError, RuntimeError):
    """A computation would exceed a configured resource cap."""
