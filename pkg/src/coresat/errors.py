"""Exception types shared across the package."""


class CoresatError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(CoresatError):
    """Invalid pipeline configuration (caught before any computation)."""


class DataError(CoresatError):
    """Malformed or inconsistent input data."""


class DegenerateDataError(CoresatError):
    """Data too degenerate to estimate from (constant bucket, all-zero matrix, ...)."""


class SingularSystemError(CoresatError):
    """Linear system not numerically solvable; advise a positive regularization."""


class KinkNotFoundError(CoresatError):
    """No kink detectable in the requested window; pass an explicit p instead."""


class PipelineError(CoresatError):
    """Stage-level failure; message carries the stage name and context."""
