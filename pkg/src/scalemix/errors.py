"""Exception types shared across the package."""


class ScalemixError(Exception):
    """Base class for all package errors."""


class ParameterError(ScalemixError, ValueError):
    """A parameter is outside its valid range."""


class DomainError(ScalemixError, ValueError):
    """An argument is outside the support of the requested function."""


class DegeneracyError(ScalemixError, ValueError):
    """Inputs collapse to a degenerate object (e.g. all-zero mixture weights)."""


class CoverageError(ScalemixError, ValueError):
    """A site is not covered by any compact kernel."""


class FactorizationError(ScalemixError, RuntimeError):
    """A covariance matrix could not be factorized, even after jitter."""


class NumericError(ScalemixError, RuntimeError):
    """A numerical routine (quadrature, bracketing, root finding) failed."""


class ValidationError(ScalemixError, ValueError):
    """A run configuration is inconsistent or malformed."""


class IngestionError(ScalemixError, ValueError):
    """A data file violates the station-table schema."""
