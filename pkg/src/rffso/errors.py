"""Exception and warning types shared across the package."""


class RfFsoError(Exception):
    """Base class for all package errors."""


class DomainError(RfFsoError, ValueError):
    """Argument outside the mathematical domain of a function."""


class DegenerateParameterError(RfFsoError, ValueError):
    """Parameters make the requested quantity undefined."""


class NumericalFailure(RfFsoError, ArithmeticError):
    """An iterative or quadrature routine did not reach its tolerance.

    ``error_estimate`` carries the best error estimate achieved, when known.
    """

    def __init__(self, message, error_estimate=None):
        super().__init__(message)
        self.error_estimate = error_estimate


class CapacityError(RfFsoError, RuntimeError):
    """A combinatorial enumeration would exceed the configured cap."""


class ConfigError(RfFsoError, ValueError):
    """Invalid scenario configuration; ``field`` and ``line`` locate it."""

    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line


class PrecisionLossWarning(RuntimeWarning):
    """An alternating sum lost most of its significant digits."""


class TruncationWarning(RuntimeWarning):
    """A truncated series had not converged at the chosen truncation."""


class RegularizationWarning(RuntimeWarning):
    """Coincident Meijer-G parameters were split by a small perturbation."""
