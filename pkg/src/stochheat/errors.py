"""Exception hierarchy shared by every module of the package."""


class StochHeatError(Exception):
    """Base class for all errors raised by :mod:`stochheat`."""


class DomainError(StochHeatError, ValueError):
    """An argument lies outside the domain of the operation."""


class NonSummableError(DomainError):
    """A requested mode series diverges (e.g. unbounded modes without smoothing)."""


class TruncationError(StochHeatError, ArithmeticError):
    """Adaptive mode truncation could not certify the tail below tolerance."""


class NumericalInconsistencyError(StochHeatError, ArithmeticError):
    """Derived quantities violate an identity they must satisfy (beyond rounding)."""
