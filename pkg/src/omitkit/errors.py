"""Exception hierarchy shared by the omitkit modules."""


class OmitError(Exception):
    """Base class for all omitkit errors."""


class DomainError(OmitError, ValueError):
    """An input lies outside the domain of the formula."""


class RangeError(OmitError, ArithmeticError):
    """A computed quantity overflowed or underflowed."""


class ConvergenceError(OmitError, RuntimeError):
    """An iterative solver exhausted its budget."""


class SingularityError(OmitError, ZeroDivisionError):
    """A denominator of the sideband solution vanished."""


class SearchError(OmitError, RuntimeError):
    """A bracketing search found no crossing in its window."""


class BracketError(OmitError, RuntimeError):
    """An optimizer converged onto the edge of its bracket."""


class ConfigError(OmitError, ValueError):
    """A run configuration is invalid."""


class DivergenceError(OmitError, FloatingPointError):
    """An integrated trajectory blew up."""
