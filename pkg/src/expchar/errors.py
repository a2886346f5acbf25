"""Exception hierarchy shared by every module."""


class ExpcharError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(ExpcharError, ValueError):
    """Invalid distribution parameters or call arguments."""


class DomainError(ExpcharError, ValueError):
    """Argument outside the region where a quantity is defined or finite."""


class NumericError(ExpcharError, ArithmeticError):
    """A numerical procedure failed to reach its requested tolerance.

    Attributes
    ----------
    achieved : float
        Error estimate actually reached when the procedure gave up.
    """

    def __init__(self, message, achieved=float("nan")):
        super().__init__(message)
        self.achieved = achieved


class ShapeError(ExpcharError, ValueError):
    """Input has the wrong length or layout."""


class DataError(ExpcharError, ValueError):
    """Input values are malformed, nonpositive or non-finite."""


class DegenerateError(ExpcharError, ValueError):
    """The statistic is undefined because the pooled sample is constant."""
