"""Exception hierarchy shared by all modules."""


class OpMeansError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(OpMeansError, ValueError):
    """Non-square input or mismatched dimensions."""


class NotHermitianError(OpMeansError, ValueError):
    """Input deviates from Hermitian symmetry beyond tolerance."""


class DomainError(OpMeansError, ValueError):
    """An argument lies outside the domain of a function.

    ``value`` carries the offending number (an eigenvalue, a weight, ``t``)
    when there is one.
    """

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class IllConditionedError(DomainError):
    """Matrix is too close to singular for an inverse or negative power."""


class NumericalError(OpMeansError, ArithmeticError):
    """An iterative routine failed to converge."""


class UnknownStatementError(OpMeansError, LookupError):
    """No catalog entry with the requested identifier."""
