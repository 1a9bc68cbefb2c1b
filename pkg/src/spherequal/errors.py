"""Exception hierarchy shared by all modules."""


class SphereQualityError(Exception):
    """Base class for errors raised by spherequal."""


class DomainError(SphereQualityError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnsupportedDimensionError(DomainError):
    """The operation is not defined for the requested sphere dimension."""


class DegenerateInputError(DomainError):
    """The input is a degenerate case that the chosen route cannot handle."""


class NumericalError(SphereQualityError, ArithmeticError):
    """A computed quantity violates a bound it must satisfy mathematically."""


class PositiveDefinitenessError(NumericalError):
    """A squared RKHS norm came out clearly negative."""


class ParseError(SphereQualityError, ValueError):
    """A point file could not be read.

    ``line`` is the 1-based line number of the offending row (or None).
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
