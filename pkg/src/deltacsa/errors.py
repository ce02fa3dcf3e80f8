"""Exception types shared across the package."""


class DeltaCsaError(Exception):
    """Base class for all package errors."""


class ParseError(DeltaCsaError, SyntaxError):
    """Malformed expression text; ``offset`` is the 0-based byte offset."""

    def __init__(self, message, text="", offset=0):
        super().__init__(f"{message} at offset {offset}")
        self.text = text
        self.offset = offset
        self.msg = message


class DivisionByZero(DeltaCsaError, ZeroDivisionError):
    pass


class UnsupportedClass(DeltaCsaError):
    """Input lies outside the class on which the algorithms are complete."""


class NonSplitDenominator(UnsupportedClass):
    """A denominator has an irreducible factor of degree >= 2 over Q."""


class NotInClass(UnsupportedClass):
    pass


class SingularGauge(DeltaCsaError, ValueError):
    pass


class SingularMatrix(DeltaCsaError, ValueError):
    pass


class SizeLimit(DeltaCsaError, ValueError):
    pass
