"""Exception types raised by archheight."""


class ArchHeightError(Exception):
    """Base class for all errors raised by this package."""


class SingularCurve(ArchHeightError):
    pass


class DegeneratePoint(ArchHeightError):
    pass


class RootFindingFailure(ArchHeightError):
    pass


class NumericBreakdown(ArchHeightError):
    pass


class NonMonotoneSequence(ArchHeightError):
    pass


class SamplingExhausted(ArchHeightError):
    pass


class NotOnCurve(ArchHeightError):
    pass


class ParseError(ArchHeightError, ValueError):
    """Malformed curve input; carries the 1-based line and column."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ArityError(ParseError):
    pass
