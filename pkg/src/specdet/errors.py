"""Exception hierarchy shared by all specdet modules."""


class SpecdetError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(SpecdetError):
    """Operands have incompatible dimensions."""


class ParameterError(SpecdetError):
    """A numeric parameter lies outside its admissible range."""


class EvaluationError(SpecdetError):
    """A kernel, symbol or trace source produced an invalid value."""


class AliasingError(SpecdetError):
    """A requested Fourier mode exceeds the anti-aliasing bound of the grid."""


class FeasibilityError(SpecdetError):
    """A brute-force computation would exceed its size guard.

    ``count`` carries the offending size so refusals are explicit about
    how far past the guard the request was.
    """

    def __init__(self, message: str, count: int | None = None):
        super().__init__(message)
        self.count = count


class SpecFileError(SpecdetError):
    """Base class for operator spec-file problems."""


class SpecParseError(SpecFileError):
    """The spec file is not syntactically valid JSON."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class SpecValidationError(SpecFileError):
    """The spec file is well-formed JSON but semantically invalid.

    ``field`` names the offending field so callers can surface it.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field
