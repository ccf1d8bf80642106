"""Exception hierarchy shared across the toolkit."""


class UotErrantError(Exception):
    """Base class for all toolkit errors."""


class OverlapError(UotErrantError):
    """Two edits claim overlapping source spans."""


class OutOfRangeError(UotErrantError):
    """An edit span points outside the source sentence."""


class NotFoundError(UotErrantError):
    """The requested edit is not a member of the edit set."""


class ParseError(UotErrantError):
    """Malformed input file; carries a line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FormatError(ParseError):
    """Malformed embedding interchange file."""


class DimMismatchError(UotErrantError):
    """Vector dimensions disagree."""


class MissingEmbeddingError(UotErrantError):
    """Store backend has no vector for the requested sentence."""

    def __init__(self, text: str):
        super().__init__(f"no embedding stored for sentence: {text!r}")
        self.text = text


class ServiceError(UotErrantError):
    """Remote embedding service failed or returned a bad payload."""


class MassMismatchError(UotErrantError):
    """Balanced transport requires equal total masses."""


class NumericalError(UotErrantError):
    """Solver produced non-finite potentials."""


class ShapeMismatchError(UotErrantError):
    """Matrix/vector shapes disagree."""


class TooLargeError(UotErrantError):
    """Brute-force oracle only handles tiny instances."""


class CoverageError(UotErrantError):
    """Systems or comparisons do not cover the same sentences/pairs."""


class DegenerateInputError(UotErrantError):
    """Correlation input has zero variance or too few points."""
