"""Exception types raised by the library."""


class SparseError(Exception):
    """Base class for library errors."""


class ShapeError(SparseError, ValueError):
    """Operand dimensions do not conform."""


class CapacityError(SparseError, ValueError):
    """Requested capacity is smaller than the number of stored entries."""


class DomainError(SparseError, ValueError):
    """A parameter lies outside its admissible range."""


class InvariantError(SparseError, AssertionError):
    """The compressed-column invariants do not hold."""


class ParseError(SparseError, ValueError):
    """Malformed textual input."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnsupportedFormatError(ParseError):
    """Well-formed input in a format this library does not ingest."""


class StructureError(SparseError, ValueError):
    """A graph or tree argument is malformed (cycle, bad parent...)."""


class GeometryError(SparseError, ValueError):
    """Degenerate finite element geometry."""


class WellPosednessError(SparseError, ValueError):
    """A boundary value problem lacks the conditions needed for a unique solution."""


class SingularMatrixError(SparseError, ArithmeticError):
    """A factorization or substitution met a zero (or negligible) pivot.

    ``rank`` is the number of pivots successfully eliminated, when known.
    """

    def __init__(self, message="matrix is singular", rank=None):
        super().__init__(message)
        self.rank = rank
