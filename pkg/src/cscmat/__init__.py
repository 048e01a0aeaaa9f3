"""Compressed sparse column matrices: storage, arithmetic, orderings and direct solvers."""

from .analyze import MatrixType, SolverParams, TypedMatrix, force_type, matrix_type
from .build import (from_dense, from_triplets, spalloc, sparse, spconvert, spdiag, spdiags,
                    speye, spones, sprand, sprandn)
from .core import CscMatrix, ValueKind, issparse
from .errors import (DomainError, GeometryError, InvariantError, ParseError, ShapeError,
                     SingularMatrixError, SparseError, StructureError, UnsupportedFormatError,
                     WellPosednessError)
from .mmio import mm_read, mm_write
from .ops import (concat, ctranspose, ewise_binary, map_unary, matmul, reduce_columns,
                  scalar_binary, scan_columns, spfun, transpose)
from .order import amd_order, colperm, dmperm, etree, symbfact
from .solve import SolveReport, backslash

__version__ = "0.1.0"

__all__ = [
    "CscMatrix", "DomainError", "GeometryError", "InvariantError", "MatrixType", "ParseError",
    "ShapeError", "SingularMatrixError", "SolveReport", "SolverParams", "SparseError",
    "StructureError", "TypedMatrix", "UnsupportedFormatError", "ValueKind",
    "WellPosednessError", "amd_order", "backslash", "colperm", "concat", "ctranspose",
    "dmperm", "etree", "ewise_binary", "force_type", "from_dense", "from_triplets", "issparse",
    "map_unary", "matmul", "matrix_type", "mm_read", "mm_write", "reduce_columns",
    "scalar_binary", "scan_columns", "spalloc", "sparse", "spconvert", "spdiag", "spdiags",
    "speye", "spfun", "spones", "sprand", "sprandn", "symbfact", "transpose",
]
