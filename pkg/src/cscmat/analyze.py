"""Structural classification of matrices and solver tunables.

``matrix_type`` inspects a matrix once, in time linear in its number of
entries, and returns the class the direct solver dispatches on.  Nothing
is cached on the matrix itself: ``force_type`` wraps a matrix together with
a (possibly user-asserted) type instead.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import CscMatrix
from .errors import DomainError

TAGS = ("Diagonal", "PermutedDiagonal", "Tridiagonal", "Banded", "Lower", "Upper",
        "PermutedLower", "PermutedUpper", "HermitianPosDiag", "Full", "Rectangular",
        "Singular")


@dataclass(frozen=True)
class MatrixType:
    """Detected (or forced) structural class.

    ``perm`` is the row order that makes a ``PermutedLower`` matrix lower
    triangular (``A[perm, :]``), the column order that makes a
    ``PermutedUpper`` matrix upper triangular (``A[:, perm]``), or, for a
    ``PermutedDiagonal`` matrix, the row holding the entry of each column.
    ``hermitian`` records that the matrix equals its conjugate transpose and
    has a real positive diagonal, which gates the Cholesky attempts.
    """

    tag: str
    kl: int = 0
    ku: int = 0
    perm: Optional[tuple] = None
    hermitian: bool = False
    forced: bool = False

    def __post_init__(self):
        if self.tag not in TAGS:
            raise DomainError(f"unknown matrix type {self.tag!r}")
        if self.kl < 0 or self.ku < 0:
            raise DomainError("bandwidths must be non-negative")

    def __str__(self):
        if self.tag == "Banded":
            return f"Banded({self.kl},{self.ku})"
        return self.tag


@dataclass(frozen=True)
class SolverParams:
    """Solver tunables.

    bandden
        The banded solvers are used only when the band density exceeds
        this value; ``1.0`` switches them off.
    sing_tol
        A factorization whose reciprocal condition estimate falls below
        this value is treated as singular.  ``None`` means ``n * eps``.
    pivot_tol
        Threshold for partial pivoting in sparse LU; ``1.0`` is strict.
    """

    bandden: float = 0.5
    sing_tol: Optional[float] = None
    pivot_tol: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.bandden <= 1.0:
            raise DomainError(f"bandden {self.bandden} outside [0, 1]")
        if not 0.0 < self.pivot_tol <= 1.0:
            raise DomainError(f"pivot_tol {self.pivot_tol} outside (0, 1]")
        if self.sing_tol is not None and self.sing_tol < 0:
            raise DomainError("sing_tol must be non-negative")

    def singular_threshold(self, n: int) -> float:
        if self.sing_tol is not None:
            return self.sing_tol
        return max(n, 1) * np.finfo(float).eps


_PARAM_KEYS = tuple(f.name for f in dataclasses.fields(SolverParams))


def spparms_get(params: SolverParams, key: str):
    if key not in _PARAM_KEYS:
        raise KeyError(key)
    return getattr(params, key)


def spparms_set(params: SolverParams, key: str, value) -> SolverParams:
    """Copy of ``params`` with one key changed."""
    if key not in _PARAM_KEYS:
        raise KeyError(key)
    return dataclasses.replace(params, **{key: value})


@dataclass(frozen=True)
class TypedMatrix:
    """A matrix paired with the type the solver should trust."""

    matrix: CscMatrix
    mtype: MatrixType

    @property
    def shape(self):
        return self.matrix.shape


def _nonzero_pattern(a: CscMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    a = a.compressed(remove_zeros=True)
    return a.rows(), a.column_of_entries(), a.values()


def bandwidths(a: CscMatrix) -> tuple[int, int]:
    """Lower and upper bandwidth of the nonzero entries."""
    rows, cols, _ = _nonzero_pattern(a)
    if not len(rows):
        return 0, 0
    d = rows - cols
    return max(0, int(d.max())), max(0, int(-d.min()))


def band_slots(nrows: int, ncols: int, kl: int, ku: int) -> int:
    j = np.arange(ncols)
    lo = np.maximum(0, j - ku)
    hi = np.minimum(nrows - 1, j + kl)
    return int(np.maximum(0, hi - lo + 1).sum())


def band_density(a: CscMatrix, kl: int, ku: int) -> float:
    """Nonzeros inside the band divided by the number of band positions (0 when empty)."""
    rows, cols, _ = _nonzero_pattern(a)
    slots = band_slots(a.nrows, a.ncols, kl, ku)
    if slots == 0:
        return 0.0
    d = rows - cols
    inside = np.count_nonzero((d <= kl) & (d >= -ku))
    return inside / slots


def triangular_row_order(a: CscMatrix) -> Optional[np.ndarray]:
    """Row order ``p`` with ``a[p, :]`` lower triangular with a full diagonal, or ``None``.

    Columns are peeled from the last one down: column ``j`` must have
    exactly one nonzero in a row not yet placed, and that row goes to
    position ``j``.
    """
    n = a.ncols
    if a.nrows != n:
        return None
    a = a.compressed(remove_zeros=True)
    placed = np.zeros(n, dtype=bool)
    perm = np.empty(n, dtype=np.int64)
    cidx, ridx = a.cidx, a.ridx
    for j in range(n - 1, -1, -1):
        rows = ridx[cidx[j]:cidx[j + 1]]
        free = rows[~placed[rows]]
        if len(free) != 1:
            return None
        perm[j] = free[0]
        placed[free[0]] = True
    return perm


def _is_hermitian_pos_diag(a: CscMatrix) -> bool:
    from .ops import transpose

    if a.nrows != a.ncols or a.is_pattern:
        return False
    a = a.compressed(remove_zeros=True)
    at = transpose(a, conjugate=True)
    if not (np.array_equal(a.cidx, at.cidx) and np.array_equal(a.rows(), at.rows())):
        return False
    if not np.array_equal(a.values(), at.values()):
        return False
    rows, cols, vals = a.rows(), a.column_of_entries(), a.values()
    on = rows == cols
    if np.count_nonzero(on) != a.nrows:
        return False
    d = vals[on]
    return bool(np.all(d.real > 0) and np.all(d.imag == 0))


def matrix_type(a, params: SolverParams | None = None) -> MatrixType:
    """Classify ``a`` for solver dispatch.

    The checks run in this order: rectangular, diagonal, permuted diagonal,
    banded (tridiagonal or general, only when the band density exceeds
    ``params.bandden``), lower/upper triangular, permuted triangular,
    hermitian with a positive real diagonal, and finally full.
    """
    if isinstance(a, TypedMatrix):
        return a.mtype
    params = params or SolverParams()
    m, n = a.shape
    if m != n:
        kl, ku = bandwidths(a)
        return MatrixType("Rectangular", kl, ku)

    rows, cols, _ = _nonzero_pattern(a)
    d = rows - cols
    kl = max(0, int(d.max())) if len(d) else 0
    ku = max(0, int(-d.min())) if len(d) else 0
    if kl == 0 and ku == 0:
        return MatrixType("Diagonal")

    counts = np.bincount(cols, minlength=n)
    if np.all(counts == 1) and len(np.unique(rows)) == n:
        return MatrixType("PermutedDiagonal", kl, ku, perm=tuple(rows.tolist()))

    herm = _is_hermitian_pos_diag(a)
    if band_density(a, kl, ku) > params.bandden:
        tag = "Tridiagonal" if kl == 1 and ku == 1 else "Banded"
        return MatrixType(tag, kl, ku, hermitian=herm)
    if ku == 0:
        return MatrixType("Lower", kl, ku)
    if kl == 0:
        return MatrixType("Upper", kl, ku)

    p = triangular_row_order(a)
    if p is not None:
        return MatrixType("PermutedLower", kl, ku, perm=tuple(p.tolist()))
    from .ops import transpose

    q = triangular_row_order(transpose(a))
    if q is not None:
        return MatrixType("PermutedUpper", kl, ku, perm=tuple(q.tolist()))
    if herm:
        return MatrixType("HermitianPosDiag", kl, ku, hermitian=True)
    return MatrixType("Full", kl, ku)


def force_type(a: CscMatrix, t) -> TypedMatrix:
    """Attach a type the solver will trust without checking.

    ``t`` is a ``MatrixType`` or a tag name.  Missing details (bandwidths,
    permutations) are filled in from the matrix where they can be; an
    incorrect assertion produces incorrect solutions.
    """
    if isinstance(t, str):
        t = MatrixType(t)
    kl, ku = (t.kl, t.ku) if (t.kl or t.ku) else bandwidths(a)
    perm = t.perm
    if perm is None and t.tag in ("PermutedLower", "PermutedUpper", "PermutedDiagonal"):
        from .ops import transpose

        src = transpose(a) if t.tag == "PermutedUpper" else a
        if t.tag == "PermutedDiagonal":
            c = a.compressed(remove_zeros=True)
            perm = c.rows() if c.nnz == a.ncols else None
        else:
            perm = triangular_row_order(src)
        if perm is None:
            raise DomainError(f"no permutation makes the matrix {t.tag}")
        perm = tuple(int(i) for i in perm)
    herm = t.hermitian or t.tag == "HermitianPosDiag"
    return TypedMatrix(a, dataclasses.replace(t, kl=kl, ku=ku, perm=perm, hermitian=herm,
                                              forced=True))
