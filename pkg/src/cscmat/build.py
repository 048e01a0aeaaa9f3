"""Construction of compressed-column matrices.

Every constructor here returns a ``CscMatrix``, never a dense array, however
full the result turns out to be.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import INDEX_DTYPE, CscMatrix, ValueKind
from .errors import DomainError, ParseError, ShapeError


@dataclass
class TripletBatch:
    """Unassembled ``(row, col, value)`` entries; ``vals is None`` means a pattern."""

    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray | None = None
    nrows: int | None = None
    ncols: int | None = None

    def __post_init__(self):
        self.rows = _index_array(self.rows, "rows")
        self.cols = _index_array(self.cols, "cols")
        if len(self.rows) != len(self.cols):
            raise ShapeError(f"{len(self.rows)} row indices but {len(self.cols)} column indices")
        if self.vals is not None:
            vals = np.asarray(self.vals)
            if vals.ndim == 0:
                vals = np.full(len(self.rows), vals[()])
            vals = vals.ravel()
            if len(vals) != len(self.rows):
                raise ShapeError(f"{len(self.rows)} coordinates but {len(vals)} values")
            self.vals = vals

    def __len__(self):
        return len(self.rows)


def _index_array(x, name: str) -> np.ndarray:
    arr = np.asarray(x).ravel()
    if arr.size == 0:
        return np.zeros(0, dtype=INDEX_DTYPE)
    if arr.dtype.kind in "iu":
        return arr.astype(INDEX_DTYPE)
    if arr.dtype.kind == "f" and np.all(np.isfinite(arr)) and np.all(arr == np.round(arr)):
        return arr.astype(INDEX_DTYPE)
    raise ParseError(f"{name} must hold integer coordinates")


def from_triplets(rows, cols=None, vals=None, nrows=None, ncols=None, *,
                  drop_zeros: bool = False) -> CscMatrix:
    """Assemble a matrix from coordinate triplets.

    Input order is irrelevant; already column-major sorted input skips the
    sort.  Duplicate coordinates are summed.  Explicit zero values are kept
    (they may define structure) unless ``drop_zeros`` is set.  Omitted
    dimensions are inferred as the largest index plus one.

    ``rows`` may also be a ``TripletBatch``.
    """
    if isinstance(rows, TripletBatch):
        t = rows
    else:
        t = TripletBatch(rows, cols, vals, nrows, ncols)
    r, c, v = t.rows, t.cols, t.vals
    m = t.nrows if t.nrows is not None else (int(r.max()) + 1 if len(r) else 0)
    n = t.ncols if t.ncols is not None else (int(c.max()) + 1 if len(c) else 0)
    if len(r) and (r.min() < 0 or r.max() >= m or c.min() < 0 or c.max() >= n):
        raise IndexError(f"triplet coordinate outside {m}x{n}")

    if v is None:
        kind = ValueKind.PATTERN
    else:
        kind = ValueKind.of(v)
        if kind is ValueKind.PATTERN:
            # a boolean value vector: keep the true entries as a pattern
            keep = v.astype(bool)
            r, c, v = r[keep], c[keep], None

    if len(r) > 1:
        dc = np.diff(c)
        in_order = np.all((dc > 0) | ((dc == 0) & (np.diff(r) >= 0)))
        if not in_order:
            order = np.lexsort((r, c))
            r, c = r[order], c[order]
            if v is not None:
                v = v[order]
        dup = (np.diff(c) == 0) & (np.diff(r) == 0)
        if dup.any():
            first = np.flatnonzero(np.concatenate(([True], ~dup)))
            if v is not None:
                v = np.add.reduceat(v.astype(kind.dtype), first)
            r, c = r[first], c[first]

    if v is not None:
        v = v.astype(kind.dtype)
        if drop_zeros:
            keep = v != 0
            r, c, v = r[keep], c[keep], v[keep]

    cidx = np.zeros(n + 1, dtype=INDEX_DTYPE)
    np.cumsum(np.bincount(c, minlength=n), out=cidx[1:])
    return CscMatrix(m, n, cidx, r, v, kind=kind, check=False)


def from_dense(a) -> CscMatrix:
    """Sparse copy of a dense array (zeros are not stored)."""
    a = np.asarray(a)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(-1, 1)
    elif a.ndim != 2:
        raise ShapeError("only two-dimensional arrays can be made sparse")
    if a.dtype.kind not in "biufc":
        raise TypeError(f"cannot store dtype {a.dtype}")
    if a.dtype.kind in "iu":
        a = a.astype(np.float64)
    # column-major scan gives sorted output directly
    cols, rows = np.nonzero(a.T)
    vals = None if a.dtype == np.bool_ else a[rows, cols]
    return from_triplets(rows, cols, vals, a.shape[0], a.shape[1])


def sparse(x, ncols=None) -> CscMatrix:
    """Convert ``x`` to sparse; with two integers make an empty ``x``-by-``ncols`` matrix."""
    if isinstance(x, CscMatrix):
        return x.copy()
    if ncols is not None:
        return CscMatrix(x, ncols)
    return from_dense(x)


def speye(r: int, c: int | None = None) -> CscMatrix:
    """Sparse identity, ``r``-by-``r`` or ``r``-by-``c``."""
    c = r if c is None else c
    if r < 0 or c < 0:
        raise DomainError("negative dimensions")
    k = min(r, c)
    idx = np.arange(k, dtype=INDEX_DTYPE)
    cidx = np.concatenate((idx, np.full(c - k + 1, k, dtype=INDEX_DTYPE)))
    return CscMatrix(r, c, cidx, idx, np.ones(k), check=False)


def sprand(r: int, c: int, density: float, dist: str = "uniform", seed=None) -> CscMatrix:
    """Random ``r``-by-``c`` matrix with about ``density * r * c`` entries.

    Each column draws its entry count from Binomial(r, density) and then that
    many distinct rows, so there is no rejection loop even at density 1.
    ``dist`` is ``"uniform"`` (values in (0, 1]) or ``"normal"``.  ``seed``
    may be an int or a ``numpy.random.Generator``.
    """
    if not 0.0 <= density <= 1.0:
        raise DomainError(f"density {density} outside [0, 1]")
    if dist not in ("uniform", "normal"):
        raise DomainError(f"unknown distribution {dist!r}")
    rng = np.random.default_rng(seed)
    counts = rng.binomial(r, density, size=c) if r else np.zeros(c, dtype=int)
    rows = []
    for k in counts:
        if k == r:
            rows.append(np.arange(r))
        elif k:
            rows.append(np.sort(rng.choice(r, size=k, replace=False)))
    nnz = int(counts.sum())
    ridx = np.concatenate(rows).astype(INDEX_DTYPE) if rows else np.zeros(0, INDEX_DTYPE)
    if dist == "uniform":
        vals = 1.0 - rng.random(nnz)
    else:
        vals = rng.standard_normal(nnz)
        vals[vals == 0] = 1.0
    cidx = np.concatenate(([0], np.cumsum(counts))).astype(INDEX_DTYPE)
    return CscMatrix(r, c, cidx, ridx, vals, check=False)


def sprandn(r: int, c: int, density: float, seed=None) -> CscMatrix:
    return sprand(r, c, density, dist="normal", seed=seed)


def spdiags(B, d, m: int, n: int) -> CscMatrix:
    """Place columns of ``B`` on the diagonals with offsets ``d``.

    Offset 0 is the main diagonal, positive offsets lie above it.  Diagonal
    ``k`` takes the leading entries of ``B[:, k]``, as many as fit.  Zero
    values are not stored; repeated offsets add.
    """
    B = np.asarray(B)
    d = np.atleast_1d(np.asarray(d, dtype=INDEX_DTYPE))
    if B.ndim == 1:
        B = B.reshape(-1, 1) if len(d) == 1 else B.reshape(1, -1)
    if B.ndim != 2 or B.shape[1] != len(d):
        raise ShapeError(f"need one column of values per offset: B is {B.shape}, {len(d)} offsets")
    rows, cols, vals = [], [], []
    for k, off in enumerate(d.tolist()):
        i0, j0 = max(0, -off), max(0, off)
        length = max(0, min(m - i0, n - j0, B.shape[0]))
        t = np.arange(length, dtype=INDEX_DTYPE)
        rows.append(i0 + t)
        cols.append(j0 + t)
        vals.append(B[:length, k])
    if not rows:
        return CscMatrix(m, n)
    return from_triplets(np.concatenate(rows), np.concatenate(cols),
                         np.concatenate(vals).astype(np.result_type(B.dtype, np.float64)),
                         m, n, drop_zeros=True)


def spdiag(v, k: int = 0) -> CscMatrix:
    """Square matrix of order ``len(v) + |k|`` with ``v`` on diagonal ``k``."""
    if isinstance(v, CscMatrix):
        v = v.todense()
    v = np.asarray(v).ravel()
    n = len(v) + abs(k)
    return spdiags(v.reshape(-1, 1), [k], n, n)


def spconvert(table) -> CscMatrix:
    """Build a matrix from a k-by-3 ``(row, col, re)`` or k-by-4 ``(row, col, re, im)`` table.

    Coordinates are 1-based.  The size is set by the largest coordinates,
    including those of zero-valued rows, which are otherwise dropped.
    """
    t = np.asarray(table, dtype=float)
    if t.size == 0:
        return CscMatrix(0, 0)
    if t.ndim != 2 or t.shape[1] not in (3, 4):
        raise ParseError(f"expected a k-by-3 or k-by-4 table, got shape {t.shape}")
    rows = _index_array(t[:, 0], "row") - 1
    cols = _index_array(t[:, 1], "column") - 1
    if rows.min() < 0 or cols.min() < 0:
        raise ParseError("coordinates are 1-based and must be positive")
    vals = t[:, 2] + 1j * t[:, 3] if t.shape[1] == 4 else t[:, 2]
    return from_triplets(rows, cols, vals, int(rows.max()) + 1, int(cols.max()) + 1,
                         drop_zeros=True)


def spalloc(r: int, c: int, nz: int = 0) -> CscMatrix:
    """Empty matrix with room for ``nz`` entries (the hint is honored)."""
    return CscMatrix(r, c, capacity=nz)


def spones(a: CscMatrix) -> CscMatrix:
    src = a.compressed(remove_zeros=True)
    return CscMatrix(a.nrows, a.ncols, src.cidx.copy(), src.rows().copy(),
                     np.ones(src.nnz), check=False)


def find_triplets(a: CscMatrix) -> TripletBatch:
    """Stored entries in column-major order."""
    vals = None if a.is_pattern else a.values().copy()
    return TripletBatch(a.rows().copy(), a.column_of_entries(), vals, a.nrows, a.ncols)
