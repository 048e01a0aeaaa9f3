"""Compressed sparse column storage.

A matrix is held as three arrays: ``cidx`` (column offsets, length
``ncols + 1``), ``ridx`` (row index of every stored entry) and ``data``
(the stored values).  Entries of column ``j`` live in the half-open slot
range ``cidx[j]:cidx[j + 1]`` with strictly increasing row indices.  The
arrays may be longer than the number of stored entries; the extra slots are
spare capacity (``nzmax``).

Boolean pattern matrices keep a zero-length ``data`` array: every stored
entry means ``True``.
"""

from __future__ import annotations

import enum
from bisect import bisect_left
from typing import Iterator, NamedTuple

import numpy as np

from .errors import CapacityError, DomainError, InvariantError

INDEX_DTYPE = np.int64
INDEX_WIDTH = 8
INDEX_MAX = int(np.iinfo(np.int64).max)

_MIN_GROWTH = 16


class ValueKind(enum.Enum):
    REAL = "real64"
    COMPLEX = "complex128"
    PATTERN = "pattern"

    @property
    def dtype(self):
        return {ValueKind.REAL: np.float64,
                ValueKind.COMPLEX: np.complex128,
                ValueKind.PATTERN: np.bool_}[self]

    @property
    def value_width(self) -> int:
        """Bytes per element of a dense array of this kind."""
        return np.dtype(self.dtype).itemsize

    @property
    def stored_width(self) -> int:
        """Bytes per stored sparse entry (patterns store no values)."""
        return 0 if self is ValueKind.PATTERN else self.value_width

    @classmethod
    def of(cls, values) -> "ValueKind":
        arr = np.asarray(values)
        if arr.dtype == np.bool_:
            return cls.PATTERN
        if np.iscomplexobj(arr):
            return cls.COMPLEX
        return cls.REAL


class Counts(NamedTuple):
    nnz: int
    nzmax: int
    numel: int
    overflow: bool


def checked_numel(nrows: int, ncols: int) -> tuple[int, bool]:
    """Return ``(nrows * ncols, overflow)`` saturated to the index range."""
    n = int(nrows) * int(ncols)
    if n > INDEX_MAX:
        return INDEX_MAX, True
    return n, False


def _as_index(i) -> int:
    if isinstance(i, (bool, np.bool_)):
        raise TypeError("boolean index")
    try:
        return int(i.__index__())
    except AttributeError:
        raise TypeError(f"index must be an integer, got {type(i).__name__}") from None


class CscMatrix:
    """A two-dimensional sparse matrix in compressed column form.

    Read access (``get`` / ``A[i, j]``) never creates entries; writes go
    through ``insert`` (or ``A[i, j] = v``), which keeps columns sorted and
    grows capacity geometrically when it runs out.
    """

    __slots__ = ("nrows", "ncols", "cidx", "ridx", "data", "kind")

    def __init__(self, nrows, ncols, cidx=None, ridx=None, data=None, *,
                 kind: ValueKind | None = None, capacity: int | None = None,
                 check: bool = True):
        nrows, ncols = _as_index(nrows), _as_index(ncols)
        if nrows < 0 or ncols < 0:
            raise DomainError(f"negative dimensions ({nrows}, {ncols})")
        self.nrows = nrows
        self.ncols = ncols

        if kind is None:
            if data is None:
                kind = ValueKind.PATTERN if ridx is not None else ValueKind.REAL
            else:
                kind = ValueKind.of(data)
        self.kind = kind

        if cidx is None:
            cidx = np.zeros(ncols + 1, dtype=INDEX_DTYPE)
            ridx = np.zeros(0, dtype=INDEX_DTYPE)
            data = None
        self.cidx = np.array(cidx, dtype=INDEX_DTYPE)
        self.ridx = np.array(ridx if ridx is not None else [], dtype=INDEX_DTYPE)
        if kind is ValueKind.PATTERN:
            self.data = np.zeros(0, dtype=np.bool_)
        elif data is None:
            self.data = np.zeros(len(self.ridx), dtype=kind.dtype)
        else:
            self.data = np.array(data, dtype=kind.dtype)

        if capacity is not None:
            if capacity < self.nnz:
                raise CapacityError(f"capacity {capacity} < nnz {self.nnz}")
            self._resize(capacity)
        if check:
            self.check()

    # -- sizes -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def nnz(self) -> int:
        return int(self.cidx[-1])

    @property
    def nzmax(self) -> int:
        return len(self.ridx)

    capacity = nzmax

    @property
    def is_pattern(self) -> bool:
        return self.kind is ValueKind.PATTERN

    def counts(self) -> Counts:
        numel, overflow = checked_numel(self.nrows, self.ncols)
        return Counts(self.nnz, self.nzmax, numel, overflow)

    def column_counts(self) -> np.ndarray:
        return np.diff(self.cidx)

    # -- invariants ----------------------------------------------------------

    def check(self) -> "CscMatrix":
        """Raise ``InvariantError`` unless every storage invariant holds."""
        c, r = self.cidx, self.ridx
        if c.dtype != INDEX_DTYPE or r.dtype != INDEX_DTYPE:
            raise InvariantError("index arrays must be int64")
        if c.shape != (self.ncols + 1,):
            raise InvariantError(f"cidx has length {len(c)}, expected {self.ncols + 1}")
        if c[0] != 0:
            raise InvariantError("cidx[0] != 0")
        if np.any(np.diff(c) < 0):
            raise InvariantError("cidx is decreasing somewhere")
        nnz = int(c[-1])
        if nnz > len(r):
            raise InvariantError(f"nnz {nnz} exceeds capacity {len(r)}")
        if self.kind is ValueKind.PATTERN:
            if len(self.data):
                raise InvariantError("pattern matrix carries values")
        elif len(self.data) != len(r):
            raise InvariantError("data and ridx lengths differ")
        elif self.data.dtype != self.kind.dtype:
            raise InvariantError(f"data dtype {self.data.dtype} does not match {self.kind}")
        rows = r[:nnz]
        if nnz and (rows.min() < 0 or rows.max() >= self.nrows):
            raise InvariantError("row index out of range")
        if nnz > 1:
            starts = np.zeros(nnz, dtype=bool)
            starts[c[:-1][c[:-1] < nnz]] = True
            bad = (np.diff(rows) <= 0) & ~starts[1:]
            if bad.any():
                k = int(np.argmax(bad)) + 1
                raise InvariantError(f"rows not strictly increasing at slot {k}")
        return self

    # -- element access --------------------------------------------------------

    def _check_index(self, i, j) -> tuple[int, int]:
        i, j = _as_index(i), _as_index(j)
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(f"index ({i}, {j}) out of range for {self.nrows}x{self.ncols}")
        return i, j

    def _find(self, i: int, j: int) -> tuple[int, bool]:
        lo, hi = int(self.cidx[j]), int(self.cidx[j + 1])
        k = bisect_left(self.ridx, i, lo, hi)
        return k, (k < hi and self.ridx[k] == i)

    @property
    def zero(self):
        return self.kind.dtype(0)

    def get(self, i, j):
        """Value at ``(i, j)``; an unstored position reads as zero."""
        i, j = self._check_index(i, j)
        k, found = self._find(i, j)
        if not found:
            return self.zero
        if self.kind is ValueKind.PATTERN:
            return np.True_
        return self.data[k]

    def __getitem__(self, key):
        i, j = key
        return self.get(i, j)

    def __setitem__(self, key, value):
        i, j = key
        self.insert(i, j, value)

    def insert(self, i, j, v) -> "CscMatrix":
        """Store ``v`` at ``(i, j)`` in place, overwriting any existing entry.

        A zero value is stored explicitly (``maybe_compress(True)`` removes
        it).  Pattern matrices cannot hold explicit zeros, so a false value
        deletes the entry instead.  Appending in column-major order moves no
        stored entries.
        """
        i, j = self._check_index(i, j)
        k, found = self._find(i, j)
        if self.kind is ValueKind.PATTERN:
            if not v:
                if found:
                    self._delete(k, j)
                return self
            if found:
                return self
        elif np.iscomplexobj(v) and self.kind is ValueKind.REAL:
            self.kind = ValueKind.COMPLEX
            self.data = self.data.astype(np.complex128)
        if found:
            self.data[k] = v
            return self
        nnz = self.nnz
        if nnz == self.nzmax:
            self._resize(max(_MIN_GROWTH, 2 * self.nzmax))
        if k < nnz:
            self.ridx[k + 1:nnz + 1] = self.ridx[k:nnz]
            if self.kind is not ValueKind.PATTERN:
                self.data[k + 1:nnz + 1] = self.data[k:nnz]
        self.ridx[k] = i
        if self.kind is not ValueKind.PATTERN:
            self.data[k] = v
        self.cidx[j + 1:] += 1
        return self

    def _delete(self, k: int, j: int) -> None:
        nnz = self.nnz
        self.ridx[k:nnz - 1] = self.ridx[k + 1:nnz]
        if self.kind is not ValueKind.PATTERN:
            self.data[k:nnz - 1] = self.data[k + 1:nnz]
        self.cidx[j + 1:] -= 1

    # -- capacity ----------------------------------------------------------------

    def _resize(self, capacity: int) -> None:
        nnz = self.nnz
        ridx = np.zeros(capacity, dtype=INDEX_DTYPE)
        ridx[:nnz] = self.ridx[:nnz]
        self.ridx = ridx
        if self.kind is not ValueKind.PATTERN:
            data = np.zeros(capacity, dtype=self.kind.dtype)
            data[:nnz] = self.data[:nnz]
            self.data = data

    def change_capacity(self, capacity: int) -> "CscMatrix":
        capacity = _as_index(capacity)
        if capacity < self.nnz:
            raise CapacityError(f"capacity {capacity} is below nnz {self.nnz}")
        self._resize(capacity)
        return self

    def maybe_compress(self, remove_zeros: bool = False) -> "CscMatrix":
        """Shrink capacity to nnz, optionally deleting explicitly stored zeros."""
        nnz = self.nnz
        if remove_zeros and self.kind is not ValueKind.PATTERN:
            keep = self.data[:nnz] != 0
            if not keep.all():
                cols = self.column_of_entries()
                counts = np.bincount(cols[keep], minlength=self.ncols)
                self.cidx = np.concatenate(([0], np.cumsum(counts))).astype(INDEX_DTYPE)
                self.ridx = self.ridx[:nnz][keep]
                self.data = self.data[:nnz][keep]
                return self
        self._resize(nnz)
        return self

    # -- views and conversion -------------------------------------------------------

    def column_of_entries(self) -> np.ndarray:
        """Column index of every stored entry, in storage order."""
        return np.repeat(np.arange(self.ncols, dtype=INDEX_DTYPE), np.diff(self.cidx))

    def rows(self) -> np.ndarray:
        return self.ridx[:self.nnz]

    def values(self) -> np.ndarray:
        """Stored values (``True`` for every entry of a pattern matrix)."""
        if self.kind is ValueKind.PATTERN:
            return np.ones(self.nnz, dtype=np.bool_)
        return self.data[:self.nnz]

    def column(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.cidx[j], self.cidx[j + 1]
        if self.kind is ValueKind.PATTERN:
            return self.ridx[lo:hi], np.ones(hi - lo, dtype=np.bool_)
        return self.ridx[lo:hi], self.data[lo:hi]

    def entries(self) -> Iterator[tuple[int, int, object]]:
        """Stored entries ``(i, j, value)`` in column-major order."""
        vals = self.values()
        for j in range(self.ncols):
            for k in range(self.cidx[j], self.cidx[j + 1]):
                yield int(self.ridx[k]), j, vals[k]

    def explicit_zero_count(self) -> int:
        if self.kind is ValueKind.PATTERN:
            return 0
        return int(np.count_nonzero(self.data[:self.nnz] == 0))

    def copy(self) -> "CscMatrix":
        out = CscMatrix.__new__(CscMatrix)
        out.nrows, out.ncols, out.kind = self.nrows, self.ncols, self.kind
        out.cidx = self.cidx.copy()
        out.ridx = self.ridx.copy()
        out.data = self.data.copy()
        return out

    def compressed(self, remove_zeros: bool = True) -> "CscMatrix":
        """A compressed copy; returns ``self`` when nothing would change."""
        if self.nzmax == self.nnz and (not remove_zeros or self.explicit_zero_count() == 0):
            return self
        return self.copy().maybe_compress(remove_zeros)

    def astype(self, kind: ValueKind) -> "CscMatrix":
        if kind is self.kind:
            return self
        nnz = self.nnz
        if kind is ValueKind.PATTERN:
            src = self.compressed(remove_zeros=True)
            return CscMatrix(self.nrows, self.ncols, src.cidx, src.rows().copy(),
                             kind=kind, check=False)
        data = self.values().astype(kind.dtype)
        return CscMatrix(self.nrows, self.ncols, self.cidx.copy(), self.ridx[:nnz].copy(),
                         data, kind=kind, check=False)

    def todense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=self.kind.dtype)
        nnz = self.nnz
        out[self.ridx[:nnz], self.column_of_entries()] = self.values()
        return out

    def identical(self, other: "CscMatrix") -> bool:
        """Bit-for-bit equality of dimensions, kind, and stored entries."""
        if not isinstance(other, CscMatrix):
            return False
        if self.shape != other.shape or self.kind is not other.kind:
            return False
        nnz = self.nnz
        return (np.array_equal(self.cidx, other.cidx)
                and np.array_equal(self.ridx[:nnz], other.ridx[:nnz])
                and self.values().tobytes() == other.values().tobytes())

    def __repr__(self) -> str:
        return (f"CscMatrix(rows={self.nrows}, cols={self.ncols}, nnz={self.nnz}, "
                f"nzmax={self.nzmax}, kind={self.kind.value})")

    def __str__(self) -> str:
        lines = [f"Compressed Column Sparse (rows={self.nrows}, cols={self.ncols}, nnz={self.nnz})"]
        for i, j, v in self.entries():
            lines.append(f"  ({i + 1}, {j + 1}) -> {v}")
        return "\n".join(lines)

    # numpy must not try to broadcast over this object
    __array_priority__ = 100
    __hash__ = None


def issparse(x) -> bool:
    return isinstance(x, CscMatrix)
