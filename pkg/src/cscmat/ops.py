"""Arithmetic on sparse and dense operands with sparse/full promotion.

Results are either a ``CscMatrix`` or a dense ``numpy.ndarray``.  The
format is decided by ``promotion_decision``: operations that turn unstored
zeros into nonzeros give dense results, and so does any sparse result whose
storage would be at least as large as the dense equivalent.  Values always
agree with the dense computation, including NaN/Inf produced at unstored
zeros.  An unstored zero is a positive zero, so its sign bit is lost.
"""

from __future__ import annotations

from typing import Callable, NamedTuple, Sequence, Union

import numpy as np

from .build import from_dense, from_triplets
from .core import INDEX_DTYPE, INDEX_WIDTH, CscMatrix, ValueKind
from .errors import DomainError, ShapeError

MaybeSparse = Union[CscMatrix, np.ndarray]

_BINARY = {
    "+": np.add,
    "-": np.subtract,
    ".*": np.multiply,
    "./": np.divide,
    ".^": np.power,
    "atan2": np.arctan2,
    "min": np.minimum,
    "max": np.maximum,
}
_ALIASES = {"add": "+", "sub": "-", "mul": ".*", "times": ".*", "div": "./",
            "rdivide": "./", "pow": ".^", "power": ".^"}
# scalar + and - almost always fill the matrix, so they never stay sparse
_SCALAR_ALWAYS_DENSE = {"+", "-"}


def _binary(op: str) -> tuple[str, Callable]:
    op = _ALIASES.get(op, op)
    try:
        return op, _BINARY[op]
    except KeyError:
        raise DomainError(f"unknown element-wise operator {op!r}") from None


def sparse_bytes(ncols: int, nnz: int, kind: ValueKind = ValueKind.REAL) -> int:
    return (ncols + 1 + nnz) * INDEX_WIDTH + nnz * kind.stored_width


def dense_bytes(nrows: int, ncols: int, kind: ValueKind = ValueKind.REAL) -> int:
    return nrows * ncols * kind.value_width


def promotion_decision(nrows: int, ncols: int, nnz: int, kind: ValueKind = ValueKind.REAL,
                       *, zero_to_nonzero: bool = False, always_sparse: bool = False) -> str:
    """Return ``"sparse"`` or ``"dense"`` for a result of the given size.

    ``zero_to_nonzero`` marks operations that map zero to a nonzero value;
    ``always_sparse`` marks the constructors that are exempt from the rule.
    """
    if always_sparse:
        return "sparse"
    if zero_to_nonzero:
        return "dense"
    if sparse_bytes(ncols, nnz, kind) >= dense_bytes(nrows, ncols, kind):
        return "dense"
    return "sparse"


def _promote(a: CscMatrix) -> MaybeSparse:
    if promotion_decision(a.nrows, a.ncols, a.nnz, a.kind) == "dense":
        return a.todense()
    return a


def to_dense(x) -> np.ndarray:
    if isinstance(x, CscMatrix):
        return x.todense()
    return np.asarray(x)


def _arith(x):
    """Pattern operands take part in arithmetic as real 0/1 matrices."""
    if isinstance(x, CscMatrix):
        return x.astype(ValueKind.REAL) if x.is_pattern else x
    x = np.asarray(x)
    if x.dtype == np.bool_ or x.dtype.kind in "iu":
        return x.astype(np.float64)
    return x


def _is_scalar(x) -> bool:
    return not isinstance(x, CscMatrix) and np.ndim(x) == 0


def _shape(x) -> tuple[int, ...]:
    return x.shape if isinstance(x, CscMatrix) else np.shape(x)


def _with_values(a: CscMatrix, vals: np.ndarray) -> CscMatrix:
    """Matrix with ``a``'s pattern and new values, zeros dropped."""
    out = CscMatrix(a.nrows, a.ncols, a.cidx.copy(), a.rows().copy(), vals,
                    kind=ValueKind.of(vals), check=False)
    return out.maybe_compress(remove_zeros=True)


def _from_keys(keys: np.ndarray, vals: np.ndarray, nrows: int, ncols: int) -> CscMatrix:
    rows = keys % nrows if nrows else keys
    cols = keys // nrows if nrows else keys
    cidx = np.zeros(ncols + 1, dtype=INDEX_DTYPE)
    np.cumsum(np.bincount(cols, minlength=ncols), out=cidx[1:])
    return CscMatrix(nrows, ncols, cidx, rows, vals, kind=ValueKind.of(vals), check=False)


def _keys(a: CscMatrix) -> np.ndarray:
    return a.column_of_entries() * a.nrows + a.rows()


def ewise_binary(a, b, op: str) -> MaybeSparse:
    """Element-wise ``a op b`` for ``op`` in + - .* ./ .^ atan2 min max."""
    op, f = _binary(op)
    if _is_scalar(b):
        return scalar_binary(a, b, op, side="right")
    if _is_scalar(a):
        return scalar_binary(b, a, op, side="left")
    a, b = _arith(a), _arith(b)
    if _shape(a) != _shape(b):
        raise ShapeError(f"operands of {op} have shapes {_shape(a)} and {_shape(b)}")
    sa, sb = isinstance(a, CscMatrix), isinstance(b, CscMatrix)

    with np.errstate(all="ignore"):
        if sa and sb:
            z = f(a.zero, b.zero)
            if z != 0 or z != z:
                return f(a.todense(), b.todense())
            m, n = a.shape
            ka, kb = _keys(a), _keys(b)
            keys = np.union1d(ka, kb)
            dtype = np.result_type(a.data.dtype, b.data.dtype)
            va = np.zeros(len(keys), dtype=dtype)
            vb = np.zeros(len(keys), dtype=dtype)
            va[np.searchsorted(keys, ka)] = a.values()
            vb[np.searchsorted(keys, kb)] = b.values()
            r = f(va, vb)
            keep = r != 0
            return _promote(_from_keys(keys[keep], r[keep], m, n))

        r = f(to_dense(a), to_dense(b))
        if not (sa or sb):
            return r
        s = a if sa else b
        unstored = np.ones(s.shape, dtype=bool)
        unstored[s.rows(), s.column_of_entries()] = False
        if np.any(r[unstored] != 0):
            return r
        return _promote(from_dense(r))


def scalar_binary(a, s, op: str, side: str = "right") -> MaybeSparse:
    """``a op s`` (``side="right"``) or ``s op a`` (``side="left"``)."""
    op, f = _binary(op)
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', not {side!r}")
    g = (lambda x: f(x, s)) if side == "right" else (lambda x: f(s, x))
    a = _arith(a)
    with np.errstate(all="ignore"):
        if not isinstance(a, CscMatrix):
            return g(a)
        z = g(a.zero)
        if op in _SCALAR_ALWAYS_DENSE or z != 0 or z != z:
            return g(a.todense())
        return _promote(_with_values(a, g(a.values())))


def spmatmul(a: CscMatrix, b: CscMatrix) -> CscMatrix:
    """Sparse product by column-wise accumulation; exact-zero sums are dropped."""
    if a.ncols != b.nrows:
        raise ShapeError(f"inner dimensions differ: {a.shape} * {b.shape}")
    a, b = _arith(a), _arith(b)
    m, n = a.nrows, b.ncols
    Ap, Ai, Ax = a.cidx.tolist(), a.rows().tolist(), a.values().tolist()
    Bp, Bi, Bx = b.cidx.tolist(), b.rows().tolist(), b.values().tolist()
    mark = [-1] * m
    acc = [0.0] * m
    Cp, Ci, Cx = [0], [], []
    for j in range(n):
        touched = []
        for p in range(Bp[j], Bp[j + 1]):
            k, bkj = Bi[p], Bx[p]
            for q in range(Ap[k], Ap[k + 1]):
                i = Ai[q]
                if mark[i] != j:
                    mark[i] = j
                    acc[i] = Ax[q] * bkj
                    touched.append(i)
                else:
                    acc[i] += Ax[q] * bkj
        touched.sort()
        for i in touched:
            v = acc[i]
            if v != 0:
                Ci.append(i)
                Cx.append(v)
        Cp.append(len(Ci))
    dtype = np.result_type(a.data.dtype, b.data.dtype)
    return CscMatrix(m, n, Cp, Ci, np.array(Cx, dtype=dtype), kind=ValueKind.of(np.zeros(0, dtype)),
                     check=False)


def matmul(a, b) -> MaybeSparse:
    """Matrix product; sparse times sparse may stay sparse, anything with a dense factor is dense."""
    if _is_scalar(a) or _is_scalar(b):
        return ewise_binary(a, b, ".*")
    a, b = _arith(a), _arith(b)
    sa, sb = isinstance(a, CscMatrix), isinstance(b, CscMatrix)
    sha, shb = _shape(a), _shape(b)
    if sb and len(sha) == 1:
        sha = (1, sha[0])
    if sha[-1] != shb[0]:
        raise ShapeError(f"inner dimensions differ: {sha} * {shb}")
    if sa and sb:
        return _promote(spmatmul(a, b))
    if sa:
        x = np.asarray(b)
        out = np.zeros((a.nrows,) + x.shape[1:], dtype=np.result_type(a.data.dtype, x.dtype))
        cols = a.column_of_entries()
        vals = a.values()
        if x.ndim == 1:
            np.add.at(out, a.rows(), vals * x[cols])
        else:
            np.add.at(out, a.rows(), vals[:, None] * x[cols, :])
        return out
    if sb:
        x = np.asarray(a)
        vec = x.ndim == 1
        x2 = x.reshape(1, -1) if vec else x
        out = np.zeros((x2.shape[0], b.ncols), dtype=np.result_type(x.dtype, b.data.dtype))
        for j in range(b.ncols):
            r, v = b.column(j)
            if len(r):
                out[:, j] = x2[:, r] @ v
        return out[0] if vec else out
    return np.asarray(a) @ np.asarray(b)


def transpose(a: CscMatrix, conjugate: bool = False) -> CscMatrix:
    """Transpose (or conjugate transpose) by counting sort, O(nnz + n)."""
    m, n = a.shape
    nnz = a.nnz
    counts = np.bincount(a.rows(), minlength=m)
    tp = np.zeros(m + 1, dtype=INDEX_DTYPE)
    np.cumsum(counts, out=tp[1:])
    nxt = tp[:-1].tolist()
    Ap, Ai = a.cidx.tolist(), a.rows().tolist()
    dest = [0] * nnz
    ti = [0] * nnz
    for j in range(n):
        for p in range(Ap[j], Ap[j + 1]):
            q = nxt[Ai[p]]
            nxt[Ai[p]] = q + 1
            dest[p] = q
            ti[q] = j
    if a.is_pattern:
        return CscMatrix(n, m, tp, ti, kind=ValueKind.PATTERN, check=False)
    tx = np.empty(nnz, dtype=a.data.dtype)
    tx[dest] = a.values()
    if conjugate and a.kind is ValueKind.COMPLEX:
        tx = tx.conj()
    return CscMatrix(n, m, tp, ti, tx, kind=a.kind, check=False)


def ctranspose(a: CscMatrix) -> CscMatrix:
    return transpose(a, conjugate=True)


def _result_kind(parts: Sequence[CscMatrix]) -> ValueKind:
    kinds = {p.kind for p in parts}
    if kinds == {ValueKind.PATTERN}:
        return ValueKind.PATTERN
    return ValueKind.COMPLEX if ValueKind.COMPLEX in kinds else ValueKind.REAL


def concat(axis: str, parts: Sequence) -> CscMatrix:
    """Concatenate ``horizontal``-ly (side by side) or ``vertical``-ly (stacked)."""
    parts = [p if isinstance(p, CscMatrix) else from_dense(p) for p in parts]
    if not parts:
        raise ShapeError("nothing to concatenate")
    kind = _result_kind(parts)
    if kind is not ValueKind.PATTERN:
        parts = [p.astype(kind) for p in parts]
    if axis in ("horizontal", "h", 1):
        m = parts[0].nrows
        if any(p.nrows != m for p in parts):
            raise ShapeError("horizontal concatenation needs equal row counts")
        offs = np.cumsum([0] + [p.nnz for p in parts])
        cidx = np.concatenate([[0]] + [p.cidx[1:] + o for p, o in zip(parts, offs)])
        ridx = np.concatenate([p.rows() for p in parts])
        data = None if kind is ValueKind.PATTERN else np.concatenate([p.values() for p in parts])
        return CscMatrix(m, sum(p.ncols for p in parts), cidx, ridx, data, kind=kind, check=False)
    if axis in ("vertical", "v", 0):
        n = parts[0].ncols
        if any(p.ncols != n for p in parts):
            raise ShapeError("vertical concatenation needs equal column counts")
        roff = np.cumsum([0] + [p.nrows for p in parts])
        rows = np.concatenate([p.rows() + o for p, o in zip(parts, roff)])
        cols = np.concatenate([p.column_of_entries() for p in parts])
        vals = None if kind is ValueKind.PATTERN else np.concatenate([p.values() for p in parts])
        return from_triplets(rows, cols, vals, int(roff[-1]), n)
    raise DomainError(f"unknown axis {axis!r}")


def map_unary(a, f: Callable, f_zero=None) -> MaybeSparse:
    """Apply a scalar mapper; stays sparse only when ``f(0) == 0``."""
    a = _arith(a)
    with np.errstate(all="ignore"):
        if not isinstance(a, CscMatrix):
            return f(a)
        if f_zero is None:
            f_zero = f(np.zeros(1, dtype=a.data.dtype))[0]
        if f_zero != 0 or f_zero != f_zero:
            return f(a.todense())
        return _promote(_with_values(a, np.asarray(f(a.values()))))


def spfun(f: Callable, a: CscMatrix) -> CscMatrix:
    """Apply ``f`` to the stored nonzeros only; the result is always sparse."""
    a = _arith(a).compressed(remove_zeros=True)
    with np.errstate(all="ignore"):
        vals = np.asarray(f(a.values()))
    return _with_values(a, vals)


class ColumnStats(NamedTuple):
    count: np.ndarray
    mean: np.ndarray
    var: np.ndarray


def reduce_columns(a, kind: str = "sum"):
    """Column reductions: ``sum prod sumsq min max`` or ``stats``.

    ``stats`` gives, per column, the number of nonzeros and the mean and
    sample variance (normalized by count - 1) of those nonzeros; columns
    with too few nonzeros get NaN.
    """
    if not isinstance(a, CscMatrix):
        return _reduce_dense(np.asarray(a), kind)
    a = _arith(a)
    m, n = a.shape
    cols = a.column_of_entries()
    vals = a.values()
    cnt = np.diff(a.cidx)
    with np.errstate(all="ignore"):
        if kind == "sum":
            out = np.zeros(n, dtype=vals.dtype)
            np.add.at(out, cols, vals)
            return out
        if kind == "sumsq":
            out = np.zeros(n)
            np.add.at(out, cols, np.abs(vals) ** 2)
            return out
        if kind in ("prod", "min", "max"):
            red = {"prod": np.prod, "min": np.min, "max": np.max}[kind]
            out = np.empty(n, dtype=vals.dtype)
            for j in range(n):
                lo, hi = a.cidx[j], a.cidx[j + 1]
                v = vals[lo:hi]
                if kind == "prod":
                    out[j] = np.prod(v) * (0 if cnt[j] < m else 1)
                elif m == 0:
                    out[j] = np.nan
                else:
                    out[j] = red(np.concatenate((v, [0])) if cnt[j] < m else v)
            return out
        if kind == "stats":
            nz = vals != 0
            count = np.bincount(cols[nz], minlength=n)
            s = np.zeros(n, dtype=vals.dtype)
            np.add.at(s, cols[nz], vals[nz])
            mean = s / count
            dev = np.zeros(n)
            np.add.at(dev, cols[nz], np.abs(vals[nz] - mean[cols[nz]]) ** 2)
            var = dev / (count - 1)
            var[count < 2] = np.nan
            return ColumnStats(count, mean, var)
    raise DomainError(f"unknown reduction {kind!r}")


def _reduce_dense(a: np.ndarray, kind: str):
    with np.errstate(all="ignore"):
        if kind == "sum":
            return a.sum(axis=0)
        if kind == "sumsq":
            return (np.abs(a) ** 2).sum(axis=0)
        if kind == "prod":
            return a.prod(axis=0)
        if kind in ("min", "max"):
            if a.shape[0] == 0:
                return np.full(a.shape[1], np.nan)
            return a.min(axis=0) if kind == "min" else a.max(axis=0)
        if kind == "stats":
            return reduce_columns(from_dense(a), "stats")
    raise DomainError(f"unknown reduction {kind!r}")


def scan_columns(a, kind: str = "cumsum") -> MaybeSparse:
    """Column-wise cumulative sum."""
    if kind != "cumsum":
        raise DomainError(f"unknown scan {kind!r}")
    if not isinstance(a, CscMatrix):
        return np.cumsum(a, axis=0)
    a = _arith(a)
    m, n = a.shape
    rows_out, cols_out, vals_out = [], [], []
    for j in range(n):
        r, v = a.column(j)
        if not len(r):
            continue
        with np.errstate(all="ignore"):
            s = np.cumsum(v)
        ends = np.append(r[1:], m)
        keep = s != 0
        lengths = (ends - r)[keep]
        starts = r[keep]
        total = int(lengths.sum())
        offs = np.repeat(np.cumsum(lengths) - lengths, lengths)
        rows_out.append(np.repeat(starts, lengths) + np.arange(total) - offs)
        cols_out.append(np.full(total, j))
        vals_out.append(np.repeat(s[keep], lengths))
    if not rows_out:
        return _promote(CscMatrix(m, n, kind=a.kind))
    out = from_triplets(np.concatenate(rows_out), np.concatenate(cols_out),
                        np.concatenate(vals_out), m, n)
    return _promote(out)


# -- structural helpers -------------------------------------------------------------


def norm1(a) -> float:
    """Maximum absolute column sum."""
    if not isinstance(a, CscMatrix):
        a = np.asarray(a)
        return float(np.abs(a).sum(axis=0).max()) if a.size else 0.0
    if a.ncols == 0:
        return 0.0
    s = np.zeros(a.ncols)
    np.add.at(s, a.column_of_entries(), np.abs(_arith(a).values()))
    return float(s.max())


def norm_inf(a) -> float:
    """Maximum absolute row sum."""
    if not isinstance(a, CscMatrix):
        a = np.asarray(a)
        if a.ndim == 1:
            return float(np.abs(a).max()) if a.size else 0.0
        return float(np.abs(a).sum(axis=1).max()) if a.size else 0.0
    if a.nrows == 0:
        return 0.0
    s = np.zeros(a.nrows)
    np.add.at(s, a.rows(), np.abs(_arith(a).values()))
    return float(s.max())


def submatrix(a: CscMatrix, rows, cols) -> CscMatrix:
    """``a[rows, :][:, cols]`` for index vectors without repeats."""
    rows = np.asarray(rows, dtype=INDEX_DTYPE).ravel()
    cols = np.asarray(cols, dtype=INDEX_DTYPE).ravel()
    rowmap = np.full(a.nrows, -1, dtype=INDEX_DTYPE)
    rowmap[rows] = np.arange(len(rows), dtype=INDEX_DTYPE)
    if np.count_nonzero(rowmap >= 0) != len(rows):
        raise DomainError("row index vector has repeats")
    starts, ends = a.cidx[cols], a.cidx[cols + 1]
    lengths = ends - starts
    total = int(lengths.sum())
    offs = np.repeat(np.cumsum(lengths) - lengths, lengths)
    slots = np.repeat(starts, lengths) + np.arange(total) - offs
    newcols = np.repeat(np.arange(len(cols), dtype=INDEX_DTYPE), lengths)
    newrows = rowmap[a.ridx[slots]]
    keep = newrows >= 0
    vals = None if a.is_pattern else a.data[slots][keep]
    return from_triplets(newrows[keep], newcols[keep], vals, len(rows), len(cols))


def permute(a: CscMatrix, p=None, q=None) -> CscMatrix:
    """``a[p, :][:, q]``; ``None`` keeps the natural order."""
    p = np.arange(a.nrows) if p is None else p
    q = np.arange(a.ncols) if q is None else q
    return submatrix(a, p, q)


def _band_select(a: CscMatrix, keep: np.ndarray) -> CscMatrix:
    cols = a.column_of_entries()[keep]
    vals = None if a.is_pattern else a.values()[keep]
    return from_triplets(a.rows()[keep], cols, vals, a.nrows, a.ncols)


def tril(a: CscMatrix, k: int = 0) -> CscMatrix:
    """Entries on and below diagonal ``k``."""
    return _band_select(a, a.column_of_entries() - a.rows() <= k)


def triu(a: CscMatrix, k: int = 0) -> CscMatrix:
    """Entries on and above diagonal ``k``."""
    return _band_select(a, a.column_of_entries() - a.rows() >= k)


def diagonal(a: CscMatrix) -> np.ndarray:
    a = _arith(a)
    d = np.zeros(min(a.shape), dtype=a.data.dtype)
    cols = a.column_of_entries()
    on = a.rows() == cols
    d[cols[on]] = a.values()[on]
    return d


def pattern_union_transpose(a: CscMatrix) -> CscMatrix:
    """Pattern of ``a + a'`` (square input)."""
    if a.nrows != a.ncols:
        raise ShapeError("a + a' needs a square matrix")
    p = a.astype(ValueKind.PATTERN)
    pt = transpose(p)
    rows = np.concatenate((p.rows(), pt.rows()))
    cols = np.concatenate((p.column_of_entries(), pt.column_of_entries()))
    return from_triplets(rows, cols, None, a.nrows, a.ncols)
