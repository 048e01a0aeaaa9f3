"""Forward and backward substitution with sparse triangular matrices."""

from __future__ import annotations

import numpy as np

from ..build import from_triplets
from ..core import CscMatrix, ValueKind
from ..errors import ShapeError, SingularMatrixError
from ..ops import permute


def reach(adj, starts) -> list[int]:
    """Nodes reachable from ``starts`` in topological order.

    ``adj(v)`` lists the successors of ``v``.  The result is a reversed
    depth-first postorder, so every node precedes its successors.
    """
    seen = set()
    post: list[int] = []
    for s in starts:
        if s in seen:
            continue
        seen.add(s)
        stack = [(s, iter(adj(s)))]
        while stack:
            v, it = stack[-1]
            for w in it:
                if w not in seen:
                    seen.add(w)
                    stack.append((w, iter(adj(w))))
                    break
            else:
                stack.pop()
                post.append(v)
    post.reverse()
    return post


def _as_2d(b) -> tuple[np.ndarray, bool]:
    b = np.asarray(b)
    if b.ndim == 1:
        return b.reshape(-1, 1), True
    return b, False


def _dense_solve(t: CscMatrix, b: np.ndarray, lower: bool) -> np.ndarray:
    n = t.ncols
    x = b.astype(np.result_type(t.data.dtype, b.dtype, np.float64), copy=True)
    cidx, ridx, data = t.cidx, t.ridx, t.data
    cols = range(n) if lower else range(n - 1, -1, -1)
    for j in cols:
        lo, hi = cidx[j], cidx[j + 1]
        if lo == hi:
            raise SingularMatrixError(f"zero diagonal in column {j}")
        k = lo if lower else hi - 1
        if ridx[k] != j or data[k] == 0:
            raise SingularMatrixError(f"zero diagonal in column {j}")
        x[j] /= data[k]
        rest = slice(lo + 1, hi) if lower else slice(lo, hi - 1)
        rows = ridx[rest]
        if len(rows):
            x[rows] -= np.outer(data[rest], x[j])
    return x


def _sparse_solve(t: CscMatrix, b: CscMatrix, lower: bool) -> CscMatrix:
    """Column-by-column solve touching only the rows reachable from each right-hand side."""
    n = t.ncols
    cidx, ridx, data = t.cidx, t.ridx, t.data
    diag = np.empty(n, dtype=int)
    for j in range(n):
        lo, hi = cidx[j], cidx[j + 1]
        k = lo if lower else hi - 1
        if lo == hi or ridx[k] != j or data[k] == 0:
            raise SingularMatrixError(f"zero diagonal in column {j}")
        diag[j] = k

    def off_diagonal(j):
        lo, hi = cidx[j], cidx[j + 1]
        return ridx[lo + 1:hi] if lower else ridx[lo:hi - 1]

    dtype = np.result_type(t.data.dtype, b.data.dtype, np.float64)
    out_r, out_c, out_v = [], [], []
    x = np.zeros(n, dtype=dtype)
    for c in range(b.ncols):
        rows, vals = b.column(c)
        order = reach(lambda j: off_diagonal(j).tolist(), rows.tolist())
        x[rows] = vals
        for j in order:
            x[j] /= data[diag[j]]
            lo, hi = cidx[j], cidx[j + 1]
            rest = slice(lo + 1, hi) if lower else slice(lo, hi - 1)
            x[ridx[rest]] -= data[rest] * x[j]
        idx = np.asarray(sorted(order), dtype=np.int64)
        out_r.append(idx)
        out_c.append(np.full(len(idx), c, dtype=np.int64))
        out_v.append(x[idx].copy())
        x[idx] = 0
    if not out_r:
        return CscMatrix(n, b.ncols)
    return from_triplets(np.concatenate(out_r), np.concatenate(out_c), np.concatenate(out_v),
                         n, b.ncols, drop_zeros=True)


def triangular_solve(a: CscMatrix, b, lower: bool, row_perm=None, col_perm=None):
    """Solve ``a x = b`` for triangular (or permuted triangular) ``a``.

    With ``row_perm`` the matrix ``a[row_perm, :]`` must be triangular, with
    ``col_perm`` the matrix ``a[:, col_perm]``.  A sparse ``b`` gives a
    sparse ``x`` and only visits the rows its nonzeros can reach.  A zero
    or missing diagonal raises ``SingularMatrixError``.
    """
    n = a.nrows
    if a.ncols != n:
        raise ShapeError("triangular solve needs a square matrix")
    bshape = b.shape
    if bshape[0] != n:
        raise ShapeError(f"right-hand side has {bshape[0]} rows, expected {n}")
    t = a.compressed(remove_zeros=True)
    if t.is_pattern:
        t = t.astype(ValueKind.REAL)
    if row_perm is not None:
        t = permute(t, row_perm, None)
        b = permute(b, row_perm, None) if isinstance(b, CscMatrix) else np.asarray(b)[row_perm]
    if col_perm is not None:
        t = permute(t, None, col_perm)

    if isinstance(b, CscMatrix):
        x = _sparse_solve(t, b, lower)
        if col_perm is not None:
            x = permute(x, np.argsort(col_perm), None)
        return x
    b2, vec = _as_2d(b)
    x = _dense_solve(t, b2, lower)
    if col_perm is not None:
        y = np.empty_like(x)
        y[np.asarray(col_perm)] = x
        x = y
    return x[:, 0] if vec else x
