"""Up-looking sparse Cholesky factorization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import CscMatrix, ValueKind
from ..errors import ShapeError
from ..ops import permute, transpose
from ..order import etree
from .triangular import _as_2d, triangular_solve


@dataclass(frozen=True)
class CholFactor:
    """``L L' = A[perm, :][:, perm]`` with ``L`` lower triangular, positive real diagonal."""

    L: CscMatrix
    perm: np.ndarray

    @property
    def n(self) -> int:
        return self.L.ncols

    def solve(self, b):
        b2, vec = _as_2d(b)
        y = triangular_solve(self.L, b2[self.perm], lower=True)
        z = triangular_solve(transpose(self.L, conjugate=True), y, lower=False)
        x = np.empty_like(z)
        x[self.perm] = z
        return x[:, 0] if vec else x

    # the factored matrix is hermitian
    solve_h = solve


def cholesky_factor(a: CscMatrix, perm=None) -> CholFactor | None:
    """Sparse Cholesky of ``a[perm, :][:, perm]``, or ``None`` if a pivot is not positive.

    Row ``k`` of the factor is found from the elimination tree (the rows
    reachable from the upper-triangular entries of column ``k``) and computed
    by a sparse triangular solve with the rows already finished.  Only the
    upper triangle of the (permuted) matrix is read.
    """
    if a.nrows != a.ncols:
        raise ShapeError("Cholesky needs a square matrix")
    n = a.ncols
    perm = np.arange(n, dtype=np.int64) if perm is None else np.asarray(perm, dtype=np.int64)
    c = a if a.kind is not ValueKind.PATTERN else a.astype(ValueKind.REAL)
    c = permute(c, perm, perm)
    parent = etree(c).parent.tolist()
    cidx, ridx = c.cidx.tolist(), c.rows().tolist()
    vals = c.values().tolist()
    is_complex = c.kind is ValueKind.COMPLEX

    Li: list[list[int]] = [[] for _ in range(n)]
    Lx: list[list] = [[] for _ in range(n)]
    x = [0.0] * n
    mark = [-1] * n
    for k in range(n):
        # pattern of row k of L, in topological order
        mark[k] = k
        paths = []
        for p in range(cidx[k], cidx[k + 1]):
            i = ridx[p]
            if i > k:
                continue
            x[i] = vals[p]
            path = []
            while mark[i] != k:
                path.append(i)
                mark[i] = k
                i = parent[i]
            if path:
                paths.append(path)
        d = x[k]
        x[k] = 0.0
        for path in reversed(paths):
            for i in path:
                lki = x[i] / Lx[i][0]
                x[i] = 0.0
                rows_i, vals_i = Li[i], Lx[i]
                for q in range(1, len(rows_i)):
                    x[rows_i[q]] -= vals_i[q] * lki
                if is_complex:
                    d -= (lki * lki.conjugate()).real
                    lki = lki.conjugate()
                else:
                    d -= lki * lki
                Li[i].append(k)
                Lx[i].append(lki)
        if is_complex:
            if d.imag != 0 and abs(d.imag) > 1e-14 * abs(d.real):
                return None
            d = d.real
        if not d > 0:
            return None
        # nothing has been appended to column k yet, so the diagonal comes first
        Li[k].append(k)
        Lx[k].append(d ** 0.5)

    counts = np.array([len(r) for r in Li], dtype=np.int64)
    lp = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
    li = np.fromiter((i for col in Li for i in col), dtype=np.int64, count=int(lp[-1]))
    lx = np.array([v for col in Lx for v in col], dtype=c.kind.dtype)
    L = CscMatrix(n, n, lp, li, lx, kind=c.kind, check=False)
    return CholFactor(L, perm)
