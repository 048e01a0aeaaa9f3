"""Left-looking sparse LU with threshold partial pivoting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import CscMatrix, ValueKind
from ..errors import ShapeError, SingularMatrixError
from ..ops import transpose
from .triangular import _as_2d, reach, triangular_solve


@dataclass(frozen=True)
class LuFactors:
    """``A[row_perm, :][:, col_perm] = L U`` with ``L`` unit lower triangular."""

    L: CscMatrix
    U: CscMatrix
    row_perm: np.ndarray
    col_perm: np.ndarray

    @property
    def n(self) -> int:
        return self.U.ncols

    def solve(self, b):
        b2, vec = _as_2d(b)
        y = triangular_solve(self.L, b2[self.row_perm], lower=True)
        z = triangular_solve(self.U, y, lower=False)
        x = np.empty_like(z)
        x[self.col_perm] = z
        return x[:, 0] if vec else x

    def solve_h(self, b):
        """Solve with the conjugate transpose of the factored matrix."""
        b2, vec = _as_2d(b)
        y = triangular_solve(transpose(self.U, conjugate=True), b2[self.col_perm], lower=True)
        z = triangular_solve(transpose(self.L, conjugate=True), y, lower=False)
        x = np.empty_like(z)
        x[self.row_perm] = z
        return x[:, 0] if vec else x


def lu_factor(a: CscMatrix, col_perm=None, pivot_tol: float = 1.0) -> LuFactors:
    """Factor ``P A Q = L U`` one column at a time.

    For each column the pattern of ``L \\ A[:, q[k]]`` is found by a
    depth-first search through the finished columns of ``L``, then the
    sparse triangular solve runs over that pattern only.  The pivot is the
    largest candidate, except that the row matching the column index is kept
    whenever it is within ``pivot_tol`` of the largest; remaining ties go to
    the lowest row index.  A column with no usable pivot raises
    ``SingularMatrixError`` carrying the rank reached.
    """
    if a.nrows != a.ncols:
        raise ShapeError("LU needs a square matrix")
    if not 0.0 < pivot_tol <= 1.0:
        raise ValueError("pivot_tol must lie in (0, 1]")
    n = a.ncols
    q = np.arange(n, dtype=np.int64) if col_perm is None else np.asarray(col_perm, dtype=np.int64)
    a = a if a.kind is not ValueKind.PATTERN else a.astype(ValueKind.REAL)
    dtype = np.result_type(a.data.dtype, np.float64)
    cidx, ridx, vals = a.cidx.tolist(), a.rows().tolist(), a.values().tolist()

    pinv = [-1] * n
    Lrows: list[list[int]] = []
    Lvals: list[list] = []
    Urows: list[list[int]] = []
    Uvals: list[list] = []
    x = [0.0] * n

    def successors(i):
        j = pinv[i]
        return Lrows[j][1:] if j >= 0 else ()

    for k in range(n):
        col = int(q[k])
        starts = ridx[cidx[col]:cidx[col + 1]]
        topo = reach(successors, starts)
        for p in range(cidx[col], cidx[col + 1]):
            x[ridx[p]] = vals[p]
        for i in topo:
            j = pinv[i]
            if j < 0:
                continue
            xi = x[i]
            rows_j, vals_j = Lrows[j], Lvals[j]
            for t in range(1, len(rows_j)):
                x[rows_j[t]] -= vals_j[t] * xi

        ur, uv = [], []
        best, ipiv = -1.0, -1
        for i in topo:
            if pinv[i] >= 0:
                ur.append(pinv[i])
                uv.append(x[i])
            else:
                mag = abs(x[i])
                if mag > best or (mag == best and i < ipiv):
                    best, ipiv = mag, i
        if ipiv == -1 or best == 0:
            raise SingularMatrixError(f"no nonzero pivot for column {k}", rank=k)
        if pinv[col] < 0 and col in topo and abs(x[col]) >= pivot_tol * best:
            ipiv = col
        pivot = x[ipiv]
        pinv[ipiv] = k
        ur.append(k)
        uv.append(pivot)
        order = np.argsort(ur)
        Urows.append([ur[t] for t in order])
        Uvals.append([uv[t] for t in order])

        lr, lv = [ipiv], [1.0]
        for i in topo:
            if pinv[i] < 0:
                lr.append(i)
                lv.append(x[i] / pivot)
            x[i] = 0.0
        Lrows.append(lr)
        Lvals.append(lv)

    # L rows are still original row numbers; renumber them by pivot order
    def assemble(rows, values, renumber):
        counts = [len(r) for r in rows]
        cp = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
        out_r, out_v = [], []
        for r, v in zip(rows, values):
            rr = [pinv[i] for i in r] if renumber else r
            order = sorted(range(len(rr)), key=rr.__getitem__)
            out_r.extend(rr[t] for t in order)
            out_v.extend(v[t] for t in order)
        return CscMatrix(n, n, cp, np.asarray(out_r, dtype=np.int64),
                         np.asarray(out_v, dtype=dtype), check=False)

    L = assemble(Lrows, Lvals, True)
    U = assemble(Urows, Uvals, False)
    row_perm = np.empty(n, dtype=np.int64)
    row_perm[np.asarray(pinv, dtype=np.int64)] = np.arange(n, dtype=np.int64)
    return LuFactors(L, U, row_perm, q)
