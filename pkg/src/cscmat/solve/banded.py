"""Tridiagonal and banded direct solvers working in band storage.

The Cholesky attempts report failure by returning ``None`` so the caller
can fall back to the pivoting elimination; exactly zero pivots in the
pivoting paths raise ``SingularMatrixError``.
"""

from __future__ import annotations

import numpy as np

from ..core import CscMatrix
from ..errors import ShapeError, SingularMatrixError
from .triangular import _as_2d


def _diagonals(a: CscMatrix, offsets) -> dict[int, np.ndarray]:
    """Dense copies of the requested diagonals (offset > 0 is above the main one)."""
    n = a.ncols
    rows, cols = a.rows(), a.column_of_entries()
    vals = a.values().astype(np.result_type(a.data.dtype, np.float64))
    out = {}
    for k in offsets:
        d = np.zeros(max(n - abs(k), 0), dtype=vals.dtype)
        on = cols - rows == k
        d[np.minimum(rows[on], cols[on])] = vals[on]
        out[k] = d
    return out


def _rhs(a: CscMatrix, b):
    if a.nrows != a.ncols:
        raise ShapeError("banded solvers need a square matrix")
    b2, vec = _as_2d(b)
    if b2.shape[0] != a.nrows:
        raise ShapeError(f"right-hand side has {b2.shape[0]} rows, expected {a.nrows}")
    return b2, vec


def tridiag_ldl_solve(sub, diag, b):
    """LDL' solve of a hermitian tridiagonal system without square roots.

    ``sub`` is the subdiagonal; the superdiagonal is its conjugate.  Returns
    ``None`` as soon as a pivot is not strictly positive.
    """
    n = len(diag)
    d = np.empty(n)
    l = np.empty(max(n - 1, 0), dtype=np.result_type(sub.dtype, np.float64))
    if n == 0:
        return b.copy()
    if diag[0].imag != 0 or diag[0].real <= 0:
        return None
    d[0] = diag[0].real
    for k in range(n - 1):
        l[k] = sub[k] / d[k]
        dk = diag[k + 1] - l[k] * np.conj(sub[k])
        if dk.imag != 0 and abs(dk.imag) > 1e-14 * abs(dk.real) or dk.real <= 0:
            return None
        d[k + 1] = dk.real
    y = b.astype(np.result_type(b.dtype, l.dtype), copy=True)
    for k in range(n - 1):
        y[k + 1] -= l[k] * y[k]
    y /= d[:, None]
    for k in range(n - 2, -1, -1):
        y[k] -= np.conj(l[k]) * y[k + 1]
    return y


def tridiag_pivot_solve(dl, d, du, b):
    """Gaussian elimination with partial pivoting on a tridiagonal system.

    Row interchanges create fill in a second superdiagonal, kept in ``dl``
    after elimination.  An exactly zero pivot raises ``SingularMatrixError``.
    """
    n = len(d)
    dtype = np.result_type(dl.dtype, d.dtype, du.dtype, b.dtype, np.float64)
    dl, d, du = dl.astype(dtype), d.astype(dtype), du.astype(dtype)
    b = b.astype(dtype, copy=True)
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            if d[i] == 0:
                raise SingularMatrixError(f"zero pivot at row {i}", rank=i)
            fact = dl[i] / d[i]
            d[i + 1] -= fact * du[i]
            b[i + 1] -= fact * b[i]
            dl[i] = 0
        else:
            fact = d[i] / dl[i]
            d[i] = dl[i]
            temp = d[i + 1]
            d[i + 1] = du[i] - fact * temp
            if i < n - 2:
                dl[i] = du[i + 1]
                du[i + 1] = -fact * dl[i]
            else:
                dl[i] = 0
            du[i] = temp
            bi = b[i].copy()
            b[i] = b[i + 1]
            b[i + 1] = bi - fact * b[i + 1]
    if n and d[n - 1] == 0:
        raise SingularMatrixError(f"zero pivot at row {n - 1}", rank=n - 1)
    if n:
        b[n - 1] /= d[n - 1]
    if n > 1:
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i]
    return b


def tridiag_solve(a: CscMatrix, b, hermitian_pos_diag: bool = False):
    """Solve a tridiagonal system, trying LDL' first when the matrix qualifies.

    Returns ``(x, used_ldl)``.
    """
    b2, vec = _rhs(a, b)
    diags = _diagonals(a, (-1, 0, 1))
    x = None
    if hermitian_pos_diag:
        x = tridiag_ldl_solve(diags[-1], diags[0], b2)
    used_ldl = x is not None
    if x is None:
        x = tridiag_pivot_solve(diags[-1], diags[0], diags[1], b2)
    return (x[:, 0] if vec else x), used_ldl


# -- general band ------------------------------------------------------------------


def band_storage(a: CscMatrix, kl: int, ku: int, extra: int = 0) -> np.ndarray:
    """LAPACK-style band array: ``a[i, j]`` sits at ``ab[extra + ku + i - j, j]``."""
    n = a.ncols
    rows, cols = a.rows(), a.column_of_entries()
    vals = a.values()
    d = rows - cols
    if len(d) and (d.max() > kl or -d.min() > ku):
        raise ShapeError("entries outside the declared band")
    ab = np.zeros((extra + kl + ku + 1, n), dtype=np.result_type(a.data.dtype, np.float64))
    ab[extra + ku + rows - cols, cols] = vals
    return ab


def band_cholesky(a: CscMatrix, k: int):
    """Lower band Cholesky factor in band storage (``L[i, j]`` at ``[i - j, j]``), or ``None``."""
    n = a.ncols
    full = band_storage(a, k, k)
    ab = full[k:, :].copy()
    for j in range(n):
        ajj = ab[0, j]
        if ajj.imag != 0 and abs(ajj.imag) > 1e-14 * abs(ajj.real) or ajj.real <= 0:
            return None
        ajj = np.sqrt(ajj.real)
        ab[0, j] = ajj
        kn = min(k, n - 1 - j)
        if kn == 0:
            continue
        v = ab[1:kn + 1, j] / ajj
        ab[1:kn + 1, j] = v
        r = np.arange(kn)[:, None]
        c = np.arange(kn)[None, :]
        lower = r >= c
        rr, cc = np.broadcast_to(r, (kn, kn))[lower], np.broadcast_to(c, (kn, kn))[lower]
        ab[rr - cc, j + 1 + cc] -= v[rr] * np.conj(v[cc])
    return ab


def band_cholesky_solve(lb: np.ndarray, b: np.ndarray) -> np.ndarray:
    k = lb.shape[0] - 1
    n = lb.shape[1]
    x = b.astype(np.result_type(lb.dtype, b.dtype), copy=True)
    for j in range(n):
        x[j] /= lb[0, j]
        kn = min(k, n - 1 - j)
        if kn:
            x[j + 1:j + 1 + kn] -= np.outer(lb[1:kn + 1, j], x[j])
    for j in range(n - 1, -1, -1):
        kn = min(k, n - 1 - j)
        if kn:
            x[j] -= np.conj(lb[1:kn + 1, j]) @ x[j + 1:j + 1 + kn]
        x[j] /= lb[0, j]
    return x


def band_lu(a: CscMatrix, kl: int, ku: int):
    """Band LU with partial pivoting; returns ``(ab, ipiv)`` in LAPACK gbtrf layout.

    The factor needs ``kl`` extra rows above the band for the fill that row
    interchanges push into ``U``.
    """
    n = a.ncols
    ab = band_storage(a, kl, ku, extra=kl)
    kv = kl + ku
    ipiv = np.zeros(n, dtype=np.int64)
    ju = 0
    for j in range(n):
        km = min(kl, n - 1 - j)
        col = ab[kv:kv + km + 1, j]
        jp = int(np.argmax(np.abs(col)))
        ipiv[j] = j + jp
        if col[jp] == 0:
            raise SingularMatrixError(f"zero pivot in column {j}", rank=j)
        ju = max(ju, min(j + ku + jp, n - 1))
        if jp:
            cs = np.arange(j, ju + 1)
            r1 = kv + j - cs
            r2 = r1 + jp
            tmp = ab[r1, cs].copy()
            ab[r1, cs] = ab[r2, cs]
            ab[r2, cs] = tmp
        if km:
            ab[kv + 1:kv + km + 1, j] /= ab[kv, j]
            if ju > j:
                cs = np.arange(j + 1, ju + 1)[None, :]
                rs = np.arange(j + 1, j + km + 1)[:, None]
                u = ab[kv + j - cs, cs]
                ab[kv + rs - cs, cs] -= ab[kv + 1:kv + km + 1, j][:, None] * u
    return ab, ipiv


def band_lu_solve(ab: np.ndarray, ipiv: np.ndarray, kl: int, ku: int, b: np.ndarray) -> np.ndarray:
    n = ab.shape[1]
    kv = kl + ku
    x = b.astype(np.result_type(ab.dtype, b.dtype), copy=True)
    for j in range(n):
        p = ipiv[j]
        if p != j:
            x[[j, p]] = x[[p, j]]
        km = min(kl, n - 1 - j)
        if km:
            x[j + 1:j + 1 + km] -= np.outer(ab[kv + 1:kv + km + 1, j], x[j])
    for j in range(n - 1, -1, -1):
        x[j] /= ab[kv, j]
        lo = max(0, j - kv)
        if lo < j:
            x[lo:j] -= np.outer(ab[kv - j + np.arange(lo, j), j], x[j])
    return x


def banded_solve(a: CscMatrix, b, kl: int, ku: int, hermitian_pos_diag: bool = False):
    """Solve a banded system: band Cholesky when the matrix qualifies, else band LU.

    Returns ``(x, used_cholesky)``.
    """
    b2, vec = _rhs(a, b)
    x = None
    if hermitian_pos_diag and kl == ku:
        lb = band_cholesky(a, kl)
        if lb is not None:
            x = band_cholesky_solve(lb, b2)
    used_chol = x is not None
    if x is None:
        ab, ipiv = band_lu(a, kl, ku)
        x = band_lu_solve(ab, ipiv, kl, ku, b2)
    return (x[:, 0] if vec else x), used_chol
