"""Householder QR and minimum-norm least-squares solves.

``qr_minnorm_solve`` first splits the system with the Dulmage-Mendelsohn
decomposition and then works through the diagonal blocks from the bottom
up: square irreducible blocks by sparse LU, the over- and under-determined
parts (and any numerically singular square block) by a dense
rank-revealing QR.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import CscMatrix
from ..errors import SingularMatrixError
from ..ops import norm1, permute, submatrix
from ..order import dmperm
from .triangular import _as_2d


@dataclass
class HouseholderQR:
    """``a[:, perm] = Q R`` with ``Q`` kept as a list of unit reflectors."""

    R: np.ndarray
    reflectors: list
    perm: np.ndarray

    def apply_qh(self, b: np.ndarray) -> np.ndarray:
        """``Q' b``."""
        b = b.astype(np.result_type(b.dtype, self.R.dtype), copy=True)
        for k, v in enumerate(self.reflectors):
            if v is not None:
                b[k:] -= 2.0 * np.outer(v, v.conj() @ b[k:])
        return b

    def q_columns(self, r: int) -> np.ndarray:
        """First ``r`` columns of ``Q``."""
        m = self.R.shape[0]
        q = np.eye(m, r, dtype=self.R.dtype)
        for k in range(len(self.reflectors) - 1, -1, -1):
            v = self.reflectors[k]
            if v is not None:
                q[k:] -= 2.0 * np.outer(v, v.conj() @ q[k:])
        return q

    def rank(self, tol: float | None = None) -> int:
        m, n = self.R.shape
        d = np.abs(np.diag(self.R))
        if not len(d) or d[0] == 0:
            return 0
        if tol is None:
            tol = max(m, n) * np.finfo(float).eps * d[0]
        return int(np.count_nonzero(d > tol))


def householder_qr(a: np.ndarray, pivoting: bool = True) -> HouseholderQR:
    """Householder QR, with column pivoting on the largest remaining column norm."""
    r = np.array(a, dtype=np.result_type(a.dtype, np.float64), copy=True)
    m, n = r.shape
    perm = np.arange(n)
    refl = []
    for k in range(min(m, n)):
        if pivoting:
            norms = np.linalg.norm(r[k:, k:], axis=0)
            p = k + int(np.argmax(norms))
            if p != k:
                r[:, [k, p]] = r[:, [p, k]]
                perm[[k, p]] = perm[[p, k]]
        x = r[k:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0:
            refl.append(None)
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        r[k:, k:] -= 2.0 * np.outer(v, v.conj() @ r[k:, k:])
        r[k + 1:, k] = 0
        refl.append(v)
    return HouseholderQR(r, refl, perm)


def dense_minnorm(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, int]:
    """Minimum-norm least-squares solution of a dense system, and the numerical rank.

    A pivoted QR finds the rank ``r``; when ``r`` is below the column count
    the leading ``r`` rows of ``R`` are compressed by a second QR of their
    conjugate transpose (a complete orthogonal decomposition).
    """
    a = np.asarray(a)
    b2, vec = _as_2d(b)
    m, n = a.shape
    dtype = np.result_type(a.dtype, b2.dtype, np.float64)
    x = np.zeros((n, b2.shape[1]), dtype=dtype)
    if m == 0 or n == 0:
        return (x[:, 0] if vec else x), 0
    f = householder_qr(a.astype(dtype))
    r = f.rank()
    if r == 0:
        return (x[:, 0] if vec else x), 0
    c = f.apply_qh(b2.astype(dtype))[:r]
    r1 = f.R[:r, :]
    if r == n:
        y = _back_substitute(r1[:, :r], c)
    else:
        g = householder_qr(r1.conj().T, pivoting=False)
        t = g.R[:r, :r]
        w = _forward_substitute(t.conj().T, c)
        y = g.q_columns(r) @ w
    x[f.perm] = y
    return (x[:, 0] if vec else x), r


def _back_substitute(u: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = u.shape[0]
    x = b.astype(np.result_type(u.dtype, b.dtype), copy=True)
    for j in range(n - 1, -1, -1):
        x[j] /= u[j, j]
        x[:j] -= np.outer(u[:j, j], x[j])
    return x


def _forward_substitute(l: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = l.shape[0]
    x = b.astype(np.result_type(l.dtype, b.dtype), copy=True)
    for j in range(n):
        x[j] /= l[j, j]
        x[j + 1:] -= np.outer(l[j + 1:, j], x[j])
    return x


@dataclass
class MinNormInfo:
    structural_rank: int
    numerical_rank: int
    lu_blocks: int = 0
    qr_blocks: int = 0


def qr_minnorm_solve(a: CscMatrix, b, use_dm: bool = True, sing_tol: float | None = None,
                     return_info: bool = False):
    """Minimum-norm least-squares solve of any matrix, singular or rectangular.

    With ``use_dm=False`` the whole system goes to one dense rank-revealing
    QR.  Otherwise each block of the Dulmage-Mendelsohn form is solved in
    turn, bottom block first, after moving the contribution of the already
    solved columns to the right-hand side.
    """
    from .condest import rcond_estimate
    from .lu import lu_factor

    b2, vec = _as_2d(b.todense() if isinstance(b, CscMatrix) else b)
    m, n = a.shape
    dtype = np.result_type(a.data.dtype, b2.dtype, np.float64)
    if not use_dm:
        x, r = dense_minnorm(a.todense().astype(dtype), b2.astype(dtype))
        info = MinNormInfo(structural_rank=-1, numerical_rank=r, qr_blocks=1)
        x = x[:, 0] if vec else x
        return (x, info) if return_info else x

    d = dmperm(a)
    c = permute(a, d.row_perm, d.col_perm)
    rhs = b2[d.row_perm].astype(dtype)
    y = np.zeros((n, b2.shape[1]), dtype=dtype)
    rr, cc = d.block_bounds()
    nblocks = len(rr) - 1
    well = set(range(1, nblocks - 1))
    info = MinNormInfo(structural_rank=d.structural_rank, numerical_rank=0)
    for blk in range(nblocks - 1, -1, -1):
        r0, r1 = rr[blk], rr[blk + 1]
        c0, c1 = cc[blk], cc[blk + 1]
        if c1 == c0:
            continue
        rows = np.arange(r0, r1)
        r = rhs[r0:r1]
        if c1 < n:
            right = submatrix(c, rows, np.arange(c1, n))
            if right.nnz:
                r = r - right.todense() @ y[c1:]
        block = submatrix(c, rows, np.arange(c0, c1))
        solved = False
        if blk in well:
            try:
                f = lu_factor(block)
                tol = sing_tol if sing_tol is not None else (c1 - c0) * np.finfo(float).eps
                if rcond_estimate(f, norm1(block)) >= tol:
                    y[c0:c1] = f.solve(r)
                    info.lu_blocks += 1
                    info.numerical_rank += c1 - c0
                    solved = True
            except SingularMatrixError:
                pass
        if not solved:
            y[c0:c1], rank = dense_minnorm(block.todense().astype(dtype), r)
            info.qr_blocks += 1
            info.numerical_rank += rank
    x = np.empty_like(y)
    x[d.col_perm] = y
    x = x[:, 0] if vec else x
    return (x, info) if return_info else x
