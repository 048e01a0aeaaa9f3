"""Reference implementations used only by the tests.

Each oracle works on dense numpy arrays and shares no code with the
library, so agreement between the two is evidence rather than tautology.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations

import numpy as np


def dense_accumulate(rows, cols, vals, m, n, dtype=float):
    out = np.zeros((m, n), dtype=dtype)
    for i, j, v in zip(rows, cols, vals):
        out[i, j] += v
    return out


def max_matching_size(pattern: np.ndarray) -> int:
    """Maximum bipartite matching by exhaustive search over column subsets."""
    pat = np.asarray(pattern, dtype=bool)
    m, n = pat.shape
    adj = tuple(tuple(int(j) for j in np.flatnonzero(pat[i])) for i in range(m))

    @lru_cache(maxsize=None)
    def best(i: int, used: int) -> int:
        if i == m:
            return 0
        out = best(i + 1, used)
        for j in adj[i]:
            if not used >> j & 1:
                out = max(out, 1 + best(i + 1, used | 1 << j))
        return out

    return best(0, 0)


def max_matching_by_permutation(pattern: np.ndarray) -> int:
    """Same quantity by trying every row-to-column assignment (tiny inputs only)."""
    pat = np.asarray(pattern, dtype=bool)
    m, n = pat.shape
    if m > n:
        pat = pat.T
        m, n = n, m
    best = 0
    for cols in permutations(range(n), m):
        best = max(best, sum(bool(pat[i, c]) for i, c in enumerate(cols)))
    return best


def symbolic_cholesky(pattern: np.ndarray) -> np.ndarray:
    """Boolean pattern of the Cholesky factor by dense elimination-graph fill."""
    p = np.asarray(pattern, dtype=bool)
    p = p | p.T
    n = len(p)
    filled = p.copy()
    np.fill_diagonal(filled, True)
    for k in range(n):
        below = np.flatnonzero(filled[k + 1:, k]) + k + 1
        for a in below:
            filled[below, a] = True
            filled[a, below] = True
    return np.tril(filled)


def etree_by_definition(pattern: np.ndarray) -> np.ndarray:
    """Parent of column j = first off-diagonal row of column j in the factor."""
    low = symbolic_cholesky(pattern)
    n = len(low)
    parent = np.full(n, -1)
    for j in range(n):
        rows = np.flatnonzero(low[j + 1:, j])
        if len(rows):
            parent[j] = j + 1 + rows[0]
    return parent


def cond1(a: np.ndarray) -> float:
    return np.abs(a).sum(axis=0).max() * np.abs(np.linalg.inv(a)).sum(axis=0).max()


def minnorm_lstsq(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.linalg.pinv(a) @ b


def scaled_residual(a: np.ndarray, x, b) -> float:
    """``||A x - b||_inf / (||A||_1 ||x||_inf + ||b||_inf)``."""
    x = np.asarray(x)
    b = np.asarray(b)
    r = np.abs(a @ x - b).max()
    den = np.abs(a).sum(axis=0).max() * np.abs(x).max() + np.abs(b).max()
    return r / den if den else r


def column_stats(a: np.ndarray):
    """Per-column nonzero count, mean and sample variance of the nonzeros."""
    n = a.shape[1]
    count = np.zeros(n, dtype=int)
    mean = np.full(n, np.nan, dtype=np.result_type(a.dtype, float))
    var = np.full(n, np.nan)
    for j in range(n):
        v = a[:, j][a[:, j] != 0]
        count[j] = len(v)
        if len(v):
            mean[j] = v.mean()
        if len(v) > 1:
            var[j] = np.var(v, ddof=1)
    return count, mean, var


def same_with_nans(got, want, rtol: float = 1e-13) -> bool:
    """Equal NaN and infinity placement, finite values within ``rtol`` of the largest finite magnitude."""
    got = np.asarray(got)
    want = np.asarray(want)
    if got.shape != want.shape:
        return False
    for part in ((np.real, np.imag) if np.iscomplexobj(got) or np.iscomplexobj(want) else (np.real,)):
        g, w = part(got), part(want)
        if not np.array_equal(np.isnan(g), np.isnan(w)):
            return False
        if not np.array_equal(np.isposinf(g), np.isposinf(w)):
            return False
        if not np.array_equal(np.isneginf(g), np.isneginf(w)):
            return False
        fin = np.isfinite(w)
        if fin.any():
            scale = max(np.abs(w[fin]).max(), 1.0)
            if np.abs(g[fin] - w[fin]).max() > rtol * scale:
                return False
    return True


def grid_laplacian(k: int) -> tuple[list, list, list, int]:
    """Triplets of the 5-point Laplacian on a ``k x k`` grid."""
    rows, cols, vals = [], [], []
    for x in range(k):
        for y in range(k):
            i = x * k + y
            rows.append(i)
            cols.append(i)
            vals.append(4.0)
            for dx, dy in ((1, 0), (0, 1), (-1, 0), (0, -1)):
                if 0 <= x + dx < k and 0 <= y + dy < k:
                    rows.append(i)
                    cols.append((x + dx) * k + y + dy)
                    vals.append(-1.0)
    return rows, cols, vals, k * k


def block_upper_triangular(dense: np.ndarray, rr, cc) -> bool:
    """Every nonzero sits in a block row no later than its block column."""
    i, j = np.nonzero(dense)
    bi = np.searchsorted(rr, i, side="right") - 1
    bj = np.searchsorted(cc, j, side="right") - 1
    return bool(np.all(bi <= bj))
