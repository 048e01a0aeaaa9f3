"""Reciprocal condition estimation in the 1-norm."""

from __future__ import annotations

import numpy as np


def _sign(y: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(y):
        mag = np.abs(y)
        out = np.ones_like(y)
        nz = mag > 0
        out[nz] = y[nz] / mag[nz]
        return out
    return np.where(y >= 0, 1.0, -1.0)


def inverse_norm1_estimate(solve, solve_h, n: int, dtype=float, max_iter: int = 5) -> float:
    """Lower bound on ``||A^-1||_1`` from a few solves with ``A`` and ``A'``.

    The iteration moves to the unit vector selected by the largest entry of
    ``A^-H sign(A^-1 x)`` until that stops improving the estimate; the result is
    then compared with one solve against an alternating-sign vector, which
    catches matrices that defeat the gradient steps.
    """
    if n == 0:
        return 0.0
    x = np.full(n, 1.0 / n, dtype=dtype)
    est = 0.0
    last_j = -1
    for it in range(max_iter):
        y = solve(x)
        new = float(np.abs(y).sum())
        if not np.isfinite(new):
            return np.inf
        if it > 0 and new <= est:
            break
        est = new
        z = solve_h(_sign(y))
        j = int(np.argmax(np.abs(z)))
        if it > 0 and (j == last_j or np.abs(z[j]) <= np.real(np.vdot(z, x))):
            break
        x = np.zeros(n, dtype=dtype)
        x[j] = 1.0
        last_j = j
    steps = np.arange(n)
    alt = (-1.0) ** steps * (1.0 + steps / max(n - 1, 1))
    y = solve(alt.astype(dtype))
    return max(est, 2.0 * float(np.abs(y).sum()) / (3.0 * n))


def rcond_estimate(f, norm1_a: float) -> float:
    """Estimated ``1 / (||A||_1 ||A^-1||_1)`` from a factorization exposing ``solve``/``solve_h``."""
    n = f.n
    if n == 0:
        return np.inf
    dtype = f.L.data.dtype if f.L.data.dtype.kind == "c" else float
    inv = inverse_norm1_estimate(f.solve, f.solve_h, n, dtype=dtype)
    if norm1_a == 0 or inv == 0 or not np.isfinite(inv):
        return 0.0
    return 1.0 / (norm1_a * inv)
