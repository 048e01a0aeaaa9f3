"""Orderings and graph algorithms on sparsity patterns.

All permutations are returned as int64 arrays mapping new position to old
index, so ``a[p, :]`` means row ``p[k]`` of ``a`` becomes row ``k``.  Ties
are always broken towards the lowest original index, which keeps every
ordering deterministic.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import CscMatrix, ValueKind
from .errors import DomainError, ShapeError
from .ops import pattern_union_transpose, permute, transpose


def is_permutation(p, n: int | None = None) -> bool:
    p = np.asarray(p)
    n = len(p) if n is None else n
    return len(p) == n and np.array_equal(np.sort(p), np.arange(n))


def inverse_permutation(p) -> np.ndarray:
    p = np.asarray(p, dtype=np.int64)
    inv = np.empty_like(p)
    inv[p] = np.arange(len(p), dtype=np.int64)
    return inv


def _columns(a: CscMatrix) -> list[list[int]]:
    a = a.compressed(remove_zeros=True)
    cidx, rows = a.cidx.tolist(), a.rows().tolist()
    return [rows[cidx[j]:cidx[j + 1]] for j in range(a.ncols)]


# -- trivial orderings ----------------------------------------------------------------


def colperm(a: CscMatrix) -> np.ndarray:
    """Columns sorted by ascending nonzero count (stable)."""
    counts = np.diff(a.compressed(remove_zeros=True).cidx)
    return np.argsort(counts, kind="stable").astype(np.int64)


def randperm(n: int, seed=None) -> np.ndarray:
    return np.random.default_rng(seed).permutation(n).astype(np.int64)


# -- approximate minimum degree ------------------------------------------------------


def amd_order(a: CscMatrix, mode: str = "symmetric") -> np.ndarray:
    """Approximate minimum degree ordering.

    ``mode="symmetric"`` orders the graph of ``a + a'``; ``mode="column"``
    orders the columns for the graph of ``a' a`` without forming it: each
    row of ``a`` starts out as an element (a clique of the columns it
    touches).

    The elimination runs on a quotient graph of variables and elements.
    Degrees are the approximate external degrees, elements covered by a new
    pivot's element are absorbed, and there is no supervariable detection.
    """
    if mode == "symmetric":
        if a.nrows != a.ncols:
            raise ShapeError("symmetric ordering needs a square matrix")
        n = a.ncols
        cols = _columns(pattern_union_transpose(a))
        adj = [set(c) - {j} for j, c in enumerate(cols)]
        elems: list[set] = [set() for _ in range(n)]
        evars: dict[int, set] = {}
        degree = [len(s) for s in adj]
    elif mode == "column":
        n = a.ncols
        at = transpose(a.astype(ValueKind.PATTERN))
        adj = [set() for _ in range(n)]
        elems = [set() for _ in range(n)]
        evars = {}
        for r, row_cols in enumerate(_columns(at)):
            if row_cols:
                e = n + r
                evars[e] = set(row_cols)
                for j in row_cols:
                    elems[j].add(e)
        degree = []
        for j in range(n):
            reach = set()
            for e in elems[j]:
                reach |= evars[e]
            reach.discard(j)
            degree.append(len(reach))
    else:
        raise DomainError(f"unknown ordering mode {mode!r}")

    heap = [(d, j) for j, d in enumerate(degree)]
    heapq.heapify(heap)
    done = [False] * n
    order = []
    while heap:
        d, p = heapq.heappop(heap)
        if done[p] or d != degree[p]:
            continue
        done[p] = True
        order.append(p)
        remaining = n - len(order)

        # the pivot's element: its variable neighbours plus all adjacent elements
        lp = set(adj[p])
        absorbed = elems[p]
        for e in absorbed:
            lp |= evars.pop(e)
        lp.discard(p)
        evars[p] = lp
        adj[p] = set()
        elems[p] = set()

        for i in lp:
            adj[i] -= lp
            adj[i].discard(p)
            elems[i] -= absorbed
            elems[i].add(p)

        # w[e] = |Le \ Lp| for every element touching Lp
        w: dict[int, int] = {}
        for i in lp:
            for e in elems[i]:
                if e != p:
                    w[e] = w.get(e, len(evars[e])) - 1
        for e, we in w.items():
            if we == 0:
                for i in evars.pop(e):
                    elems[i].discard(e)

        nlp = len(lp)
        for i in lp:
            ext = len(adj[i]) + nlp - 1
            for e in elems[i]:
                if e != p:
                    ext += w[e]
            new = min(remaining - 1, degree[i] + nlp - 1, ext)
            if new != degree[i]:
                degree[i] = new
            heapq.heappush(heap, (degree[i], i))
    return np.asarray(order, dtype=np.int64)


# -- elimination tree ------------------------------------------------------------------


class ETree(NamedTuple):
    parent: np.ndarray
    postorder: np.ndarray


def _parents(a: CscMatrix, variant: str) -> np.ndarray:
    m, n = a.shape
    cols = _columns(a)
    parent = [-1] * n
    ancestor = [-1] * n
    prev = [-1] * m if variant == "AtA" else None
    for k in range(n):
        for r in cols[k]:
            if prev is None:
                i = r
            else:
                i = prev[r]
                prev[r] = k
            while i != -1 and i < k:
                nxt = ancestor[i]
                ancestor[i] = k
                if nxt == -1:
                    parent[i] = k
                    break
                i = nxt
    return np.asarray(parent, dtype=np.int64)


def postorder(parent) -> np.ndarray:
    """Depth-first postorder of a forest; children are visited in increasing order."""
    parent = np.asarray(parent)
    n = len(parent)
    children: list[list[int]] = [[] for _ in range(n)]
    roots = []
    for j in range(n):
        (roots if parent[j] < 0 else children[parent[j]]).append(j)
    out = []
    for r in roots:
        stack = [(r, 0)]
        while stack:
            v, k = stack.pop()
            if k < len(children[v]):
                stack.append((v, k + 1))
                stack.append((children[v][k], 0))
            else:
                out.append(v)
    return np.asarray(out, dtype=np.int64)


def etree(a: CscMatrix, variant: str = "A") -> ETree:
    """Elimination tree of a symmetric pattern (``variant="A"``, upper part used) or of ``a' a``.

    Uses path compression on ancestors, so it runs in nearly linear time
    without forming the factor.  Roots have parent ``-1``.
    """
    if variant == "A":
        if a.nrows != a.ncols:
            raise ShapeError("etree of A needs a square matrix")
    elif variant != "AtA":
        raise DomainError(f"unknown etree variant {variant!r}")
    parent = _parents(a, variant)
    return ETree(parent, postorder(parent))


class SymbolicFactor(NamedTuple):
    counts: np.ndarray
    total: int
    parent: np.ndarray


def symbfact(a: CscMatrix, order=None) -> SymbolicFactor:
    """Column counts of the Cholesky factor of ``P (A + A') P'`` without factorizing.

    Each row of the factor is a subtree of the elimination tree, reached by
    walking up from the entries of that row of the matrix.
    """
    if a.nrows != a.ncols:
        raise ShapeError("symbolic factorization needs a square matrix")
    n = a.ncols
    c = pattern_union_transpose(a)
    if order is not None:
        c = permute(c, order, order)
    parent = _parents(c, "A").tolist()
    cols = _columns(c)
    counts = [0] * n
    mark = [-1] * n
    for k in range(n):
        mark[k] = k
        counts[k] += 1
        for i in cols[k]:
            while i < k and mark[i] != k:
                counts[i] += 1
                mark[i] = k
                i = parent[i]
    counts = np.asarray(counts, dtype=np.int64)
    return SymbolicFactor(counts, int(counts.sum()), np.asarray(parent, dtype=np.int64))


# -- Dulmage-Mendelsohn ------------------------------------------------------------------


def maximum_matching(a: CscMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Hopcroft-Karp maximum bipartite matching of columns to rows.

    Returns ``(row_of_col, col_of_row)`` with ``-1`` for unmatched vertices.
    """
    m, n = a.shape
    adj = _columns(a)
    match_col = [-1] * n
    match_row = [-1] * m
    # cheap greedy start
    for j in range(n):
        for i in adj[j]:
            if match_row[i] == -1:
                match_row[i] = j
                match_col[j] = i
                break
    inf = n + 1
    while True:
        dist = [inf] * n
        queue = deque()
        for j in range(n):
            if match_col[j] == -1:
                dist[j] = 0
                queue.append(j)
        found = False
        while queue:
            j = queue.popleft()
            for i in adj[j]:
                j2 = match_row[i]
                if j2 == -1:
                    found = True
                elif dist[j2] == inf:
                    dist[j2] = dist[j] + 1
                    queue.append(j2)
        if not found:
            break
        nxt = [0] * n
        for s in range(n):
            if match_col[s] != -1:
                continue
            cols, rows = [s], []
            while cols:
                j = cols[-1]
                if nxt[j] < len(adj[j]):
                    i = adj[j][nxt[j]]
                    nxt[j] += 1
                    j2 = match_row[i]
                    if j2 == -1:
                        rows.append(i)
                        for jj, ii in zip(cols, rows):
                            match_col[jj] = ii
                            match_row[ii] = jj
                        break
                    if dist[j2] == dist[j] + 1:
                        cols.append(j2)
                        rows.append(i)
                else:
                    dist[j] = inf
                    cols.pop()
                    if rows:
                        rows.pop()
    return np.asarray(match_col, dtype=np.int64), np.asarray(match_row, dtype=np.int64)


def strongly_connected_components(succ: list[list[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative; components come out sinks first."""
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, k = work[-1]
            if k < len(succ[v]):
                work[-1] = (v, k + 1)
                w = succ[v][k]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp.append(w)
                        if w == v:
                            break
                    comps.append(sorted(comp))
    return comps


@dataclass(frozen=True)
class DmDecomposition:
    """Dulmage-Mendelsohn form of a sparse matrix.

    ``a[row_perm, :][:, col_perm]`` is block upper triangular.  Rows split
    at ``coarse_rows`` and columns at ``coarse_cols`` into the
    under-determined, well-determined and over-determined parts (each may
    be empty).  The well-determined part is split further into square
    irreducible blocks at ``fine_rows`` / ``fine_cols`` (absolute offsets).
    """

    row_perm: np.ndarray
    col_perm: np.ndarray
    coarse_rows: tuple
    coarse_cols: tuple
    fine_rows: tuple
    fine_cols: tuple
    structural_rank: int
    row_of_col: np.ndarray

    def block_bounds(self) -> tuple[list[int], list[int]]:
        """Row and column boundaries of all diagonal blocks, in order.

        The under- and over-determined parts count as one block each (and
        may be empty).
        """
        ru, rw_end, m = self.coarse_rows[1:]
        cu, cw_end, n = self.coarse_cols[1:]
        rr = [0, ru] + list(self.fine_rows[1:]) + [rw_end, m]
        cc = [0, cu] + list(self.fine_cols[1:]) + [cw_end, n]
        return rr, cc


def dmperm(a: CscMatrix) -> DmDecomposition:
    """Dulmage-Mendelsohn decomposition from a maximum matching.

    Columns reachable from unmatched columns by alternating paths form the
    under-determined part, rows reachable from unmatched rows form the
    over-determined part, and the perfectly matched remainder is split into
    strongly connected components ordered so the result is block upper
    triangular.
    """
    m, n = a.shape
    row_of_col, col_of_row = maximum_matching(a)
    cols = _columns(a)
    rows_adj = _columns(transpose(a.astype(ValueKind.PATTERN)))

    # under-determined: alternate column -> any row -> its matched column
    col_u = np.zeros(n, dtype=bool)
    row_u = np.zeros(m, dtype=bool)
    queue = deque(j for j in range(n) if row_of_col[j] == -1)
    for j in queue:
        col_u[j] = True
    while queue:
        j = queue.popleft()
        for i in cols[j]:
            if not row_u[i]:
                row_u[i] = True
                j2 = col_of_row[i]
                if j2 != -1 and not col_u[j2]:
                    col_u[j2] = True
                    queue.append(j2)

    # over-determined: alternate row -> any column -> its matched row
    row_o = np.zeros(m, dtype=bool)
    col_o = np.zeros(n, dtype=bool)
    queue = deque(i for i in range(m) if col_of_row[i] == -1)
    for i in queue:
        row_o[i] = True
    while queue:
        i = queue.popleft()
        for j in rows_adj[i]:
            if not col_o[j]:
                col_o[j] = True
                i2 = row_of_col[j]
                if i2 != -1 and not row_o[i2]:
                    row_o[i2] = True
                    queue.append(i2)

    col_w = ~(col_u | col_o)
    well = np.flatnonzero(col_w)

    # fine blocks: column j -> column j2 whenever the matched row of j touches j2
    pos = {int(j): k for k, j in enumerate(well)}
    succ = []
    for j in well:
        r = row_of_col[j]
        succ.append(sorted(pos[j2] for j2 in rows_adj[r] if j2 in pos and pos[j2] != pos[int(j)]))
    comps = strongly_connected_components(succ)[::-1]
    well_cols = [int(well[k]) for comp in comps for k in comp]
    well_rows = [int(row_of_col[j]) for j in well_cols]

    under_cols = [j for j in range(n) if col_u[j] and row_of_col[j] != -1]
    under_cols += [j for j in range(n) if col_u[j] and row_of_col[j] == -1]
    # every row reached from an unmatched column is matched (the matching is maximum)
    under_rows = [int(row_of_col[j]) for j in under_cols if row_of_col[j] != -1]
    over_cols = [j for j in range(n) if col_o[j]]
    over_rows = [int(row_of_col[j]) for j in over_cols]
    over_rows += [i for i in range(m) if row_o[i] and col_of_row[i] == -1]

    row_perm = np.asarray(under_rows + well_rows + over_rows, dtype=np.int64)
    col_perm = np.asarray(under_cols + well_cols + over_cols, dtype=np.int64)
    ru, cu = len(under_rows), len(under_cols)
    rw = len(well_rows)
    fine_r, fine_c = [], []
    off = 0
    for comp in comps:
        fine_r.append(ru + off)
        fine_c.append(cu + off)
        off += len(comp)
    return DmDecomposition(
        row_perm=row_perm,
        col_perm=col_perm,
        coarse_rows=(0, ru, ru + rw, m),
        coarse_cols=(0, cu, cu + rw, n),
        fine_rows=tuple(fine_r),
        fine_cols=tuple(fine_c),
        structural_rank=int(np.count_nonzero(row_of_col >= 0)),
        row_of_col=row_of_col,
    )
