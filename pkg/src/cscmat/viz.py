"""Plot-ready data for matrix structure, graphs, and trees.

Nothing here draws: each function returns a ``PlotData`` whose records can
be written as plain text (``write_plot_data``) and handed to any plotting
tool.  Coordinates are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .core import CscMatrix
from .errors import ShapeError, StructureError


@dataclass(frozen=True)
class PlotData:
    """Plot records with their metadata.

    kind
        ``points`` (one ``x y`` row per record), ``segments`` (``x1 y1 x2
        y2``, or groups of consecutive vertices forming polylines when
        ``group > 1``), or ``tree`` (``x y parent`` per node).
    records
        Two-dimensional float array, one row per record.
    nrows, ncols
        Dimensions of the source matrix (or node count for graphs).
    group
        Number of consecutive records that make up one polyline.
    """

    kind: str
    records: np.ndarray
    nrows: int
    ncols: int
    group: int = 1

    @property
    def count(self) -> int:
        return len(self.records)


def spy_data(a: CscMatrix) -> PlotData:
    """One ``(column, row)`` point per stored nonzero."""
    c = a.compressed(remove_zeros=True)
    pts = np.column_stack((c.column_of_entries(), c.rows())).astype(float)
    return PlotData("points", pts.reshape(-1, 2), a.nrows, a.ncols)


def gplot_data(a: CscMatrix, xy) -> PlotData:
    """One segment from ``xy[i]`` to ``xy[j]`` per stored nonzero ``(i, j)``.

    Self loops give zero-length segments.
    """
    xy = np.asarray(xy, dtype=float)
    if a.nrows != a.ncols:
        raise ShapeError("adjacency matrix must be square")
    if xy.ndim != 2 or xy.shape != (a.nrows, 2):
        raise ShapeError(f"need {a.nrows} coordinate pairs, got array of shape {xy.shape}")
    c = a.compressed(remove_zeros=True)
    i, j = c.rows(), c.column_of_entries()
    seg = np.hstack((xy[i], xy[j])).reshape(-1, 4)
    return PlotData("segments", seg, a.nrows, a.ncols)


def tree_depths(parent) -> np.ndarray:
    """Depth of every node of a forest (roots have parent < 0 and depth 0)."""
    parent = np.asarray(parent, dtype=np.int64)
    n = len(parent)
    if np.any(parent >= n):
        raise StructureError("parent index out of range")
    depth = np.full(n, -1, dtype=np.int64)
    for v in range(n):
        path, on_path = [], set()
        u = v
        while u >= 0 and depth[u] < 0:
            if u in on_path:
                raise StructureError(f"cycle through node {u}")
            path.append(u)
            on_path.add(u)
            u = parent[u]
        base = -1 if u < 0 else depth[u]
        for k, w in enumerate(reversed(path)):
            depth[w] = base + 1 + k
    return depth


def treeplot_data(parent) -> PlotData:
    """Layered layout of a forest.

    ``y`` is the depth (roots at 0, growing downwards).  Leaves get
    consecutive ``x`` values in depth-first order and every other node sits
    at the mean ``x`` of its children.  Records are ``x y parent``.
    """
    parent = np.asarray(parent, dtype=np.int64)
    n = len(parent)
    depth = tree_depths(parent)
    children: list[list[int]] = [[] for _ in range(n)]
    roots = []
    for v in range(n):
        (roots if parent[v] < 0 else children[parent[v]]).append(v)
    x = np.zeros(n)
    leaf = 0
    for r in roots:
        stack = [(r, 0)]
        while stack:
            v, k = stack.pop()
            if k < len(children[v]):
                stack.append((v, k + 1))
                stack.append((children[v][k], 0))
            elif not children[v]:
                x[v] = leaf
                leaf += 1
            else:
                x[v] = np.mean(x[children[v]])
    rec = np.column_stack((x, depth.astype(float), parent.astype(float)))
    return PlotData("tree", rec.reshape(-1, 3), n, n)


def etreeplot_data(a: CscMatrix) -> PlotData:
    """Tree layout of the elimination tree of ``a + a'``."""
    from .ops import pattern_union_transpose
    from .order import etree

    return treeplot_data(etree(pattern_union_transpose(a)).parent)


def _fmt(v: float) -> str:
    v = float(v)
    return str(int(v)) if np.isfinite(v) and v == int(v) else repr(v)


def write_plot_data(pd: PlotData, out: TextIO) -> None:
    """Header ``kind nrows ncols count``, then one space-separated record per line.

    Polyline groups are separated by blank lines.
    """
    out.write(f"{pd.kind} {pd.nrows} {pd.ncols} {pd.count}\n")
    for k, row in enumerate(pd.records):
        if pd.group > 1 and k and k % pd.group == 0:
            out.write("\n")
        out.write(" ".join(_fmt(v) for v in row) + "\n")


def read_plot_data(stream: TextIO) -> PlotData:
    """Inverse of ``write_plot_data``."""
    header = stream.readline().split()
    if len(header) != 4:
        raise ValueError("bad plot data header")
    kind, nrows, ncols, count = header[0], int(header[1]), int(header[2]), int(header[3])
    rows, group, run = [], 1, 0
    for line in stream:
        if not line.strip():
            group = max(group, run)
            run = 0
            continue
        rows.append([float(t) for t in line.split()])
        run += 1
    if group > 1:
        group = max(group, run)
    rec = np.asarray(rows, dtype=float)
    if len(rec) != count:
        raise ValueError(f"header promises {count} records, found {len(rec)}")
    return PlotData(kind, rec, nrows, ncols, group)
