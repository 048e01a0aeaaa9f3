"""Linear finite elements for the Laplace equation on a triangulated strip.

The pipeline is mesh, then assembly ``S = C' SE C``, then a solve with
Dirichlet and Neumann conditions, then surface polylines for plotting.
Node and element indices are 0-based throughout; the ``strip`` helpers
accept the 1-based node numbers of the classic strip example.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analyze import SolverParams
from .build import from_dense, from_triplets
from .core import CscMatrix
from .errors import DomainError, GeometryError, WellPosednessError
from .ops import matmul, submatrix, transpose
from .solve import backslash
from .viz import PlotData

STRIP_Y = (1.0, 1.2, 1.5, 1.8, 2.0)
STRIP_X = (1.0, 1.05, 1.1, 1.2, 1.3, 1.5, 1.7, 1.8, 1.9, 1.95, 2.0)


@dataclass(frozen=True)
class Mesh:
    """Simplicial mesh.

    nodes
        ``N x (D-1)`` vertex coordinates.
    elems
        ``E x D`` vertex indices of each simplex.
    conductivity
        Length-``E`` positive element conductivities.
    """

    nodes: np.ndarray
    elems: np.ndarray
    conductivity: np.ndarray

    def __post_init__(self):
        if self.elems.size and (self.elems.min() < 0 or self.elems.max() >= len(self.nodes)):
            raise DomainError("element refers to a node that does not exist")
        if len(self.conductivity) != len(self.elems):
            raise DomainError("need one conductivity per element")
        if np.any(self.conductivity <= 0):
            raise DomainError("conductivities must be positive")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elems(self) -> int:
        return len(self.elems)

    @property
    def simplex_size(self) -> int:
        return self.elems.shape[1]

    def with_conductivity(self, conductivity) -> "Mesh":
        c = np.broadcast_to(np.asarray(conductivity, dtype=float), (self.n_elems,)).copy()
        return Mesh(self.nodes, self.elems, c)


@dataclass(frozen=True)
class BoundaryConditions:
    """Prescribed potentials (Dirichlet) and fluxes (Neumann) as ``(node, value)`` pairs.

    Neumann values are used as given: callers normalize by boundary length
    and conductivity beforehand.
    """

    dirichlet: tuple = ()
    neumann: tuple = field(default=())

    def __post_init__(self):
        d = {int(i) for i, _ in self.dirichlet}
        nm = {int(i) for i, _ in self.neumann}
        if len(d) != len(self.dirichlet):
            raise DomainError("node listed twice among Dirichlet conditions")
        both = d & nm
        if both:
            raise DomainError(f"nodes {sorted(both)} carry both kinds of condition")


def build_strip_mesh() -> Mesh:
    """The 5 x 11 node strip: 55 nodes, 80 triangles, conductivity 1, 2, 1 in thirds.

    Nodes are numbered down each column of the grid first.  Each quad
    between grid columns ``w`` and ``w+1`` contributes the triangles
    ``(k, k+1, k+h)`` and ``(k+1, k+h+1, k+h)``; all first kind triangles of
    a column come before the second kind.
    """
    h, w = len(STRIP_Y), len(STRIP_X)
    gx, gy = np.meshgrid(STRIP_X, STRIP_Y)
    nodes = np.column_stack((gx.ravel(order="F"), gy.ravel(order="F")))
    k = np.arange(h - 1)
    blocks = []
    for col in range(w - 1):
        base = col * h
        blocks.append(base + np.column_stack((k, k + 1, h + k)))
        blocks.append(base + np.column_stack((k + 1, h + k + 1, h + k)))
    elems = np.vstack(blocks).astype(np.int64)
    e = len(elems)
    cond = np.concatenate((np.ones(e // 5), 2.0 * np.ones(e - 2 * (e // 5)), np.ones(e // 5)))
    return Mesh(nodes, elems, cond)


def element_stiffness(vertices: np.ndarray, conductivity: float) -> np.ndarray:
    """``D x D`` element matrix ``const * G' G``.

    ``G`` holds the rows 2..D of ``inv([1, vertices])`` (the gradients of the
    barycentric coordinates) and ``const = conductivity * 2 / (D-1)! / |det(inv)|``.
    """
    d = len(vertices)
    m = np.column_stack((np.ones(d), vertices))
    det_m = np.linalg.det(m)
    if det_m == 0 or not np.isfinite(det_m):
        raise GeometryError("degenerate element")
    a = np.linalg.inv(m)
    const = conductivity * 2.0 / math.factorial(d - 1) / abs(1.0 / det_m)
    g = a[1:, :]
    return const * (g.T @ g)


def _as_sparse(x) -> CscMatrix:
    return x if isinstance(x, CscMatrix) else from_dense(x)


def assemble_system(mesh: Mesh) -> tuple[CscMatrix, CscMatrix, CscMatrix]:
    """Global stiffness ``S``, block-diagonal element matrix ``SE`` and connectivity ``C``.

    ``C`` is ``DE x N`` with a one at ``(e*D + k, elems[e, k])``, and
    ``S = C' SE C``.
    """
    e, d = mesh.elems.shape
    n = mesh.n_nodes
    blocks = np.empty((e, d, d))
    for j in range(e):
        blocks[j] = element_stiffness(mesh.nodes[mesh.elems[j]], mesh.conductivity[j])
    local = np.arange(d)
    offs = (np.arange(e) * d)[:, None, None]
    si = np.broadcast_to(offs + local[:, None], (e, d, d)).ravel()
    sj = np.broadcast_to(offs + local[None, :], (e, d, d)).ravel()
    se = from_triplets(si, sj, blocks.ravel(), d * e, d * e)
    c = from_triplets(np.arange(d * e), mesh.elems.ravel(), np.ones(d * e), d * e, n)
    s = _as_sparse(matmul(transpose(c), _as_sparse(matmul(se, c))))
    return s, se, c


def solve_bvp(s: CscMatrix, bc: BoundaryConditions, params: SolverParams | None = None):
    """Node potentials with Dirichlet values imposed and the rest solved for.

    The free block solves ``S[f, f] V[f] = Q[f] - S[f, d] V[d]`` with the
    general left-division operator.  Returns ``(V, SolveReport)``; the
    report is ``None`` when every node is prescribed.
    """
    n = s.nrows
    if not bc.dirichlet:
        raise WellPosednessError("at least one Dirichlet node is needed")
    dn = np.array([int(i) for i, _ in bc.dirichlet], dtype=np.int64)
    dv = np.array([float(v) for _, v in bc.dirichlet])
    if dn.min() < 0 or dn.max() >= n:
        raise DomainError("Dirichlet node out of range")
    q = np.zeros(n)
    for i, v in bc.neumann:
        q[int(i)] = v
    v = np.zeros(n)
    v[dn] = dv
    free = np.setdiff1d(np.arange(n), dn)
    if not len(free):
        return v, None
    rhs = q[free] - matmul(submatrix(s, free, dn), dv)
    x, report = backslash(submatrix(s, free, free), rhs, params)
    v[free] = x
    return v, report


def strip_boundary_conditions(low: float = 10.0, high: float = 20.0) -> BoundaryConditions:
    """Nodes 1-5 (left edge) held at ``low`` and 51-55 (right edge) at ``high``, 1-based."""
    left = [(i - 1, low) for i in range(1, 6)]
    right = [(i - 1, high) for i in range(51, 56)]
    return BoundaryConditions(dirichlet=tuple(left + right))


def boundary_currents(s: CscMatrix, v: np.ndarray, nodes) -> float:
    """Net current ``sum((S V)[nodes])`` flowing into the given nodes."""
    return float(np.sum(matmul(s, v)[np.asarray(nodes)]))


def surface_data(mesh: Mesh, v) -> PlotData:
    """Closed ``(x, y, V)`` polyline per element: vertices 1, 2, 3, 1."""
    v = np.asarray(v, dtype=float)
    if len(v) != mesh.n_nodes:
        raise DomainError(f"need {mesh.n_nodes} potentials, got {len(v)}")
    closed = np.column_stack((mesh.elems, mesh.elems[:, 0])).ravel()
    rec = np.column_stack((mesh.nodes[closed, 0], mesh.nodes[closed, 1], v[closed]))
    return PlotData("segments", rec, mesh.n_nodes, mesh.n_nodes, group=mesh.simplex_size + 1)
