"""Piecewise-linear discretization on a metric graph.

Each edge is split into a uniform chain of elements.  Nodes at vertices are
shared between all incident edge ends, which imposes continuity strongly and
makes the Kirchhoff balance the natural variational condition at free
vertices.  Dirichlet vertices carry constrained (zero) degrees of freedom.

Slopes are element-wise constant, so the p-Dirichlet energy is integrated
exactly; the |u|^p mass integrals use 3-point Gauss per element.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GraphError, ZeroFunctionError
from .graph import MetricGraph, validate
from .ptrig import _as_p

# 3-point Gauss-Legendre rule on the reference element [0, 1]
_GAUSS_X = np.array([0.5 - math.sqrt(15.0) / 10.0, 0.5, 0.5 + math.sqrt(15.0) / 10.0])
_GAUSS_W = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])
_NORM_FLOOR = 1e-280


@dataclass(frozen=True)
class Mesh:
    graph: MetricGraph
    h_target: float
    counts: dict            # edge id -> element count
    n_nodes: int
    vertex_node: dict       # vertex id -> node index
    edge_nodes: dict        # edge id -> node indices along the edge (tail..head)
    elem_left: np.ndarray
    elem_right: np.ndarray
    elem_h: np.ndarray
    edge_elems: dict        # edge id -> slice into the element arrays
    dirichlet_nodes: np.ndarray
    free_nodes: np.ndarray


def build_mesh(graph: MetricGraph, h_target: float) -> Mesh:
    """Uniform per-edge subdivision with n_e = ceil(length/h_target).

    Loops get at least 3 elements so interior unknowns always exist.
    """
    validate(graph)
    if not h_target > 0:
        raise GraphError("bad-mesh", f"h_target must be positive, got {h_target!r}")
    counts = {}
    for e in graph.edges:
        n = max(1, math.ceil(e.length / h_target - 1e-12))
        if e.tail == e.head:
            n = max(n, 3)
        counts[e.id] = n
    return _assemble(graph, counts, h_target)


def build_mesh_from_counts(graph: MetricGraph, counts: dict) -> Mesh:
    """Mesh with prescribed per-edge element counts (matched-mesh studies)."""
    validate(graph)
    for e in graph.edges:
        n = counts.get(e.id)
        if not (isinstance(n, int) and n >= 1):
            raise GraphError("bad-mesh", f"element count for edge {e.id!r} must be a positive integer")
        if e.tail == e.head and n < 2:
            raise GraphError("bad-mesh", f"loop edge {e.id!r} needs at least 2 elements")
    h = max(e.length / counts[e.id] for e in graph.edges)
    return _assemble(graph, dict(counts), h)


def _assemble(graph: MetricGraph, counts: dict, h_target: float) -> Mesh:
    vertex_node = {v: i for i, v in enumerate(sorted(graph.vertices))}
    next_node = len(vertex_node)
    edge_nodes = {}
    left, right, sizes = [], [], []
    edge_elems = {}
    for e in graph.edges:
        n = counts[e.id]
        interior = list(range(next_node, next_node + n - 1))
        next_node += n - 1
        nodes = [vertex_node[e.tail]] + interior + [vertex_node[e.head]]
        edge_nodes[e.id] = np.array(nodes, dtype=np.intp)
        start = len(left)
        h = e.length / n
        for k in range(n):
            left.append(nodes[k])
            right.append(nodes[k + 1])
            sizes.append(h)
        edge_elems[e.id] = slice(start, start + n)
    dirichlet = np.array(sorted(vertex_node[v] for v in graph.dirichlet), dtype=np.intp)
    mask = np.ones(next_node, dtype=bool)
    mask[dirichlet] = False
    return Mesh(
        graph=graph,
        h_target=h_target,
        counts=counts,
        n_nodes=next_node,
        vertex_node=vertex_node,
        edge_nodes=edge_nodes,
        elem_left=np.array(left, dtype=np.intp),
        elem_right=np.array(right, dtype=np.intp),
        elem_h=np.array(sizes, dtype=float),
        edge_elems=edge_elems,
        dirichlet_nodes=dirichlet,
        free_nodes=np.nonzero(mask)[0],
    )


@dataclass(frozen=True)
class DiscreteFunction:
    """Continuous piecewise-linear function; one value per free node, zero on Dirichlet nodes."""

    mesh: Mesh
    values: np.ndarray

    @classmethod
    def zeros(cls, mesh: Mesh) -> "DiscreteFunction":
        return cls(mesh, np.zeros(mesh.free_nodes.size))

    @classmethod
    def from_node_values(cls, mesh: Mesh, nodal) -> "DiscreteFunction":
        """Keep the free entries of a full nodal vector (constrained ones are dropped)."""
        nodal = np.asarray(nodal, dtype=float)
        if nodal.shape != (mesh.n_nodes,):
            raise GraphError("bad-function", f"expected {mesh.n_nodes} nodal values, got {nodal.shape}")
        return cls(mesh, nodal[mesh.free_nodes].copy())

    def node_values(self) -> np.ndarray:
        z = np.zeros(self.mesh.n_nodes)
        z[self.mesh.free_nodes] = self.values
        return z


def _element_index(mesh: Mesh, edges) -> np.ndarray:
    if edges is None:
        return slice(None)
    picked = []
    for eid in edges:
        mesh.graph.edge(eid)  # raises on unknown id
        picked.append(np.arange(mesh.edge_elems[eid].start, mesh.edge_elems[eid].stop))
    return np.concatenate(picked) if picked else np.array([], dtype=np.intp)


def integrate_power(mesh: Mesh, nodal: np.ndarray, p, edges=None) -> float:
    """integral of |u|^p over the graph (or over selected edges), 3-point Gauss."""
    p = _as_p(p)
    idx = _element_index(mesh, edges)
    zl = nodal[mesh.elem_left[idx]]
    zr = nodal[mesh.elem_right[idx]]
    h = mesh.elem_h[idx]
    u = np.outer(1.0 - _GAUSS_X, zl) + np.outer(_GAUSS_X, zr)
    return float(h @ (_GAUSS_W @ np.abs(u) ** p))


def integrate_slope_power(mesh: Mesh, nodal: np.ndarray, p, edges=None) -> float:
    """integral of |u'|^p; exact because the slope is constant per element."""
    p = _as_p(p)
    idx = _element_index(mesh, edges)
    s = (nodal[mesh.elem_right[idx]] - nodal[mesh.elem_left[idx]]) / mesh.elem_h[idx]
    return float(np.abs(s) ** p @ mesh.elem_h[idx])


def _rayleigh_parts(mesh: Mesh, nodal: np.ndarray, p: float):
    """Gradient of the Rayleigh quotient on the full nodal vector, plus R and the mass.

    Component i is p*(int |u'|^(p-2) u' phi_i' - R(u) int |u|^(p-2) u phi_i) / int |u|^p
    against the hat basis; constrained components are zeroed.
    """
    zl = nodal[mesh.elem_left]
    zr = nodal[mesh.elem_right]
    h = mesh.elem_h
    s = (zr - zl) / h
    flux = np.sign(s) * np.abs(s) ** (p - 1.0)
    energy = float(np.abs(s) ** p @ h)
    u = np.outer(1.0 - _GAUSS_X, zl) + np.outer(_GAUSS_X, zr)
    npow = float(h @ (_GAUSS_W @ np.abs(u) ** p))
    if not (npow > _NORM_FLOOR and math.isfinite(npow)):
        raise ZeroFunctionError("function is numerically zero; Rayleigh quotient undefined")
    lam = energy / npow
    uflux = np.sign(u) * np.abs(u) ** (p - 1.0)
    n = mesh.n_nodes
    g_num = np.bincount(mesh.elem_left, weights=-flux, minlength=n) + np.bincount(
        mesh.elem_right, weights=flux, minlength=n
    )
    g_mass = np.bincount(mesh.elem_left, weights=h * ((_GAUSS_W * (1.0 - _GAUSS_X)) @ uflux), minlength=n)
    g_mass += np.bincount(mesh.elem_right, weights=h * ((_GAUSS_W * _GAUSS_X) @ uflux), minlength=n)
    grad = p * (g_num - lam * g_mass) / npow
    grad[mesh.dirichlet_nodes] = 0.0
    return grad, lam, npow


def lp_norm_p(u: DiscreteFunction, p, edges=None) -> float:
    """p-th power of the L^p norm, integral of |u|^p."""
    return integrate_power(u.mesh, u.node_values(), p, edges=edges)


def dirichlet_energy_p(u: DiscreteFunction, p, edges=None) -> float:
    """integral of |u'|^p (exact for piecewise-linear u)."""
    return integrate_slope_power(u.mesh, u.node_values(), p, edges=edges)


def rayleigh_quotient(u: DiscreteFunction, p) -> float:
    """dirichlet_energy_p / lp_norm_p; raises ZeroFunctionError on the zero function."""
    p = _as_p(p)
    nodal = u.node_values()
    npow = integrate_power(u.mesh, nodal, p)
    if not (npow > _NORM_FLOOR and math.isfinite(npow)):
        raise ZeroFunctionError("function is numerically zero; Rayleigh quotient undefined")
    return integrate_slope_power(u.mesh, nodal, p) / npow


def rayleigh_gradient(u: DiscreteFunction, p) -> DiscreteFunction:
    """Euclidean gradient of the Rayleigh quotient; zero exactly at discrete eigenfunctions."""
    p = _as_p(p)
    grad, _, _ = _rayleigh_parts(u.mesh, u.node_values(), p)
    return DiscreteFunction.from_node_values(u.mesh, grad)


def node_coordinates(mesh: Mesh, edge_id: str) -> np.ndarray:
    """Coordinates (from the tail) of the nodes along one edge."""
    e = mesh.graph.edge(edge_id)
    n = mesh.counts[edge_id]
    return np.arange(n + 1) * (e.length / n)


def function_to_csv(u: DiscreteFunction) -> str:
    """CSV rows (edge id, x, u(x)) at the mesh nodes."""
    z = u.node_values()
    lines = ["edge,x,u"]
    for e in u.mesh.graph.edges:
        xs = node_coordinates(u.mesh, e.id)
        for x, node in zip(xs, u.mesh.edge_nodes[e.id]):
            lines.append(f"{e.id},{x:.12g},{z[node]:.12g}")
    return "\n".join(lines) + "\n"
