"""First eigenpair of the p-Laplacian on a metric graph.

The eigenvalue is the infimum of the Rayleigh quotient

    R(u) = integral |u'|^p / integral |u|^p

over the continuous, piecewise-linear functions vanishing on the Dirichlet
vertices.  The solver runs projected gradient descent on the unit L^p sphere:
Barzilai-Borwein steps with a monotone backtracking safeguard, renormalizing
every iterate.  The initial guess is the distance function x -> d(x, V_D),
which is the p -> infinity extremal and an excellent basin for every p.

Certification: the weak-form gradient norm, and the Kirchhoff p-flux balance
at every free vertex (one-sided derivatives taken away from the vertex).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConvergenceError, GraphError, PLapError, ZeroFunctionError
from .graph import MetricGraph, validate, vertex_distances
from .mesh import (
    DiscreteFunction,
    Mesh,
    build_mesh,
    integrate_power,
    integrate_slope_power,
    _rayleigh_parts,
)
from .ptrig import _as_p

P_MIN = 1.05
P_MAX = 64.0
_TINY = 1e-300


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances and controls for one eigenvalue solve.

    ``h_target=None`` means 1e-3 times the shortest edge length;
    ``max_iterations=None`` means 200 per degree of freedom.  ``seed`` turns
    on a multiplicative perturbation of the initial guess (used by restarts).
    """

    h_target: float | None = None
    max_iterations: int | None = None
    lambda_rtol: float = 1e-10
    grad_tol: float = 1e-8
    seed: int | None = None
    enforce_nonnegative: bool = True
    init_noise: float = 0.5

    def __post_init__(self):
        if self.h_target is not None and not self.h_target > 0:
            raise PLapError(f"h_target must be positive, got {self.h_target!r}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise PLapError("max_iterations must be at least 1")
        if not (self.lambda_rtol > 0 and self.grad_tol > 0):
            raise PLapError("tolerances must be strictly positive")


@dataclass(frozen=True)
class Eigenpair:
    """Converged eigenvalue estimate with its normalized eigenfunction.

    ``grad_norm`` is the max-norm of the Rayleigh gradient scaled by 1/(p*lambda)
    so that it is comparable across p; ``kirchhoff`` maps every non-Dirichlet
    vertex to its absolute p-flux imbalance.
    """

    eigenvalue: float
    eigenfunction: DiscreteFunction
    p: float
    iterations: int
    grad_norm: float
    kirchhoff: dict
    converged: bool = True


def _check_p(p) -> float:
    p = _as_p(p)
    if not P_MIN <= p <= P_MAX:
        raise PLapError(
            f"p={p} outside the supported range [{P_MIN}, {P_MAX}]; "
            "use the limits module for the p->1 and p->infinity objects"
        )
    return p


def default_h(graph: MetricGraph) -> float:
    return 1e-3 * min(e.length for e in graph.edges)


def _distance_init(mesh: Mesh) -> np.ndarray:
    """Nodal samples of x -> d(x, V_D): positive off V_D, zero on it."""
    graph = mesh.graph
    dist = vertex_distances(graph, graph.dirichlet)
    z = np.zeros(mesh.n_nodes)
    for e in graph.edges:
        nodes = mesh.edge_nodes[e.id]
        x = np.arange(nodes.size) * (e.length / (nodes.size - 1))
        z[nodes] = np.minimum(dist[e.tail] + x, dist[e.head] + e.length - x)
    z[mesh.dirichlet_nodes] = 0.0
    return z


def _scaled_grad_norm(grad: np.ndarray, p: float, lam: float) -> float:
    return float(np.abs(grad).max()) / (p * max(lam, _TINY))


def _descend(mesh: Mesh, z: np.ndarray, p: float, opts: SolverOptions, max_iter: int):
    """Monotone BB descent; returns (z, lam, grad, scaled grad norm, iters, converged)."""
    z = z.copy()
    z[mesh.dirichlet_nodes] = 0.0
    npow = integrate_power(mesh, z, p)
    if not npow > _TINY:
        raise ZeroFunctionError("initial iterate is numerically zero")
    z /= npow ** (1.0 / p)
    grad, lam, _ = _rayleigh_parts(mesh, z, p)
    alpha = 0.1 * float(np.linalg.norm(z)) / max(float(np.linalg.norm(grad)), _TINY)
    z_prev = g_prev = None
    lam_change = math.inf
    it = 0
    while True:
        gnorm = _scaled_grad_norm(grad, p, lam)
        if lam_change <= opts.lambda_rtol * max(lam, _TINY) and gnorm <= opts.grad_tol:
            return z, lam, grad, gnorm, it, True
        if it >= max_iter:
            return z, lam, grad, gnorm, it, False
        if z_prev is not None:
            s = z - z_prev
            y = grad - g_prev
            sy = float(s @ y)
            alpha = float(s @ s) / sy if sy > 0 else 2.0 * alpha
            alpha = min(max(alpha, 1e-18), 1e18)
        lam_old = lam
        z_prev, g_prev = z, grad
        cand = None
        for _ in range(60):
            trial = z - alpha * grad
            tn = integrate_power(mesh, trial, p)
            if tn > _TINY:
                trial = trial / tn ** (1.0 / p)
                if integrate_slope_power(mesh, trial, p) <= lam * (1.0 + 1e-14):
                    cand = trial
                    break
            alpha *= 0.5
        if cand is None:
            # descent direction exhausted to machine precision: stationary point
            return z, lam, grad, gnorm, it, gnorm <= opts.grad_tol and lam_change <= opts.lambda_rtol * lam
        z = cand
        grad, lam, _ = _rayleigh_parts(mesh, z, p)
        lam_change = abs(lam - lam_old)
        it += 1


def solve_on_mesh(mesh: Mesh, p, opts: SolverOptions | None = None) -> Eigenpair:
    """Minimize the discrete Rayleigh quotient on an existing mesh."""
    p = _check_p(p)
    opts = opts or SolverOptions()
    if mesh.free_nodes.size == 0:
        raise GraphError("no-free-dof", "every degree of freedom is constrained; refine the mesh")
    max_iter = opts.max_iterations if opts.max_iterations is not None else 200 * mesh.free_nodes.size

    z = _distance_init(mesh)
    if opts.seed is not None:
        rng = np.random.default_rng(opts.seed)
        z[mesh.free_nodes] *= 1.0 + opts.init_noise * rng.uniform(-1.0, 1.0, mesh.free_nodes.size)

    z, lam, grad, gnorm, iters, ok = _descend(mesh, z, p, opts, max_iter)

    if opts.enforce_nonnegative:
        scale = float(np.abs(z).max())
        if float(z.min()) < -1e-8 * scale:
            # |u| has the same quotient as any sign-changing minimizer; restart once from it
            z2, lam2, grad2, gnorm2, it2, ok2 = _descend(mesh, np.abs(z), p, opts, max_iter)
            if lam2 <= lam:
                z, lam, grad, gnorm, ok = z2, lam2, grad2, gnorm2, ok2
            iters += it2
        np.clip(z, 0.0, None, out=z)
        z /= integrate_power(mesh, z, p) ** (1.0 / p)
        grad, lam, _ = _rayleigh_parts(mesh, z, p)
        gnorm = _scaled_grad_norm(grad, p, lam)

    pair = Eigenpair(
        eigenvalue=lam,
        eigenfunction=DiscreteFunction.from_node_values(mesh, z),
        p=p,
        iterations=iters,
        grad_norm=gnorm,
        kirchhoff=_kirchhoff(mesh, z, p),
        converged=ok,
    )
    if not ok:
        raise ConvergenceError(
            f"no convergence after {iters} iterations (grad {gnorm:.3e}, tol {opts.grad_tol:.1e})",
            pair,
        )
    return pair


def solve_first_eigenpair(graph: MetricGraph, p, opts: SolverOptions | None = None) -> Eigenpair:
    """Validate, mesh, and solve for the first eigenpair of the graph."""
    opts = opts or SolverOptions()
    validate(graph)
    p = _check_p(p)
    h = opts.h_target if opts.h_target is not None else default_h(graph)
    return solve_on_mesh(build_mesh(graph, h), p, opts)


def _away_slope(z: np.ndarray, nodes: np.ndarray, h: float) -> float:
    """One-sided derivative at nodes[0] pointing into the edge.

    Combines the first two element slopes (2*s1 - s2) for second-order
    accuracy; a single element falls back to its plain slope.
    """
    s1 = (z[nodes[1]] - z[nodes[0]]) / h
    if nodes.size >= 3:
        s2 = (z[nodes[2]] - z[nodes[1]]) / h
        return 2.0 * s1 - s2
    return s1


def _kirchhoff(mesh: Mesh, z: np.ndarray, p: float) -> dict:
    graph = mesh.graph
    res = {}
    for v in sorted(graph.vertices):
        if v in graph.dirichlet:
            continue
        total = 0.0
        for e in graph.incident_edges(v):
            nodes = mesh.edge_nodes[e.id]
            h = e.length / (nodes.size - 1)
            if e.tail == v:
                s = _away_slope(z, nodes, h)
                total += math.copysign(abs(s) ** (p - 1.0), s)
            if e.head == v:
                s = _away_slope(z, nodes[::-1], h)
                total += math.copysign(abs(s) ** (p - 1.0), s)
        res[v] = abs(total)
    return res


def kirchhoff_residual(pair: Eigenpair) -> dict:
    """Absolute p-flux imbalance per non-Dirichlet vertex (certification)."""
    u = pair.eigenfunction
    return _kirchhoff(u.mesh, u.node_values(), pair.p)


@dataclass(frozen=True)
class SignReport:
    changes_sign: bool
    support_edges: frozenset


def sign_structure(pair: Eigenpair, sign_tol: float = 1e-7, support_tol: float = 1e-6) -> SignReport:
    """Whether the eigenfunction takes both signs, and the edges carrying it."""
    z = pair.eigenfunction.node_values()
    scale = float(np.abs(z).max()) or 1.0
    changes = bool(z.min() < -sign_tol * scale and z.max() > sign_tol * scale)
    mesh = pair.eigenfunction.mesh
    support = frozenset(
        e.id for e in mesh.graph.edges if float(np.abs(z[mesh.edge_nodes[e.id]]).max()) > support_tol * scale
    )
    return SignReport(changes_sign=changes, support_edges=support)


@dataclass(frozen=True)
class MultiplicityReport:
    eigenvalue: float
    eigenvalues: tuple
    class_count: int
    lambda_spread: float


def multiplicity_probe(
    graph: MetricGraph,
    p,
    opts: SolverOptions | None = None,
    restarts: int = 8,
    distinct_tol: float = 1e-3,
) -> MultiplicityReport:
    """Restart the solver from perturbed seeds and count eigenfunction classes.

    All converged eigenvalues are reported (they should agree within solver
    tolerance); eigenfunctions are sup-normalized, sign-aligned, and clustered
    by pairwise max-distance below ``distinct_tol``.
    """
    if restarts < 2:
        raise PLapError("multiplicity probe needs at least 2 restarts")
    opts = opts or SolverOptions()
    validate(graph)
    p = _check_p(p)
    h = opts.h_target if opts.h_target is not None else default_h(graph)
    mesh = build_mesh(graph, h)
    base = opts.seed if opts.seed is not None else 0
    pairs = [solve_on_mesh(mesh, p, replace(opts, seed=base + k)) for k in range(restarts)]

    lams = np.array([q.eigenvalue for q in pairs])
    funcs = []
    for q in pairs:
        z = q.eigenfunction.node_values()
        funcs.append(z / float(np.abs(z).max()))

    parent = list(range(restarts))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(restarts):
        for j in range(i + 1, restarts):
            d = min(
                float(np.abs(funcs[i] - funcs[j]).max()),
                float(np.abs(funcs[i] + funcs[j]).max()),
            )
            if d <= distinct_tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj

    count = len({find(i) for i in range(restarts)})
    return MultiplicityReport(
        eigenvalue=float(lams.mean()),
        eigenvalues=tuple(float(v) for v in lams),
        class_count=count,
        lambda_spread=float(lams.max() - lams.min()),
    )
