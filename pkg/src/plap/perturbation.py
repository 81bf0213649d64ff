"""Edge-length perturbation of the first eigenvalue.

lambda(delta) is the first eigenvalue after stretching one edge by delta.  It
is continuous, one-sidedly differentiable, and (when the eigenvalue is simple)
differentiable at delta = 0 with

    lambda'(0) = -(p-1)/len * int_e0 |u'|^p  -  lambda(0)/len * int_e0 |u|^p

for the L^p-normalized eigenfunction u.  Both terms are nonpositive, so
lengthening an edge never increases the eigenvalue.  Finite-difference checks
use matched meshes: the perturbed graphs reuse the unperturbed element counts
so the mesh error cancels smoothly in the quotient.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import GraphError, PLapError
from .graph import Edge, MetricGraph, validate
from .mesh import build_mesh, build_mesh_from_counts, dirichlet_energy_p, lp_norm_p
from .ptrig import _as_p
from .solver import Eigenpair, SolverOptions, default_h, solve_on_mesh


def perturb_edge_length(graph: MetricGraph, edge_id: str, delta: float) -> MetricGraph:
    """Same graph with edge ``edge_id`` stretched by ``delta`` (length must stay positive)."""
    e0 = graph.edge(edge_id)
    if not e0.length + delta > 0:
        raise GraphError("bad-length", f"perturbed length {e0.length + delta} of edge {edge_id!r} is not positive")
    edges = tuple(
        Edge(e.id, e.tail, e.head, e.length + delta) if e.id == edge_id else e for e in graph.edges
    )
    return MetricGraph(graph.vertices, edges, graph.dirichlet)


def shape_derivative_formula(pair: Eigenpair, edge_id: str) -> float:
    """Closed-form derivative of lambda with respect to the length of one edge.

    Requires the eigenfunction to carry unit L^p norm on the whole graph; the
    two integrals are restricted to the perturbed edge.  Always <= 0.
    """
    u = pair.eigenfunction
    p = pair.p
    npow = lp_norm_p(u, p)
    if abs(npow - 1.0) > 1e-8:
        raise PLapError(f"eigenfunction must be L^p-normalized (got norm^p {npow!r})")
    e0 = u.mesh.graph.edge(edge_id)
    energy = dirichlet_energy_p(u, p, edges=[edge_id])
    mass = lp_norm_p(u, p, edges=[edge_id])
    return -(p - 1.0) / e0.length * energy - pair.eigenvalue / e0.length * mass


def _solve_matched(graph: MetricGraph, counts: dict, p: float, opts: SolverOptions) -> Eigenpair:
    return solve_on_mesh(build_mesh_from_counts(graph, counts), p, opts)


def finite_difference_derivative(
    graph: MetricGraph,
    edge_id: str,
    p,
    delta: float,
    side: str = "central",
    opts: SolverOptions | None = None,
) -> float:
    """One-sided or central difference quotient of lambda(delta) at delta = 0.

    ``side="right"`` gives (lambda(+d) - lambda(0))/d, ``"left"`` gives
    (lambda(0) - lambda(-d))/d, ``"central"`` the mean of the two.
    """
    if side not in ("left", "right", "central"):
        raise PLapError(f"side must be left, right or central, got {side!r}")
    p = _as_p(p)
    opts = opts or SolverOptions()
    validate(graph)
    if not delta > 0:
        raise PLapError(f"delta must be positive, got {delta!r}")
    e0 = graph.edge(edge_id)
    if side != "right" and not e0.length - delta > 0:
        raise GraphError("bad-length", f"delta {delta} would collapse edge {edge_id!r}")
    h = opts.h_target if opts.h_target is not None else default_h(graph)
    counts = build_mesh(graph, h).counts
    if side == "right":
        lam0 = _solve_matched(graph, counts, p, opts).eigenvalue
        lam_plus = _solve_matched(perturb_edge_length(graph, edge_id, delta), counts, p, opts).eigenvalue
        return (lam_plus - lam0) / delta
    if side == "left":
        lam0 = _solve_matched(graph, counts, p, opts).eigenvalue
        lam_minus = _solve_matched(perturb_edge_length(graph, edge_id, -delta), counts, p, opts).eigenvalue
        return (lam0 - lam_minus) / delta
    lam_plus = _solve_matched(perturb_edge_length(graph, edge_id, delta), counts, p, opts).eigenvalue
    lam_minus = _solve_matched(perturb_edge_length(graph, edge_id, -delta), counts, p, opts).eigenvalue
    return (lam_plus - lam_minus) / (2.0 * delta)


@dataclass(frozen=True)
class PerturbationResult:
    edge: str
    lambda0: float
    formula: float
    right_fd: float
    left_fd: float
    central_fd: float
    delta: float
    agreement: bool
    splitting: bool


def derivative_report(
    graph: MetricGraph,
    edge_id: str,
    p,
    opts: SolverOptions | None = None,
    delta: float | None = None,
    agree_tol: float = 0.02,
    split_tol: float = 0.05,
) -> PerturbationResult:
    """Formula value plus both one-sided difference quotients, with verdict flags.

    ``agreement`` marks the simple case (formula matches the central quotient);
    ``splitting`` marks one-sided derivatives differing by more than
    ``split_tol`` times the natural scale p*lambda/len (non-simple eigenvalue).
    """
    p = _as_p(p)
    opts = opts or SolverOptions()
    validate(graph)
    e0 = graph.edge(edge_id)
    if delta is None:
        delta = 1e-3 * e0.length
    h = opts.h_target if opts.h_target is not None else default_h(graph)
    counts = build_mesh(graph, h).counts

    base = _solve_matched(graph, counts, p, opts)
    formula = shape_derivative_formula(base, edge_id)
    lam_plus = _solve_matched(perturb_edge_length(graph, edge_id, delta), counts, p, opts).eigenvalue
    lam_minus = _solve_matched(perturb_edge_length(graph, edge_id, -delta), counts, p, opts).eigenvalue
    right = (lam_plus - base.eigenvalue) / delta
    left = (base.eigenvalue - lam_minus) / delta
    central = (lam_plus - lam_minus) / (2.0 * delta)

    scale = max(abs(formula), abs(central), 1e-12)
    agreement = abs(formula - central) <= agree_tol * scale
    splitting = (left - right) > split_tol * p * base.eigenvalue / e0.length
    return PerturbationResult(
        edge=edge_id,
        lambda0=base.eigenvalue,
        formula=formula,
        right_fd=right,
        left_fd=left,
        central_fd=central,
        delta=delta,
        agreement=agreement,
        splitting=splitting,
    )
