"""Sharp closed-form bounds on the first eigenvalue.

Lower: (pi_p / (2*total_length))^p * (p-1), attained by a single edge with one
Dirichlet end.  Upper: (edge_count * pi_p / total_length)^p * (p-1), attained
by an equilateral star with every vertex Dirichlet.  Both scale as length^-p
under uniform dilation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PLapError
from .graph import MetricGraph, total_length
from .ptrig import _as_p, pi_p
from .solver import Eigenpair


def lower_bound(p, graph_length: float) -> float:
    """(pi_p / (2*length))^p * (p-1)."""
    p = _as_p(p)
    if not graph_length > 0:
        raise PLapError(f"total length must be positive, got {graph_length!r}")
    return (pi_p(p) / (2.0 * graph_length)) ** p * (p - 1.0)


def upper_bound(p, graph_length: float, edge_count: int) -> float:
    """(edge_count * pi_p / length)^p * (p-1)."""
    p = _as_p(p)
    if not graph_length > 0:
        raise PLapError(f"total length must be positive, got {graph_length!r}")
    if not (isinstance(edge_count, int) and edge_count >= 1):
        raise PLapError(f"edge count must be a positive integer, got {edge_count!r}")
    return (edge_count * pi_p(p) / graph_length) ** p * (p - 1.0)


@dataclass(frozen=True)
class BoundReport:
    lower: float
    upper: float
    eigenvalue: float
    margin_lower: float
    margin_upper: float
    within_lower: bool
    within_upper: bool
    rel_tol: float


def check_bounds(graph: MetricGraph, p, pair: Eigenpair, rel_tol: float = 1e-3) -> BoundReport:
    """Sandwich check lower - tol <= lambda <= upper + tol with tol = rel_tol*lambda."""
    p = _as_p(p)
    length = total_length(graph)
    lo = lower_bound(p, length)
    up = upper_bound(p, length, len(graph.edges))
    lam = pair.eigenvalue
    tol = rel_tol * lam
    return BoundReport(
        lower=lo,
        upper=up,
        eigenvalue=lam,
        margin_lower=lam - lo,
        margin_upper=up - lam,
        within_lower=lam >= lo - tol,
        within_upper=lam <= up + tol,
        rel_tol=rel_tol,
    )
