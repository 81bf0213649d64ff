"""Limit objects of the eigenvalue family: p -> infinity and p -> 1.

As p -> infinity, lambda_{1,p}^(1/p) tends to the geometric quantity
1 / max_x d(x, V_D), computed here exactly from multi-source shortest paths.

As p -> 1+, lambda_{1,p} tends to the Cheeger constant: the infimum of
Per(D)/|D| over subsets D of the graph.  Perimeter convention: a boundary
vertex counts once no matter how many incident edges cross there, and a
Dirichlet vertex swallowed inside D (every incident edge in D) also counts
once.  For a fixed cut structure the ratio strictly decreases as interior cut
points move outward, so optimal sets are unions of full edges and a
connected-edge-subset enumeration is exact; a grid brute force over per-edge
sub-intervals double-checks that argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from .errors import GraphError, PLapError
from .graph import GraphPoint, MetricGraph, max_distance_to_set, validate
from .ptrig import _as_p
from .solver import SolverOptions, default_h, solve_on_mesh
from .mesh import build_mesh


@dataclass(frozen=True)
class CheegerSet:
    """A union of full edges with its measure, perimeter, and ratio."""

    edges: tuple
    measure: float
    perimeter: int
    ratio: float


@dataclass(frozen=True)
class LimitRow:
    p: float
    eigenvalue: float
    statistic: float
    gap: float


@dataclass(frozen=True)
class LimitReport:
    mode: str
    target: float
    rows: tuple


def lambda_infinity(graph: MetricGraph) -> tuple:
    """The p->infinity eigenvalue 1/max_x d(x, V_D), exact, with the maximizing point."""
    validate(graph)
    dist, witness = max_distance_to_set(graph, graph.dirichlet)
    return 1.0 / dist, witness


def infinity_convergence(graph: MetricGraph, ps, opts: SolverOptions | None = None) -> LimitReport:
    """lambda_{1,p}^(1/p) for each p with its gap to the exact limit."""
    ps = sorted(float(p) for p in ps)
    if not ps:
        raise PLapError("invalid input: empty p list")
    opts = opts or SolverOptions()
    target, _ = lambda_infinity(graph)
    h = opts.h_target if opts.h_target is not None else default_h(graph)
    mesh = build_mesh(graph, h)
    rows = []
    for p in ps:
        lam = solve_on_mesh(mesh, p, opts).eigenvalue
        stat = lam ** (1.0 / p)
        rows.append(LimitRow(p=p, eigenvalue=lam, statistic=stat, gap=abs(stat - target)))
    return LimitReport(mode="infinity", target=target, rows=tuple(rows))


def _perimeter(graph: MetricGraph, edge_ids) -> int:
    ends = {}
    for eid in edge_ids:
        e = graph.edge(eid)
        ends[e.tail] = ends.get(e.tail, 0) + 1
        ends[e.head] = ends.get(e.head, 0) + 1
    per = 0
    for v, k in ends.items():
        if k < graph.degree(v) or v in graph.dirichlet:
            per += 1
    return per


def _connected_edge_subsets(graph: MetricGraph):
    """All non-empty connected subsets of edges (as frozensets of edge ids)."""
    ids = [e.id for e in graph.edges]
    touching = {}
    for e in graph.edges:
        touching.setdefault(e.tail, set()).add(e.id)
        touching.setdefault(e.head, set()).add(e.id)
    neighbours = {
        e.id: (touching[e.tail] | touching[e.head]) - {e.id} for e in graph.edges
    }
    seen = set()
    stack = []
    for eid in ids:
        s = frozenset([eid])
        seen.add(s)
        stack.append(s)
    while stack:
        cur = stack.pop()
        yield cur
        for eid in cur:
            for nxt in neighbours[eid]:
                if nxt not in cur:
                    grown = cur | {nxt}
                    if grown not in seen:
                        seen.add(grown)
                        stack.append(grown)


def cheeger_constant(graph: MetricGraph, max_edges: int = 20) -> tuple:
    """Exact minimum of Per(D)/|D| over connected full-edge subsets.

    Disconnected sets never beat their best connected component, and interior
    cut points never beat a vertex cut, so this enumeration attains the true
    infimum.  Ties break toward the lexicographically smallest edge set.
    """
    validate(graph)
    if len(graph.edges) > max_edges:
        raise GraphError("edge-cap", f"{len(graph.edges)} edges exceed the enumeration cap {max_edges}")
    lengths = {e.id: e.length for e in graph.edges}
    best_key = None
    best = None
    for subset in _connected_edge_subsets(graph):
        measure = sum(lengths[eid] for eid in subset)
        per = _perimeter(graph, subset)
        ratio = per / measure
        key = (ratio, tuple(sorted(subset)))
        if best_key is None or key < best_key:
            best_key = key
            best = CheegerSet(edges=tuple(sorted(subset)), measure=measure, perimeter=per, ratio=ratio)
    return best.ratio, best


def cheeger_bruteforce(graph: MetricGraph, step: float, max_patterns: int = 2_000_000) -> tuple:
    """Grid oracle: minimize Per/measure over unions of per-edge sub-intervals.

    Interval endpoints lie on a per-edge uniform grid no coarser than ``step``
    (at most one interval per edge); interior cut points count 1 each, vertex
    counting as in cheeger_constant.  Returns (value, {edge: (x1, x2)}).
    """
    validate(graph)
    if not step > 0:
        raise PLapError(f"grid step must be positive, got {step!r}")
    vlist = sorted(graph.vertices)
    vidx = {v: i for i, v in enumerate(vlist)}
    deg = [graph.degree(v) for v in vlist]
    dirich = [v in graph.dirichlet for v in vlist]

    options = []
    for e in graph.edges:
        m = max(1, math.ceil(e.length / step - 1e-12))
        g = e.length / m
        ti, hi = vidx[e.tail], vidx[e.head]
        opts_e = [
            (ti, hi, False, False, 0, 0.0, None),                       # empty
            (ti, hi, True, True, 0, e.length, (0.0, e.length)),         # full edge
        ]
        if m >= 2:
            opts_e.append((ti, hi, True, False, 1, e.length - g, (0.0, e.length - g)))
            opts_e.append((ti, hi, False, True, 1, e.length - g, (g, e.length)))
        if m >= 3:
            opts_e.append((ti, hi, False, False, 2, e.length - 2 * g, (g, e.length - g)))
        options.append(opts_e)

    count = 1
    for opts_e in options:
        count *= len(opts_e)
    if count > max_patterns:
        raise GraphError("bruteforce-cap", f"{count} cut patterns exceed the cap {max_patterns}")

    nv = len(vlist)
    best = math.inf
    best_desc = None
    for combo in product(*options):
        measure = 0.0
        cuts = 0
        ends = [0] * nv
        for ti, hi, cov_t, cov_h, ncuts, length, _ in combo:
            measure += length
            cuts += ncuts
            if cov_t:
                ends[ti] += 1
            if cov_h:
                ends[hi] += 1
        if measure <= 0.0:
            continue
        per = cuts
        for i in range(nv):
            k = ends[i]
            if k and (k < deg[i] or dirich[i]):
                per += 1
        ratio = per / measure
        if ratio < best:
            best = ratio
            best_desc = {
                e.id: combo[j][6] for j, e in enumerate(graph.edges) if combo[j][6] is not None
            }
    return best, best_desc


def one_convergence(graph: MetricGraph, ps, opts: SolverOptions | None = None) -> LimitReport:
    """lambda_{1,p} for p near 1 with gaps to the exact Cheeger constant."""
    ps = sorted((float(p) for p in ps), reverse=True)
    if not ps:
        raise PLapError("invalid input: empty p list")
    for p in ps:
        if not 1.0 < p <= 1.5:
            raise PLapError(f"p list for the p->1 study must lie in (1, 1.5], got {p}")
    opts = opts or SolverOptions()
    target, _ = cheeger_constant(graph)
    h = opts.h_target if opts.h_target is not None else default_h(graph)
    mesh = build_mesh(graph, h)
    rows = []
    for p in ps:
        lam = solve_on_mesh(mesh, _as_p(p), opts).eigenvalue
        rows.append(LimitRow(p=p, eigenvalue=lam, statistic=lam, gap=abs(lam - target)))
    return LimitReport(mode="cheeger", target=target, rows=tuple(rows))
