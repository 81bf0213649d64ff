"""Metric graphs: data model, validation, metric-space distances, transformations.

A metric graph is a finite connected multigraph whose edges carry positive
lengths; each edge is identified with the interval ``[0, length]`` (coordinate
measured from the edge tail), which turns the graph into a compact 1-D metric
measure space.  Loops and parallel edges are allowed.  A non-empty vertex
subset is marked Dirichlet: functions in the constrained space vanish there.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass
from functools import cached_property

from .errors import GraphError, ParseError


@dataclass(frozen=True)
class Edge:
    """Directed edge; direction only fixes the coordinate origin."""

    id: str
    tail: str
    head: str
    length: float


@dataclass(frozen=True)
class GraphPoint:
    """A location on the graph: edge id plus coordinate in [0, length]."""

    edge: str
    x: float


@dataclass(frozen=True, eq=True)
class MetricGraph:
    vertices: frozenset
    edges: tuple
    dirichlet: frozenset

    @classmethod
    def build(cls, vertices, edges, dirichlet) -> "MetricGraph":
        """Build from iterables; edges may be Edge objects or (id, tail, head, length)."""
        packed = tuple(
            e if isinstance(e, Edge) else Edge(str(e[0]), str(e[1]), str(e[2]), float(e[3]))
            for e in edges
        )
        return cls(frozenset(vertices), packed, frozenset(dirichlet))

    @cached_property
    def _edge_map(self) -> dict:
        return {e.id: e for e in self.edges}

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edge_map[edge_id]
        except KeyError:
            raise GraphError("unknown-edge", f"no edge with id {edge_id!r}") from None

    @cached_property
    def adjacency(self) -> dict:
        """vertex -> list of (other endpoint, edge length); loops appear once."""
        adj = {v: [] for v in self.vertices}
        for e in self.edges:
            adj[e.tail].append((e.head, e.length))
            if e.head != e.tail:
                adj[e.head].append((e.tail, e.length))
        return adj

    def degree(self, v: str) -> int:
        """Number of edge ends at ``v``; a loop counts twice."""
        return sum((e.tail == v) + (e.head == v) for e in self.edges)

    def incident_edges(self, v: str) -> list:
        return [e for e in self.edges if e.tail == v or e.head == v]


def validate(graph: MetricGraph) -> None:
    """Raise GraphError unless ``graph`` satisfies every invariant.

    Distinct codes: ``duplicate-edge``, ``unknown-vertex``, ``bad-length``,
    ``no-edges``, ``empty-dirichlet``, ``disconnected``.
    """
    seen = set()
    for e in graph.edges:
        if e.id in seen:
            raise GraphError("duplicate-edge", f"edge id {e.id!r} appears more than once")
        seen.add(e.id)
        for v in (e.tail, e.head):
            if v not in graph.vertices:
                raise GraphError("unknown-vertex", f"edge {e.id!r} references unknown vertex {v!r}")
        if not (isinstance(e.length, (int, float)) and math.isfinite(e.length) and e.length > 0):
            raise GraphError("bad-length", f"edge {e.id!r} has non-positive or non-finite length {e.length!r}")
    if not graph.edges:
        raise GraphError("no-edges", "a metric graph needs at least one edge")
    if not graph.dirichlet:
        raise GraphError("empty-dirichlet", "the Dirichlet vertex set must be non-empty")
    for v in graph.dirichlet:
        if v not in graph.vertices:
            raise GraphError("unknown-vertex", f"Dirichlet set references unknown vertex {v!r}")
    # connectivity by breadth-first search over the adjacency lists
    start = next(iter(graph.vertices))
    todo, reached = [start], {start}
    while todo:
        v = todo.pop()
        for u, _ in graph.adjacency[v]:
            if u not in reached:
                reached.add(u)
                todo.append(u)
    if reached != graph.vertices:
        missing = sorted(graph.vertices - reached)
        raise GraphError("disconnected", f"graph is not connected; unreachable vertices: {missing}")


def total_length(graph: MetricGraph) -> float:
    """Sum of all edge lengths."""
    return sum(e.length for e in graph.edges)


def vertex_distances(graph: MetricGraph, sources) -> dict:
    """Shortest-path distance from every vertex to the set ``sources``.

    Label-setting (Dijkstra) over the vertex adjacency; exact for the metric
    because interior points of an edge never shorten a vertex-to-vertex path.
    """
    sources = set(sources)
    if not sources:
        raise GraphError("empty-vertex-set", "source vertex set must be non-empty")
    for v in sources:
        if v not in graph.vertices:
            raise GraphError("unknown-vertex", f"unknown vertex {v!r}")
    dist = {}
    heap = [(0.0, v) for v in sorted(sources)]
    heapq.heapify(heap)
    while heap:
        d, v = heapq.heappop(heap)
        if v in dist:
            continue
        dist[v] = d
        for u, w in graph.adjacency[v]:
            if u not in dist:
                heapq.heappush(heap, (d + w, u))
    for v in graph.vertices:
        dist.setdefault(v, math.inf)
    return dist


def _anchors(graph: MetricGraph, point: GraphPoint) -> list:
    """Represent a point as [(vertex, offset)]; vertex points canonicalize."""
    e = graph.edge(point.edge)
    if not (-1e-12 <= point.x <= e.length + 1e-12):
        raise GraphError("bad-coordinate", f"coordinate {point.x} outside [0, {e.length}] on edge {e.id!r}")
    x = min(max(point.x, 0.0), e.length)
    if x == 0.0:
        return [(e.tail, 0.0)]
    if x == e.length:
        return [(e.head, 0.0)]
    return [(e.tail, x), (e.head, e.length - x)]


def distance(graph: MetricGraph, a: GraphPoint, b: GraphPoint) -> float:
    """Shortest-path metric between two points of the graph.

    Points at coordinate 0 / length are identified with the tail / head
    vertex, so the metric is well defined on the quotient space and loops and
    parallel edges need no special cases.  Any route either stays inside a
    shared edge or exits through an endpoint vertex of each edge.
    """
    aa, ab = _anchors(graph, a), _anchors(graph, b)
    best = math.inf
    if a.edge == b.edge and len(aa) == 2 and len(ab) == 2:
        best = abs(a.x - b.x)
    for va, offa in aa:
        dist = vertex_distances(graph, {va})
        for vb, offb in ab:
            best = min(best, offa + dist[vb] + offb)
    return best


def vertex_point(graph: MetricGraph, v: str) -> GraphPoint:
    """Some GraphPoint located at vertex ``v``."""
    for e in graph.edges:
        if e.tail == v:
            return GraphPoint(e.id, 0.0)
        if e.head == v:
            return GraphPoint(e.id, e.length)
    raise GraphError("unknown-vertex", f"vertex {v!r} has no incident edge")


def max_distance_to_set(graph: MetricGraph, vertex_set) -> tuple:
    """Maximum over graph points of the distance to a vertex set, with a witness.

    Exact: multi-source shortest paths give the vertex distances d(., S); on an
    edge the point distance is min(d(tail)+x, d(head)+len-x), a min of two
    affine functions whose maximum lies at their crossing (clamped to the edge).
    """
    dist = vertex_distances(graph, vertex_set)
    best_val = -1.0
    best_pt = None
    for e in graph.edges:
        dt, dh = dist[e.tail], dist[e.head]
        x = min(max((dh - dt + e.length) / 2.0, 0.0), e.length)
        val = min(dt + x, dh + e.length - x)
        if val > best_val + 1e-15:
            best_val = val
            best_pt = GraphPoint(e.id, x)
    return best_val, best_pt


def terminal_vertices(graph: MetricGraph) -> frozenset:
    """Vertices adjacent to exactly one other (distinct) vertex."""
    neighbours = {v: set() for v in graph.vertices}
    for e in graph.edges:
        neighbours[e.tail].add(e.head)
        neighbours[e.head].add(e.tail)
    return frozenset(v for v, ns in neighbours.items() if len(ns) == 1 and v not in ns)


def double_graph(graph: MetricGraph) -> MetricGraph:
    """Duplicate every edge with equal length and reversed orientation.

    Every vertex degree becomes even and the total length doubles.
    """
    doubled = list(graph.edges)
    for e in graph.edges:
        doubled.append(Edge(e.id + "__rev", e.head, e.tail, e.length))
    return MetricGraph(graph.vertices, tuple(doubled), graph.dirichlet)


_EDGE_KEYS = {"id", "from", "to", "length"}
_TOP_KEYS = {"vertices", "edges", "dirichlet"}


def load_graph(text: str) -> MetricGraph:
    """Parse the JSON graph document and validate the result.

    Schema: {"vertices": [..], "edges": [{"id","from","to","length"}..],
    "dirichlet": [..]}; unknown keys are rejected.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    if not isinstance(doc, dict):
        raise ParseError("document", "top level must be a JSON object")
    extra = set(doc) - _TOP_KEYS
    if extra:
        raise ParseError("document", f"unknown keys {sorted(extra)}")
    for key in _TOP_KEYS:
        if key not in doc:
            raise ParseError("document", f"missing key {key!r}")
    if not isinstance(doc["vertices"], list) or not all(isinstance(v, str) for v in doc["vertices"]):
        raise ParseError("vertices", "must be a list of strings")
    if not isinstance(doc["dirichlet"], list) or not all(isinstance(v, str) for v in doc["dirichlet"]):
        raise ParseError("dirichlet", "must be a list of strings")
    if not isinstance(doc["edges"], list):
        raise ParseError("edges", "must be a list of objects")
    edges = []
    for i, item in enumerate(doc["edges"]):
        where = f"edges[{i}]"
        if not isinstance(item, dict):
            raise ParseError(where, "must be an object")
        extra = set(item) - _EDGE_KEYS
        if extra:
            raise ParseError(where, f"unknown keys {sorted(extra)}")
        for key in _EDGE_KEYS:
            if key not in item:
                raise ParseError(where, f"missing key {key!r}")
        if not isinstance(item["id"], str) or not isinstance(item["from"], str) or not isinstance(item["to"], str):
            raise ParseError(where, "id/from/to must be strings")
        if isinstance(item["length"], bool) or not isinstance(item["length"], (int, float)):
            raise ParseError(f"{where}.length", "must be a number")
        edges.append(Edge(item["id"], item["from"], item["to"], float(item["length"])))
    graph = MetricGraph(frozenset(doc["vertices"]), tuple(edges), frozenset(doc["dirichlet"]))
    validate(graph)
    return graph


def save_graph(graph: MetricGraph) -> str:
    """Serialize to the JSON document format (inverse of load_graph)."""
    doc = {
        "vertices": sorted(graph.vertices),
        "edges": [
            {"id": e.id, "from": e.tail, "to": e.head, "length": e.length}
            for e in graph.edges
        ],
        "dirichlet": sorted(graph.dirichlet),
    }
    return json.dumps(doc, indent=2)
