"""Finite piecewise-linear metric graphs and points on them.

A point is addressed as ``PointRef(edge, param)`` with ``param`` in [0, 1]
measured along the edge from its tail.  Parameters 0 and 1 are the tail and
head vertices; :meth:`MetricGraph.canon` picks one representative per point so
that canonical refs can be compared and hashed directly.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Hashable, Iterable

import networkx as nx

from .rational import ONE, ZERO, HALF, q


class GraphError(ValueError):
    pass


class Disconnected(GraphError):
    pass


class DegenerateSpace(GraphError):
    pass


class NonpositiveLength(GraphError):
    pass


class InvalidPoint(GraphError):
    pass


@dataclass(frozen=True)
class Edge:
    id: int
    tail: Hashable
    head: Hashable
    length: object  # mpq

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True, order=True)
class PointRef:
    edge: int
    param: object  # mpq

    def __repr__(self) -> str:
        return f"PointRef({self.edge}, {self.param})"


def point(edge: int, param) -> PointRef:
    return PointRef(int(edge), q(param))


class MetricGraph:
    """A connected finite graph whose edges are segments of given length.

    Loops and multi-edges are allowed.  Instances are immutable; derived
    tables (vertex distances, incidence) are computed lazily and cached.
    """

    def __init__(self, vertices: Iterable[Hashable], edges: Iterable):
        self.vertices = tuple(vertices)
        table = {}
        for item in edges:
            if isinstance(item, Edge):
                e = item
            else:
                eid, tail, head, length = item
                e = Edge(int(eid), tail, head, q(length))
            if e.id in table:
                raise GraphError(f"duplicate edge id {e.id}")
            table[e.id] = e
        self.edges = dict(sorted(table.items()))
        self.edge_ids = tuple(self.edges)

    def __repr__(self) -> str:
        return f"MetricGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MetricGraph)
            and self.vertices == other.vertices
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.vertices, tuple(self.edges.values())))

    def edge(self, eid: int) -> Edge:
        return self.edges[eid]

    def length(self, eid: int):
        return self.edges[eid].length

    @cached_property
    def total_length(self):
        return sum((e.length for e in self.edges.values()), ZERO)

    @cached_property
    def _incidence(self) -> dict:
        inc = {v: [] for v in self.vertices}
        for e in self.edges.values():
            inc[e.tail].append((e.id, 0))
            inc[e.head].append((e.id, 1))
        for v in inc:
            inc[v].sort()
        return inc

    def incident(self, v) -> list[tuple[int, int]]:
        """(edge id, end) pairs at vertex ``v``; a loop appears twice."""
        return self._incidence[v]

    def degree(self, v) -> int:
        return len(self._incidence[v])

    def endpoint_vertex(self, eid: int, end: int):
        e = self.edges[eid]
        return e.tail if end == 0 else e.head

    # -- points ---------------------------------------------------------

    def vertex_point(self, v) -> PointRef:
        eid, end = self._incidence[v][0]
        return PointRef(eid, ZERO if end == 0 else ONE)

    def vertex_of(self, p: PointRef):
        """The vertex at ``p`` or None when ``p`` is interior to its edge."""
        if p.param == 0:
            return self.edges[p.edge].tail
        if p.param == 1:
            return self.edges[p.edge].head
        return None

    def canon(self, p: PointRef) -> PointRef:
        if p.edge not in self.edges:
            raise InvalidPoint(f"no edge {p.edge}")
        t = q(p.param)
        if t < 0 or t > 1:
            raise InvalidPoint(f"parameter {t} outside [0,1]")
        if t == 0 or t == 1:
            return self.vertex_point(self.vertex_of(PointRef(p.edge, t)))
        return p if t is p.param else PointRef(p.edge, t)

    def same_point(self, p: PointRef, r: PointRef) -> bool:
        return self.canon(p) == self.canon(r)

    def point_on_edge(self, p: PointRef, eid: int) -> list:
        """Parameters at which the point ``p`` sits on edge ``eid``."""
        v = self.vertex_of(p)
        if v is None:
            return [p.param] if p.edge == eid else []
        e = self.edges[eid]
        out = []
        if e.tail == v:
            out.append(ZERO)
        if e.head == v:
            out.append(ONE)
        return out

    # -- metric ---------------------------------------------------------

    @cached_property
    def vertex_distance(self) -> dict:
        nxg = nx.Graph()
        nxg.add_nodes_from(self.vertices)
        for e in self.edges.values():
            if e.is_loop:
                continue
            old = nxg.get_edge_data(e.tail, e.head)
            if old is None or e.length < old["w"]:
                nxg.add_edge(e.tail, e.head, w=e.length)
        return {v: dict(d) for v, d in nx.all_pairs_dijkstra_path_length(nxg, weight="w")}

    def _to_vertices(self, p: PointRef) -> dict:
        """Distances from ``p`` to every vertex."""
        D = self.vertex_distance
        v = self.vertex_of(p)
        if v is not None:
            return D[v]
        e = self.edges[p.edge]
        a = e.length * p.param
        b = e.length * (1 - p.param)
        Dt, Dh = D[e.tail], D[e.head]
        return {w: min(a + Dt[w], b + Dh[w]) for w in self.vertices}

    def distance_forms(self, p: PointRef, eid: int) -> list:
        """Distance from ``p`` along edge ``eid`` as a lower envelope.

        Returns ``[(t0, t1, forms)]`` where on ``[t0, t1]`` the distance to
        ``(eid, t)`` equals ``min(c0 + c1 * t for c0, c1 in forms)``.
        """
        p = self.canon(p)
        e = self.edges[eid]
        L = e.length
        dv = self._to_vertices(p)
        base = [(dv[e.tail], L), (dv[e.head] + L, -L)]
        if p.edge == eid and self.vertex_of(p) is None:
            s = p.param
            return [
                (ZERO, s, base + [(L * s, -L)]),
                (s, ONE, base + [(-L * s, L)]),
            ]
        return [(ZERO, ONE, base)]

    def distance(self, p: PointRef, r: PointRef):
        r = self.canon(r)
        t = r.param
        for t0, t1, forms in self.distance_forms(p, r.edge):
            if t0 <= t <= t1:
                return min(c0 + c1 * t for c0, c1 in forms)
        raise AssertionError("unreachable")

    def scaled(self, factor) -> "MetricGraph":
        factor = q(factor)
        return MetricGraph(
            self.vertices,
            [Edge(e.id, e.tail, e.head, e.length * factor) for e in self.edges.values()],
        )


def validate_graph(g: MetricGraph) -> MetricGraph:
    if not g.edges:
        raise DegenerateSpace("a continuum needs at least one edge")
    for e in g.edges.values():
        if not e.length > 0:
            raise NonpositiveLength(f"edge {e.id} has length {e.length}")
        for v in (e.tail, e.head):
            if v not in g._incidence:
                raise GraphError(f"edge {e.id} uses unknown vertex {v!r}")
    if len(set(g.vertices)) != len(g.vertices):
        raise GraphError("duplicate vertex ids")
    if _count_components(g, removed=None) != 1:
        raise Disconnected("graph is not connected")
    return g


# -- cut-point topology -------------------------------------------------


class _DSU:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)

    def count(self):
        return len({self.find(x) for x in self.parent})


def _count_components(g: MetricGraph, removed: PointRef | None) -> int:
    """Connected components of ``g`` minus one point (or of ``g``)."""
    dsu = _DSU()
    cut_vertex = None
    cut_edge = None
    if removed is not None:
        removed = g.canon(removed)
        cut_vertex = g.vertex_of(removed)
        if cut_vertex is None:
            cut_edge = removed.edge
    for v in g.vertices:
        if v != cut_vertex:
            dsu.add(("v", v))
    for e in g.edges.values():
        if e.id == cut_edge:
            dsu.add(("h", e.id, 0))
            dsu.add(("h", e.id, 1))
            dsu.union(("h", e.id, 0), ("v", e.tail))
            dsu.union(("h", e.id, 1), ("v", e.head))
            continue
        dsu.add(("e", e.id))
        for v in (e.tail, e.head):
            if v != cut_vertex:
                dsu.union(("e", e.id), ("v", v))
    return dsu.count()


UNBOUNDED = None


@dataclass(frozen=True)
class PointClass:
    is_cut_point: bool
    is_local_cut_point: bool
    menger_order: int | None
    is_endpoint: bool


class BaseCase(str, Enum):
    NOT_LOCAL_CUT = "NOT_LOCAL_CUT"
    ORDER2_LOCAL_CUT = "ORDER2_LOCAL_CUT"


def classify_point(g: MetricGraph, p: PointRef) -> PointClass:
    p = g.canon(p)
    v = g.vertex_of(p)
    is_cut = _count_components(g, p) > 1
    if v is None:
        return PointClass(is_cut, True, 2, False)
    d = g.degree(v)
    return PointClass(is_cut, d >= 2, d, d == 1)


def bridges(g: MetricGraph) -> set:
    return {eid for eid, e in g.edges.items() if _count_components(g, PointRef(eid, HALF)) > 1}


def select_base_point(g: MetricGraph) -> tuple[PointRef, BaseCase]:
    """A point that is either not a local cut point or an order-2 local cut
    point that does not cut the graph.  Leaves are preferred."""
    leaves = [g.vertex_point(v) for v in g.vertices if g.degree(v) == 1]
    if leaves:
        return min(leaves), BaseCase.NOT_LOCAL_CUT
    cut_edges = bridges(g)
    for eid in g.edge_ids:
        if eid not in cut_edges:
            return PointRef(eid, HALF), BaseCase.ORDER2_LOCAL_CUT
    raise AssertionError("a finite graph without leaves has a cycle")
