"""Closed subsets of a metric graph given as finite unions of edge segments.

``Subcontinuum`` holds, per edge, a sorted tuple of disjoint closed parameter
intervals plus the set of vertices the set contains.  Degenerate intervals
are allowed in the interior of an edge (isolated points); at parameters 0/1
they are folded into the vertex set, so two sets are equal exactly when their
normal forms are.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import networkx as nx

from .graph import GraphError, MetricGraph, PointRef, classify_point
from .rational import ONE, ZERO, Q, pow2, q


class CutPoint(GraphError):
    pass


def _merge(intervals):
    out = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


class Subcontinuum:
    """A closed subset of ``graph`` made of finitely many segments.

    The name follows usage: most sets built in the package are connected,
    but intersections need not be, so connectivity is a query
    (:meth:`is_connected`) rather than a constructor invariant.
    """

    __slots__ = ("graph", "segs", "verts", "__dict__")

    def __init__(self, graph: MetricGraph, segments=(), vertices=()):
        self.graph = graph
        raw = {}
        verts = set(vertices)
        for eid, lo, hi in segments:
            lo, hi = q(lo), q(hi)
            if lo > hi:
                lo, hi = hi, lo
            if lo < 0 or hi > 1:
                raise ValueError(f"segment [{lo},{hi}] outside edge {eid}")
            raw.setdefault(eid, []).append((lo, hi))
        segs = {}
        for eid in sorted(raw):
            e = graph.edges[eid]
            merged = []
            for lo, hi in _merge(raw[eid]):
                if lo == 0:
                    verts.add(e.tail)
                if hi == 1:
                    verts.add(e.head)
                if lo == hi and (lo == 0 or lo == 1):
                    continue
                merged.append((lo, hi))
            if merged:
                segs[eid] = tuple(merged)
        self.segs = segs
        self.verts = frozenset(verts)

    # -- construction helpers --------------------------------------------

    @classmethod
    def whole(cls, graph: MetricGraph) -> "Subcontinuum":
        return cls(graph, [(eid, ZERO, ONE) for eid in graph.edge_ids])

    @classmethod
    def empty(cls, graph: MetricGraph) -> "Subcontinuum":
        return cls(graph)

    @classmethod
    def from_point(cls, graph: MetricGraph, p: PointRef) -> "Subcontinuum":
        p = graph.canon(p)
        v = graph.vertex_of(p)
        if v is not None:
            return cls(graph, vertices=[v])
        return cls(graph, [(p.edge, p.param, p.param)])

    @classmethod
    def segment(cls, graph, eid, lo, hi) -> "Subcontinuum":
        return cls(graph, [(eid, lo, hi)])

    # -- identity ---------------------------------------------------------

    @cached_property
    def key(self):
        return (tuple(self.segs.items()), tuple(sorted(self.verts, key=repr)))

    def __eq__(self, other) -> bool:
        return isinstance(other, Subcontinuum) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        parts = [f"{eid}:[{lo},{hi}]" for eid, ivs in self.segs.items() for lo, hi in ivs]
        iso = sorted(repr(v) for v in self.isolated_vertices)
        if iso:
            parts.append("v{" + ",".join(iso) + "}")
        return "Subcontinuum(" + " ".join(parts) + ")"

    def segment_list(self) -> list:
        return [(eid, lo, hi) for eid, ivs in self.segs.items() for lo, hi in ivs]

    @cached_property
    def touched_vertices(self) -> frozenset:
        out = set()
        for eid, ivs in self.segs.items():
            e = self.graph.edges[eid]
            if ivs[0][0] == 0:
                out.add(e.tail)
            if ivs[-1][1] == 1:
                out.add(e.head)
        return frozenset(out)

    @cached_property
    def isolated_vertices(self) -> frozenset:
        return self.verts - self.touched_vertices

    def is_empty(self) -> bool:
        return not self.segs and not self.verts

    # -- set algebra -------------------------------------------------------

    def union(self, *others) -> "Subcontinuum":
        segs = self.segment_list()
        verts = set(self.verts)
        for o in others:
            segs += o.segment_list()
            verts |= o.verts
        return Subcontinuum(self.graph, segs, verts)

    __or__ = union

    def intersection(self, other: "Subcontinuum") -> "Subcontinuum":
        out = []
        for eid, ivs in self.segs.items():
            jvs = other.segs.get(eid)
            if not jvs:
                continue
            i = j = 0
            while i < len(ivs) and j < len(jvs):
                lo = max(ivs[i][0], jvs[j][0])
                hi = min(ivs[i][1], jvs[j][1])
                if lo <= hi:
                    out.append((eid, lo, hi))
                if ivs[i][1] < jvs[j][1]:
                    i += 1
                else:
                    j += 1
        verts = self.verts & other.verts
        # a vertex of one set lying on a segment end of the other is already
        # in both vertex sets, so nothing else to add
        return Subcontinuum(self.graph, out, verts)

    __and__ = intersection

    def meets(self, other: "Subcontinuum") -> bool:
        return not self.intersection(other).is_empty()

    def contains_point(self, p: PointRef) -> bool:
        p = self.graph.canon(p)
        v = self.graph.vertex_of(p)
        if v is not None:
            return v in self.verts
        for lo, hi in self.segs.get(p.edge, ()):
            if lo <= p.param <= hi:
                return True
        return False

    def contains(self, other: "Subcontinuum") -> bool:
        if not other.verts <= self.verts:
            return False
        for eid, jvs in other.segs.items():
            ivs = self.segs.get(eid, ())
            for lo, hi in jvs:
                if not any(a <= lo and hi <= b for a, b in ivs):
                    return False
        return True

    def __le__(self, other) -> bool:
        return other.contains(self)

    def closure_of_complement(self) -> "Subcontinuum":
        out = []
        for eid in self.graph.edge_ids:
            cur = ZERO
            for lo, hi in self.segs.get(eid, ()):
                if lo > cur:
                    out.append((eid, cur, lo))
                cur = max(cur, hi)
            if cur < 1:
                out.append((eid, cur, ONE))
        return Subcontinuum(self.graph, out)

    def has_interior(self) -> bool:
        return any(lo < hi for ivs in self.segs.values() for lo, hi in ivs)

    def closure_of_interior(self) -> "Subcontinuum":
        return Subcontinuum(
            self.graph, [(e, lo, hi) for e, lo, hi in self.segment_list() if lo < hi]
        )

    def is_regular_closed(self) -> bool:
        return self.closure_of_interior() == self

    def measure(self):
        return sum(
            (self.graph.length(eid) * (hi - lo) for eid, ivs in self.segs.items() for lo, hi in ivs),
            ZERO,
        )

    # -- topology ------------------------------------------------------------

    def _elements(self) -> list:
        """(edge, lo, hi) pieces including isolated vertices as points."""
        out = self.segment_list()
        for v in sorted(self.isolated_vertices, key=repr):
            p = self.graph.vertex_point(v)
            out.append((p.edge, p.param, p.param))
        return out

    def components(self) -> list["Subcontinuum"]:
        g = self.graph
        elems = self._elements()
        parent = list(range(len(elems)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        at_vertex = {}
        for idx, (eid, lo, hi) in enumerate(elems):
            e = g.edges[eid]
            if lo == 0:
                at_vertex.setdefault(e.tail, []).append(idx)
            if hi == 1:
                at_vertex.setdefault(e.head, []).append(idx)
        for idxs in at_vertex.values():
            for i in idxs[1:]:
                parent[find(i)] = find(idxs[0])
        groups = {}
        for idx in range(len(elems)):
            groups.setdefault(find(idx), []).append(elems[idx])
        return [Subcontinuum(g, segs) for segs in groups.values()]

    def is_connected(self) -> bool:
        return not self.is_empty() and len(self.components()) == 1

    # -- metric --------------------------------------------------------------

    def min_distance_to(self, p: PointRef):
        """Distance from ``p`` to the set."""
        best = None
        for eid, lo, hi in self._elements():
            for t0, t1, forms in self.graph.distance_forms(p, eid):
                a, b = max(lo, t0), min(hi, t1)
                if a > b:
                    continue
                val = min(min(c0 + c1 * a, c0 + c1 * b) for c0, c1 in forms)
                if best is None or val < best:
                    best = val
        return best

    def max_distance_from(self, p: PointRef):
        best = ZERO
        for eid, lo, hi in self._elements():
            for t0, t1, forms in self.graph.distance_forms(p, eid):
                a, b = max(lo, t0), min(hi, t1)
                if a > b:
                    continue
                val = _max_min_affine_1d(forms, a, b)
                if val > best:
                    best = val
        return best

    @cached_property
    def diam(self):
        return _diameter(self.graph, self._elements())

    def diam_below(self, bound) -> bool:
        """``diam < bound`` with cheap accept/reject shortcuts."""
        if self.is_connected() and self.measure() < bound:
            return True
        return self.diam < bound

    def ball_closed(self, p: PointRef, r) -> "Subcontinuum":
        """The closed ball of radius ``r`` around ``p``, intersected with self."""
        return closed_ball(self.graph, p, r).intersection(self)


def closed_ball(g: MetricGraph, p: PointRef, r) -> Subcontinuum:
    r = q(r)
    segs = []
    for eid in g.edge_ids:
        for t0, t1, forms in g.distance_forms(p, eid):
            for c0, c1 in forms:
                # {t in [t0,t1] : c0 + c1 t <= r}
                if c1 == 0:
                    if c0 <= r:
                        segs.append((eid, t0, t1))
                    continue
                t = (r - c0) / c1
                lo, hi = (t0, min(t1, t)) if c1 > 0 else (max(t0, t), t1)
                if lo <= hi:
                    segs.append((eid, lo, hi))
    verts = []
    v = g.vertex_of(g.canon(p))
    if v is not None:
        verts.append(v)
    return Subcontinuum(g, segs, verts)


def _max_min_affine_1d(forms, a, b):
    cands = [a, b]
    for (c0, c1), (d0, d1) in itertools.combinations(forms, 2):
        if c1 != d1:
            t = (d0 - c0) / (c1 - d1)
            if a < t < b:
                cands.append(t)
    return max(min(c0 + c1 * t for c0, c1 in forms) for t in cands)


def _clip(poly, a, b, c):
    """Clip convex polygon to the half-plane a*s + b*t + c >= 0."""
    out = []
    n = len(poly)
    for i in range(n):
        P, R = poly[i], poly[(i + 1) % n]
        fp = a * P[0] + b * P[1] + c
        fr = a * R[0] + b * R[1] + c
        if fp >= 0:
            out.append(P)
        if (fp > 0 and fr < 0) or (fp < 0 and fr > 0):
            lam = fp / (fp - fr)
            out.append((P[0] + lam * (R[0] - P[0]), P[1] + lam * (R[1] - P[1])))
    dedup = []
    for pt in out:
        if not dedup or dedup[-1] != pt:
            dedup.append(pt)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def _max_min_affine_2d(forms, poly):
    """max over a convex polygon of min_k (c0 + cs*s + ct*t)."""
    if not poly:
        return None

    def val(s, t):
        return min(c0 + cs * s + ct * t for c0, cs, ct in forms)

    cands = list(poly)
    n = len(poly)
    diffs = [
        (f[0] - g[0], f[1] - g[1], f[2] - g[2]) for f, g in itertools.combinations(forms, 2)
    ]
    for d0, ds, dt in diffs:
        if ds == 0 and dt == 0:
            continue
        for i in range(n):
            P, R = poly[i], poly[(i + 1) % n]
            fp = d0 + ds * P[0] + dt * P[1]
            fr = d0 + ds * R[0] + dt * R[1]
            if (fp > 0 and fr < 0) or (fp < 0 and fr > 0):
                lam = fp / (fp - fr)
                cands.append((P[0] + lam * (R[0] - P[0]), P[1] + lam * (R[1] - P[1])))
    for (a0, as_, at), (b0, bs, bt) in itertools.combinations(diffs if n >= 3 else (), 2):
        det = as_ * bt - at * bs
        if det == 0:
            continue
        s = (-a0 * bt + at * b0) / det
        t = (-as_ * b0 + a0 * bs) / det
        if _inside(poly, s, t):
            cands.append((s, t))
    return max(val(s, t) for s, t in cands)


def _inside(poly, s, t):
    n = len(poly)
    if n == 1:
        return poly[0] == (s, t)
    sign = 0
    for i in range(n):
        P, R = poly[i], poly[(i + 1) % n]
        cross = (R[0] - P[0]) * (t - P[1]) - (R[1] - P[1]) * (s - P[0])
        if cross != 0:
            cs = 1 if cross > 0 else -1
            if sign == 0:
                sign = cs
            elif cs != sign:
                return False
    return True


def _pair_max(g: MetricGraph, e1, lo1, hi1, e2, lo2, hi2):
    E1, E2 = g.edges[e1], g.edges[e2]
    L1, L2 = E1.length, E2.length
    D = g.vertex_distance
    ends1 = [(E1.tail, ZERO, L1), (E1.head, L1, -L1)]
    ends2 = [(E2.tail, ZERO, L2), (E2.head, L2, -L2)]
    forms = [
        (c1 + c2 + D[v1][v2], s1, s2)
        for v1, c1, s1 in ends1
        for v2, c2, s2 in ends2
    ]
    box = [(lo1, lo2), (hi1, lo2), (hi1, hi2), (lo1, hi2)]
    box = [pt for i, pt in enumerate(box) if pt not in box[:i]]
    if e1 != e2:
        return _max_min_affine_2d(forms, box)
    best = None
    for sign in (1, -1):
        # region sign*(t - s) >= 0, direct distance sign*L*(t - s)
        poly = _clip(box, -sign, sign, ZERO)
        if not poly:
            continue
        val = _max_min_affine_2d(forms + [(ZERO, -sign * L1, sign * L1)], poly)
        if best is None or val > best:
            best = val
    return best


def _diameter(g: MetricGraph, elems):
    if not elems:
        return ZERO
    if len(g.edge_ids) == 1 and not g.edge(g.edge_ids[0]).is_loop:
        # an arc: the diameter is the spread of the parameters
        return (max(hi for _, _, hi in elems) - min(lo for _, lo, _ in elems)) * g.length(g.edge_ids[0])
    best = ZERO
    lens =[float(g.length(e) * (hi - lo)) for e, lo, hi in elems]
    reps = [g.canon(PointRef(e, lo)) for e, lo, hi in elems]
    order = sorted(range(len(elems)), key=lambda i: -lens[i])
    for a_i, i in enumerate(order):
        for j in order[a_i:]:
            ub = float(g.distance(reps[i], reps[j])) + lens[i] + lens[j]
            if ub + 1e-9 < best:
                continue
            val = _pair_max(g, *elems[i], *elems[j])
            if val > best:
                best = val
    return best


# -- covers -----------------------------------------------------------------


@dataclass(frozen=True)
class FiniteCover:
    members: tuple
    mesh: object

    def union(self) -> Subcontinuum:
        first = self.members[0]
        return first.union(*self.members[1:])

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def _make_cover(members) -> FiniteCover:
    members = tuple(members)
    mesh = max((m.diam for m in members), default=ZERO)
    return FiniteCover(members, mesh)


def fine_cover(g: MetricGraph, eps, within: Subcontinuum | None = None) -> FiniteCover:
    """Cover by closed edge segments of length < eps (uniform per edge)."""
    eps = q(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    S = within if within is not None else Subcontinuum.whole(g)
    members = []
    for eid, lo, hi in S.segment_list():
        if lo == hi:
            continue
        L = g.length(eid)
        m = int(L / eps) + 1
        for k in range(m):
            a, b = max(lo, Q(k, m)), min(hi, Q(k + 1, m))
            if a < b:
                members.append(Subcontinuum.segment(g, eid, a, b))
    return _make_cover(members)


def refine_cover(S: Subcontinuum, eps) -> FiniteCover:
    """Members partition-cover ``S`` (their union is exactly S), mesh < eps."""
    return fine_cover(S.graph, eps, within=S)


def grid_level(g: MetricGraph, bound, strict: bool = True, edges=None) -> int:
    """Smallest k with every (relevant) edge length * 2**-k below ``bound``."""
    bound = q(bound)
    Lmax = max(g.length(e) for e in (edges if edges is not None else g.edge_ids))
    k = 0
    while not (Lmax * pow2(k) < bound if strict else Lmax * pow2(k) <= bound):
        k += 1
    return k


def grid_pieces(S: Subcontinuum, level: int) -> list[Subcontinuum]:
    """Split S along the dyadic grid of the given level (nondegenerate pieces)."""
    g = S.graph
    step = pow2(level)
    out = []
    for eid, lo, hi in S.segment_list():
        if lo == hi:
            continue
        k = int(lo / step)
        while True:
            a, b = max(lo, k * step), min(hi, (k + 1) * step)
            if a >= hi:
                break
            if a < b:
                out.append(Subcontinuum.segment(g, eid, a, b))
            k += 1
    return out


# -- segment graphs ------------------------------------------------------------


def segment_graph(S: Subcontinuum, extra_points=()) -> nx.MultiGraph:
    """Combinatorial graph of S: nodes are canonical points, edges are
    sub-segments ``(eid, t0, t1)`` carrying their metric length."""
    g = S.graph
    cuts = {}
    for p in extra_points:
        p = g.canon(p)
        for eid in g.edge_ids:
            for t in g.point_on_edge(p, eid):
                cuts.setdefault(eid, set()).add(t)
    G = nx.MultiGraph()
    for v in S.verts:
        G.add_node(g.vertex_point(v))
    for eid, lo, hi in S.segment_list():
        pts = sorted({lo, hi} | {t for t in cuts.get(eid, ()) if lo <= t <= hi})
        if len(pts) == 1:
            G.add_node(g.canon(PointRef(eid, pts[0])))
            continue
        L = g.length(eid)
        for a, b in zip(pts, pts[1:]):
            pa, pb = g.canon(PointRef(eid, a)), g.canon(PointRef(eid, b))
            if pa == pb or G.has_edge(pa, pb):
                m = (a + b) / 2
                pm = PointRef(eid, m)
                G.add_edge(pa, pm, seg=(eid, a, m), w=L * (m - a))
                G.add_edge(pm, pb, seg=(eid, m, b), w=L * (b - m))
            else:
                G.add_edge(pa, pb, seg=(eid, a, b), w=L * (b - a))
    return G


def _path_segments(G, nodes):
    segs = []
    for u, v in zip(nodes, nodes[1:]):
        data = min(G.get_edge_data(u, v).values(), key=lambda d: d["w"])
        segs.append(data["seg"])
    return segs


def is_cut_point_of(S: Subcontinuum, x: PointRef) -> bool:
    g = S.graph
    x = g.canon(x)
    if S == Subcontinuum.whole(g):
        return classify_point(g, x).is_cut_point
    G = segment_graph(S, [x])
    G.remove_node(x)
    return nx.number_connected_components(G) > 1


def noncut_decomposition(g: MetricGraph, x: PointRef, eps, space: Subcontinuum | None = None):
    """Continua A, B with x in space\\B, space\\B inside A, A inside the open
    eps-ball at x, and B the closure of its interior.

    Built from a dyadic cover of mesh < eps/2; the part away from x is
    reconnected through space minus {x} when needed, then thickened by a
    finer cover so that it becomes regular closed.
    """
    eps = q(eps)
    x = g.canon(x)
    space = space if space is not None else Subcontinuum.whole(g)
    if not space.contains_point(x):
        raise ValueError("x is not in the space")
    if is_cut_point_of(space, x):
        raise CutPoint(f"{x} cuts the space")
    edges = list(space.segs) or None
    level = grid_level(g, eps / 2, edges=edges)
    cells = grid_pieces(space, level)
    near = [c for c in cells if c.contains_point(x)]
    far = [c for c in cells if not c.contains_point(x)]
    A = near[0].union(*near[1:])
    if not far:
        raise CutPoint("space is too small for eps")
    Bp = far[0].union(*far[1:])
    comps = Bp.components()
    if len(comps) > 1:
        G = segment_graph(space, [x] + [g.canon(PointRef(c.segment_list()[0][0], c.segment_list()[0][1])) for c in comps])
        G.remove_node(x)
        anchor = [g.canon(PointRef(c.segment_list()[0][0], c.segment_list()[0][1])) for c in comps]
        extra = []
        for target in anchor[1:]:
            path = nx.shortest_path(G, anchor[0], target, weight="w")
            extra += _path_segments(G, path)
        Bp = Bp.union(Subcontinuum(g, extra))
    delta = Bp.min_distance_to(x)
    inner = grid_level(g, delta / 2, edges=edges)
    B_cells = [c for c in grid_pieces(space, inner) if c.meets(Bp)]
    B = B_cells[0].union(*B_cells[1:])
    return A, B
