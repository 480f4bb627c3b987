"""Extending and surjecting: the two workhorse constructions for PL maps.

``tietze_extend`` fills in a real-valued map from finitely many prescribed
values by harmonic interpolation; ``nadler_surjection`` maps an interval onto
a subcontinuum while hitting prescribed points at prescribed times.
"""
from __future__ import annotations

import networkx as nx

from .graph import MetricGraph, PointRef
from .plmap import PLMap
from .rational import ONE, ZERO, q
from .sets import Subcontinuum, segment_graph


class InfeasibleConstraints(ValueError):
    pass


class EmptyTarget(ValueError):
    pass


def unit_interval() -> MetricGraph:
    """The codomain I = [0, 1]: one edge of length 1, so parameter = value."""
    return MetricGraph([0, 1], [(0, 0, 1, 1)])


# -- Tietze ---------------------------------------------------------------


def _solve(A, b):
    """Exact Gauss-Jordan elimination over the rationals."""
    n = len(b)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [x / p for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                k = M[r][col]
                M[r] = [x - k * y for x, y in zip(M[r], M[col])]
    return [M[i][n] for i in range(n)]


def tietze_extend(graph: MetricGraph, values: dict, lo=ZERO, hi=ONE, codomain: MetricGraph | None = None) -> PLMap:
    """Continuous PL extension of ``values`` (point -> number) to the graph.

    The extension is linear between prescribed points and graph vertices and
    harmonic (weighted by inverse length) at free vertices, so by the maximum
    principle it stays within the range of the data.  With no data the map
    is the constant (lo + hi) / 2.
    """
    lo, hi = q(lo), q(hi)
    I = codomain or unit_interval()
    fixed = {}
    for p, val in values.items():
        p = graph.canon(p)
        val = q(val)
        if not lo <= val <= hi:
            raise ValueError(f"value {val} outside [{lo}, {hi}]")
        if fixed.get(p, val) != val:
            raise InfeasibleConstraints(f"two values at {p}")
        fixed[p] = val
    if not fixed:
        mid = (lo + hi) / 2
        return PLMap(graph, I, {e: [(ZERO, ONE, 0, mid, mid)] for e in graph.edge_ids})

    def node(eid, t):
        p = graph.canon(PointRef(eid, t))
        v = graph.vertex_of(p)
        return ("v", v) if v is not None else ("p", p)

    cuts = {e: {ZERO, ONE} for e in graph.edge_ids}
    for p in fixed:
        if graph.vertex_of(p) is None:
            cuts[p.edge].add(p.param)
    segs = []
    for eid in graph.edge_ids:
        ts = sorted(cuts[eid])
        L = graph.length(eid)
        for a, b in zip(ts, ts[1:]):
            segs.append((eid, a, b, node(eid, a), node(eid, b), 1 / (L * (b - a))))
    known = {}
    for p, val in fixed.items():
        v = graph.vertex_of(p)
        known[("v", v) if v is not None else ("p", p)] = val
    free = sorted({n for s in segs for n in s[3:5] if n not in known}, key=repr)
    index = {n: i for i, n in enumerate(free)}
    A = [[ZERO] * len(free) for _ in free]
    rhs = [ZERO] * len(free)
    for _, _, _, u, v, w in segs:
        if u == v:
            continue
        for x, y in ((u, v), (v, u)):
            if x not in index:
                continue
            i = index[x]
            A[i][i] += w
            if y in index:
                A[i][index[y]] -= w
            else:
                rhs[i] += w * known[y]
    sol = dict(zip(free, _solve(A, rhs))) if free else {}
    sol.update(known)
    pieces = {}
    for eid, a, b, u, v, _ in segs:
        pieces.setdefault(eid, []).append((a, b, 0, sol[u], sol[v]))
    return PLMap(graph, I, pieces)


# -- surjections ----------------------------------------------------------


def _walk(G, nodes):
    """Oriented codomain segments ``(eid, u_from, u_to, length)`` along a node path."""
    out = []
    for x, y in zip(nodes, nodes[1:]):
        out.append(_orient(G, x, min(G.get_edge_data(x, y).values(), key=lambda d: d["w"])))
    return out


def _orient(G, x, data):
    # segment_graph splits loops, so the two ends of a segment are distinct nodes
    eid, a, b = data["seg"]
    if G.graph["metric"].canon(PointRef(eid, a)) == x:
        return eid, a, b, data["w"]
    return eid, b, a, data["w"]


def _euler_walk(G, start):
    """Closed walk from ``start`` traversing every segment of G twice.

    Depth-first traversal that crosses each edge out and back: an Euler
    circuit of the doubled graph.
    """
    out = []
    used = set()
    seen = {start}
    stack = [(start, iter(G.edges(start, data=True)), None)]
    while stack:
        x, it, back = stack[-1]
        step = next(((y, d) for _, y, d in it if d["seg"] not in used), None)
        if step is None:
            stack.pop()
            if back is not None:
                out.append(back)
            continue
        y, data = step
        used.add(data["seg"])
        out.append(_orient(G, x, data))
        ret = _orient(G, y, data)
        if y in seen:
            out.append(ret)
        else:
            seen.add(y)
            stack.append((y, iter(G.edges(y, data=True)), ret))
    return out


def _timed(t0, t1, walk):
    """Spread a walk over [t0, t1] proportionally to arclength."""
    if not walk:
        return []
    total = sum(w for *_, w in walk)
    out = []
    t = t0
    acc = ZERO
    for i, (eid, ua, ub, w) in enumerate(walk):
        acc += w
        t_next = t1 if i == len(walk) - 1 else t0 + (t1 - t0) * acc / total
        if t_next > t:
            out.append((t, t_next, eid, ua, ub))
        t = t_next
    return out


def surject_interval(a, b, target: Subcontinuum, constraints: dict | None = None) -> list:
    """Pieces ``(t0, t1, eid, u0, u1)`` of a PL map of [a, b] onto ``target``
    with ``g(t) = p`` for every ``t -> p`` in ``constraints``."""
    a, b = q(a), q(b)
    g = target.graph
    if target.is_empty():
        raise EmptyTarget("target set is empty")
    cons = {}
    for t, p in (constraints or {}).items():
        t, p = q(t), g.canon(p)
        if not a <= t <= b:
            raise InfeasibleConstraints(f"constraint time {t} outside [{a}, {b}]")
        if not target.contains_point(p):
            raise InfeasibleConstraints(f"constraint point {p} not in target")
        if cons.get(t, p) != p:
            raise InfeasibleConstraints(f"two points prescribed at t={t}")
        cons[t] = p
    if not target.is_connected():
        raise InfeasibleConstraints("target is not connected")
    G = segment_graph(target, list(cons.values()))
    G.graph["metric"] = g
    if G.number_of_edges() == 0:
        (only,) = G.nodes
        return [(a, b, only.edge, only.param, only.param)] if a < b else []
    if not a < b:
        raise InfeasibleConstraints("cannot map a point onto a nondegenerate continuum")
    times = sorted(cons)
    if not times:
        start = min(G.nodes)
        return _timed(a, b, _euler_walk(G, start))
    pts = [cons[t] for t in times]
    gaps = [(a, times[0])] + list(zip(times, times[1:])) + [(times[-1], b)]
    sweep = max(range(len(gaps)), key=lambda i: (gaps[i][1] - gaps[i][0], -i))
    out = []
    for i, (t0, t1) in enumerate(gaps):
        if t1 == t0:
            continue
        if i == 0:
            left = right = pts[0]
        elif i == len(gaps) - 1:
            left = right = pts[-1]
        else:
            left, right = pts[i - 1], pts[i]
        walk = []
        if i == sweep:
            walk = _euler_walk(G, left)
        if left != right:
            walk += _walk(G, nx.shortest_path(G, left, right, weight="w"))
        if walk:
            out += _timed(t0, t1, walk)
        else:
            out.append((t0, t1, left.edge, left.param, left.param))
    return out


def nadler_surjection(a, b, target: Subcontinuum, constraints: dict | None = None) -> PLMap:
    """PL map I -> X onto ``target`` on [a, b], constant on [0, a] and [b, 1]."""
    a, b = q(a), q(b)
    if not 0 <= a <= b <= 1:
        raise InfeasibleConstraints("need 0 <= a <= b <= 1")
    mid = surject_interval(a, b, target, constraints)
    if not mid:
        raise InfeasibleConstraints("empty time interval")
    pieces = []
    if a > 0:
        pieces.append((ZERO, a, mid[0][2], mid[0][3], mid[0][3]))
    pieces += mid
    if b < 1:
        pieces.append((b, ONE, mid[-1][2], mid[-1][4], mid[-1][4]))
    return PLMap(unit_interval(), target.graph, {0: pieces})
