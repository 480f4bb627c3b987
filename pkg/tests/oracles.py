"""Independent reference implementations used as test oracles.

None of these call into the package's own algorithms beyond reading
graph data; they trade speed for obviousness.
"""
from fractions import Fraction

import networkx as nx
import numpy as np


def F(x):
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(int(x.numerator), int(x.denominator))


def subdivided(g, cut=None):
    """Graph with every edge split at its midpoint and at ``cut`` (a
    PointRef interior to an edge), as a plain networkx Graph."""
    G = nx.Graph()
    G.add_nodes_from(("v", v) for v in g.vertices)
    for e in g.edges.values():
        ts = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]
        if cut is not None and cut.edge == e.id and 0 < cut.param < 1:
            ts = sorted(set(ts) | {F(cut.param)})
        nodes = [("v", e.tail)] + [("e", e.id, t) for t in ts[1:-1]] + [("v", e.head)]
        nx.add_path(G, nodes)
    return G


def point_node(g, p):
    if p.param == 0:
        return ("v", g.edges[p.edge].tail)
    if p.param == 1:
        return ("v", g.edges[p.edge].head)
    return ("e", p.edge, F(p.param))


def brute_classify(g, p):
    """(is_cut_point, menger_order) by deleting the point and counting."""
    G = subdivided(g, p)
    node = point_node(g, p)
    order = G.degree(node)
    G.remove_node(node)
    return nx.number_connected_components(G) > 1, order


def brute_distance(g, p, r):
    """Floyd-Warshall in Fractions on the graph with p and r inserted."""
    nodes = {("v", v) for v in g.vertices}
    ends = {}
    for e in g.edges.values():
        ts = {Fraction(0), Fraction(1)}
        for s in (p, r):
            if s.edge == e.id:
                ts.add(F(s.param))
        ends[e.id] = sorted(ts)
    idx = {}

    def node(eid, t):
        e = g.edges[eid]
        key = ("v", e.tail) if t == 0 else ("v", e.head) if t == 1 else ("e", eid, t)
        return idx.setdefault(key, len(idx))

    edges = []
    for eid, ts in ends.items():
        L = F(g.edges[eid].length)
        for a, b in zip(ts, ts[1:]):
            edges.append((node(eid, a), node(eid, b), (b - a) * L))
    for v in nodes:
        idx.setdefault(v, len(idx))
    n = len(idx)
    inf = None
    D = [[inf] * n for _ in range(n)]
    for i in range(n):
        D[i][i] = Fraction(0)
    for a, b, w in edges:
        if D[a][b] is None or w < D[a][b]:
            D[a][b] = D[b][a] = w
    for k in range(n):
        for i in range(n):
            if D[i][k] is None:
                continue
            for j in range(n):
                if D[k][j] is None:
                    continue
                c = D[i][k] + D[k][j]
                if D[i][j] is None or c < D[i][j]:
                    D[i][j] = c
    return D[node(p.edge, F(p.param))][node(r.edge, F(r.param))]


def brute_primitive(M):
    """Some power up to the Wielandt bound is entrywise positive."""
    A = (np.asarray(M) > 0).astype(np.int64)
    n = A.shape[0]
    P = A.copy()
    for _ in range((n - 1) ** 2 + 1):
        if P.all():
            return True
        P = ((P @ A) > 0).astype(np.int64)
    return bool(P.all())


def pl_eval(knots, x):
    """Evaluate a PL interval map given by equally spaced knot values."""
    knots = [F(v) for v in knots]
    k = len(knots) - 1
    x = F(x)
    i = min(int(x * k), k - 1)
    t = x * k - i
    return knots[i] + (knots[i + 1] - knots[i]) * t
