"""Standard spaces and small reference maps."""
from __future__ import annotations

import random

from .extension import unit_interval
from .graph import MetricGraph
from .plmap import PLMap, from_values
from .rational import HALF, ONE, Q, ZERO, q

interval = unit_interval


def circle(length=1) -> MetricGraph:
    return MetricGraph(["v"], [(0, "v", "v", length)])


def theta() -> MetricGraph:
    return MetricGraph(["u", "v"], [(0, "u", "v", 1), (1, "u", "v", 1), (2, "u", "v", 2)])


def y_tree(lengths=(1, 1, 1)) -> MetricGraph:
    edges = [(i, "c", f"l{i}", L) for i, L in enumerate(lengths)]
    return MetricGraph(["c"] + [f"l{i}" for i in range(len(lengths))], edges)


def random_graph(rng: random.Random, max_edges: int = 12) -> MetricGraph:
    """Connected multigraph: a random tree plus extra edges, loops allowed."""
    nv = rng.randint(2, max(2, max_edges // 2))
    edges = []
    for v in range(1, nv):
        edges.append((v - 1 if rng.random() < 0.3 else rng.randrange(v), v))
    while len(edges) < max_edges and rng.random() < 0.7:
        edges.append((rng.randrange(nv), rng.randrange(nv)))
    spec = [(i, a, b, Q(rng.randint(1, 4), rng.randint(1, 3))) for i, (a, b) in enumerate(edges)]
    return MetricGraph(range(nv), spec)


def knot_map(values) -> PLMap:
    """Interval self-map through equally spaced knots ``values``."""
    I = unit_interval()
    n = len(values) - 1
    return from_values(I, I, {0: [(Q(k, n), q(v)) for k, v in enumerate(values)]})


def tent() -> PLMap:
    return knot_map([0, 1, 0])


def sawtooth(k: int) -> PLMap:
    """Full k-branch map: alternating 0/1 knots."""
    return knot_map([j % 2 for j in range(k + 1)])


def identity_interval() -> PLMap:
    return knot_map([0, 1])


def flip() -> PLMap:
    return knot_map([1, 0])


def permutation_map(perm) -> PLMap:
    """Connect-the-dots map sending knot j/n to perm[j]/n."""
    n = len(perm) - 1
    return knot_map([Q(p, n) for p in perm])


def rotation(p: int, r: int) -> PLMap:
    """Rotation of the unit circle by p/r (pieces split at the wrap point)."""
    C = circle()
    a = Q(p % r, r)
    if a == 0:
        return PLMap(C, C, {0: [(ZERO, ONE, 0, ZERO, ONE)]})
    cut = 1 - a
    return PLMap(C, C, {0: [(ZERO, cut, 0, a, ONE), (cut, ONE, 0, ZERO, a)]})


def circle_doubling() -> PLMap:
    C = circle()
    return PLMap(C, C, {0: [(ZERO, HALF, 0, ZERO, ONE), (HALF, ONE, 0, ZERO, ONE)]})


def markov_corpus() -> list:
    """Named Markov interval maps with at most 8 cells."""
    out = [("tent", tent()), ("identity", identity_interval()), ("flip", flip())]
    out += [(f"sawtooth{k}", sawtooth(k)) for k in range(2, 8)]
    perms = [
        [1, 2, 0], [2, 0, 1], [1, 3, 2, 0], [2, 3, 0, 1], [1, 2, 3, 0], [3, 0, 2, 1],
        [2, 4, 3, 1, 0], [1, 4, 0, 3, 2], [3, 4, 2, 0, 1], [0, 2, 1], [1, 0, 2],
        [2, 0, 3, 1], [0, 3, 1, 2], [4, 2, 0, 3, 1], [2, 1, 0], [1, 2, 4, 3, 0],
        [3, 1, 4, 0, 2], [0, 1, 3, 2],
    ]
    out += [("perm" + "".join(map(str, p)), permutation_map(p)) for p in perms]
    out += [("half_tent", knot_map([0, HALF, 0])), ("half_const", knot_map([HALF, HALF]))]
    return out


def circle_corpus() -> list:
    return [(f"rotation{p}/{r}", rotation(p, r)) for p, r in [(0, 1), (1, 2), (1, 3), (2, 5)]] + [
        ("doubling", circle_doubling())
    ]
