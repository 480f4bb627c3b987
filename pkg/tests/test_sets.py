import random

import pytest
from hypothesis import given, strategies as st

from puremix.extension import unit_interval
from puremix.graph import PointRef, point
from puremix.rational import Q
from puremix.sets import CutPoint, Subcontinuum, closed_ball, fine_cover, noncut_decomposition
from puremix.spaces import circle, random_graph, theta, y_tree

DEN = 12


def segs_strategy(g):
    seg = st.tuples(
        st.sampled_from(g.edge_ids), st.integers(0, DEN), st.integers(0, DEN)
    ).map(lambda s: (s[0], Q(min(s[1], s[2]), DEN), Q(max(s[1], s[2]), DEN)))
    return st.lists(seg, max_size=5)


def member(g, segs, p):
    """Membership straight from the raw segment list."""
    for eid, lo, hi in segs:
        for t in g.point_on_edge(p, eid):
            if lo <= t <= hi:
                return True
    return False


def probes(g):
    # a finer grid than the data, so every gap is probed
    return [g.canon(PointRef(e, Q(k, 2 * DEN))) for e in g.edge_ids for k in range(2 * DEN + 1)]


@given(st.data())
def test_union_intersection_pointwise(data):
    g = theta()
    a, b = data.draw(segs_strategy(g)), data.draw(segs_strategy(g))
    A, B = Subcontinuum(g, a), Subcontinuum(g, b)
    U, I = A.union(B), A.intersection(B)
    for p in probes(g):
        ia, ib = member(g, a, p), member(g, b, p)
        assert A.contains_point(p) == ia
        assert U.contains_point(p) == (ia or ib)
        assert I.contains_point(p) == (ia and ib)
    assert A <= U and I <= A and I <= B
    assert U.measure() == A.measure() + B.measure() - I.measure()


@given(st.data())
def test_diameter_against_grid_search(data):
    g = data.draw(st.sampled_from([unit_interval(), circle(), theta(), y_tree((1, 2, 1))]))
    segs = data.draw(segs_strategy(g))
    S = Subcontinuum(g, segs)
    if S.is_empty():
        return
    pts = [p for p in probes(g) if S.contains_point(p)]
    pts += [g.canon(PointRef(e, t)) for e, lo, hi in S.segment_list() for t in (lo, hi)]
    grid = max(g.distance(p, r) for p in pts for r in pts)
    step = max(g.length(e) for e in g.edge_ids) / (2 * DEN)
    assert grid <= S.diam <= grid + 2 * step


def test_diameter_named():
    assert Subcontinuum.whole(unit_interval()).diam == 1
    assert Subcontinuum.whole(circle()).diam == Q(1, 2)
    assert Subcontinuum.whole(theta()).diam == Q(3, 2)
    assert Subcontinuum.whole(y_tree((1, 2, 1))).diam == 3


def test_components_and_complement():
    g = circle()
    S = Subcontinuum(g, [(0, Q(1, 10), Q(2, 10)), (0, Q(5, 10), Q(6, 10))])
    assert len(S.components()) == 2 and not S.is_connected()
    K = S.closure_of_complement()
    assert len(K.components()) == 2
    assert K.measure() == Q(8, 10)
    assert S.union(K) == Subcontinuum.whole(g)


def test_regular_closed():
    g = unit_interval()
    S = Subcontinuum(g, [(0, 0, Q(1, 3))], vertices=[])
    assert S.is_regular_closed()
    P = Subcontinuum.from_point(g, point(0, "1/2"))
    assert not P.is_regular_closed() and not P.has_interior()


def test_closed_ball_on_theta():
    g = theta()
    B = closed_ball(g, g.vertex_point("u"), Q(1, 2))
    assert B.measure() == Q(3, 2)
    assert B.contains_point(point(2, "1/4")) and not B.contains_point(point(2, "1/2"))


@given(st.integers(0, 10**6), st.integers(2, 40))
def test_fine_cover_invariants(seed, inv):
    g = random_graph(random.Random(seed), max_edges=6)
    eps = Q(1, inv)
    cover = fine_cover(g, eps)
    assert cover.union() == Subcontinuum.whole(g)
    assert all(c.diam < eps and c.is_connected() and c.is_regular_closed() for c in cover)
    assert sum((c.measure() for c in cover), Q(0)) == g.total_length


@pytest.mark.parametrize("g,x", [
    (unit_interval(), point(0, 0)),
    (circle(), point(0, "1/3")),
    (theta(), point(2, "1/2")),
    (y_tree(), point(1, 1)),
])
@pytest.mark.parametrize("eps", ["1/2", "1/5", "1/16"])
def test_noncut_decomposition(g, x, eps):
    eps = Q(eps)
    A, B = noncut_decomposition(g, x, eps)
    X = Subcontinuum.whole(g)
    assert not B.contains_point(x)
    assert B.is_connected() and A.is_connected()
    assert B.is_regular_closed()
    assert A.union(B) == X
    # A lies inside the open eps-ball at x
    assert A.max_distance_from(x) < eps


def test_noncut_rejects_cut_point():
    with pytest.raises(CutPoint):
        noncut_decomposition(unit_interval(), point(0, "1/2"), Q(1, 4))
