import random

import pytest
from hypothesis import given, strategies as st

from oracles import F, brute_classify, brute_distance
from puremix.extension import unit_interval
from puremix.graph import (
    BaseCase, DegenerateSpace, Disconnected, GraphError, InvalidPoint, MetricGraph,
    NonpositiveLength, PointRef, classify_point, point, select_base_point, validate_graph,
)
from puremix.rational import Q
from puremix.spaces import circle, random_graph, theta, y_tree


def test_canonical_vertex_points():
    g = theta()
    assert g.canon(point(1, 0)) == g.canon(point(2, 0)) == g.canon(point(0, 0))
    assert g.canon(point(2, 1)) == g.vertex_point("v")
    assert g.same_point(point(0, 1), point(1, 1))


@pytest.mark.parametrize("p", [PointRef(7, Q(1, 2)), PointRef(0, Q(3, 2)), PointRef(0, Q(-1))])
def test_invalid_points(p):
    with pytest.raises(InvalidPoint):
        theta().canon(p)


def test_validation_errors():
    with pytest.raises(DegenerateSpace):
        validate_graph(MetricGraph(["a"], []))
    with pytest.raises(NonpositiveLength):
        validate_graph(MetricGraph(["a", "b"], [(0, "a", "b", 0)]))
    with pytest.raises(Disconnected):
        validate_graph(MetricGraph(["a", "b", "c", "d"], [(0, "a", "b", 1), (1, "c", "d", 1)]))
    with pytest.raises(GraphError):
        MetricGraph(["a", "b"], [(0, "a", "b", 1), (0, "a", "b", 2)])


def test_known_distances():
    I = unit_interval()
    assert I.distance(point(0, "1/4"), point(0, "9/10")) == Q(13, 20)
    C = circle()
    assert C.distance(point(0, "1/10"), point(0, "9/10")) == Q(1, 5)
    T = theta()
    # the long edge is never the shortcut
    assert T.distance(point(2, "1/2"), point(0, "1/2")) == Q(3, 2)


@given(st.integers(0, 10**6), st.data())
def test_distance_matches_floyd_warshall(seed, data):
    g = random_graph(random.Random(seed), max_edges=8)
    pick = lambda: PointRef(
        data.draw(st.sampled_from(g.edge_ids)),
        Q(data.draw(st.integers(0, 12)), 12),
    )
    p, r = pick(), pick()
    d = g.distance(p, r)
    assert F(d) == brute_distance(g, g.canon(p), g.canon(r))
    assert d == g.distance(r, p)


@pytest.mark.parametrize("seed", range(20))
def test_classifier_matches_brute_force(seed):
    g = random_graph(random.Random(seed))
    pts = [g.vertex_point(v) for v in g.vertices] + [PointRef(e, Q(1, 2)) for e in g.edge_ids]
    for p in pts:
        pc = classify_point(g, p)
        cut, order = brute_classify(g, g.canon(p))
        assert (pc.is_cut_point, pc.menger_order) == (cut, order)
        assert pc.is_local_cut_point == (order >= 2)
        assert pc.is_endpoint == (order == 1)


def test_classifier_named_cases():
    I, C = unit_interval(), circle()
    assert classify_point(I, point(0, 0)).is_endpoint
    mid = classify_point(I, point(0, "1/2"))
    assert mid.is_cut_point and mid.menger_order == 2
    c = classify_point(C, point(0, 0))
    assert not c.is_cut_point and c.menger_order == 2
    branch = classify_point(y_tree(), y_tree().vertex_point("c"))
    assert branch.is_cut_point and branch.menger_order == 3


def test_select_base_point():
    for tree in (unit_interval(), y_tree(), y_tree((1, 2, 3, 1))):
        p, case = select_base_point(tree)
        assert case == BaseCase.NOT_LOCAL_CUT
        assert classify_point(tree, p).is_endpoint
    for g in (circle(), theta()):
        p, case = select_base_point(g)
        assert case == BaseCase.ORDER2_LOCAL_CUT
        pc = classify_point(g, p)
        assert pc.menger_order == 2 and not pc.is_cut_point


def test_scaled():
    g = theta().scaled(3)
    assert g.total_length == 12
    assert g.distance(point(0, 0), point(0, 1)) == 3
