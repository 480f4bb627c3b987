
import pytest
from hypothesis import given, strategies as st

from oracles import F, pl_eval
from puremix.extension import unit_interval
from puremix.graph import PointRef, point
from puremix.plmap import (
    DiscontinuousMap, DomainMismatch, PLMap, compose, constant, identity, iterate, sup_distance,
)
from puremix.rational import HALF, ONE, Q, ZERO
from puremix.sets import Subcontinuum
from puremix.spaces import circle, circle_doubling, knot_map, rotation, sawtooth, tent, theta

I = unit_interval()
knots = st.lists(st.integers(0, 6).map(lambda k: Q(k, 6)), min_size=2, max_size=6)
params = st.integers(0, 60).map(lambda k: Q(k, 60))


def test_tent_values():
    T = tent()
    assert T(point(0, "1/3")) == point(0, "2/3")
    assert T(point(0, "3/4")) == point(0, "1/2")
    assert T.preimage_points(point(0, "1/2")) == [point(0, "1/4"), point(0, "3/4")]
    assert T.image_of(Subcontinuum.segment(I, 0, 0, Q(1, 4))) == Subcontinuum.segment(I, 0, 0, HALF)


@given(knots, knots, params)
def test_compose_pointwise(a, b, x):
    f, g = knot_map(a), knot_map(b)
    fg = compose(f, g)
    y = pl_eval([F(v) for v in b], F(x))
    assert F(fg(PointRef(0, x)).param) == pl_eval([F(v) for v in a], y)


@given(knots, params)
def test_iterate_pointwise(a, x):
    f = knot_map(a)
    f3 = iterate(f, 3)
    y = F(x)
    for _ in range(3):
        y = pl_eval([F(v) for v in a], y)
    assert F(f3(PointRef(0, x)).param) == y


@given(knots, params, params)
def test_image_of_segment_is_range(a, s, t):
    f = knot_map(a)
    lo, hi = min(s, t), max(s, t)
    img = f.image_of(Subcontinuum.segment(I, 0, lo, hi))
    # range of a PL function: endpoints and interior knots
    n = len(a) - 1
    vals = [pl_eval(a, F(lo)), pl_eval(a, F(hi))] + [F(a[k]) for k in range(n + 1) if lo <= Q(k, n) <= hi]
    (seg,) = img.segment_list() if img.segs else [(0, None, None)]
    if seg[1] is None:
        assert min(vals) == max(vals) and img.contains_point(PointRef(0, Q(vals[0])))
    else:
        assert (F(seg[1]), F(seg[2])) == (min(vals), max(vals))


@given(knots, params)
def test_preimage_points_map_back(a, y):
    f = knot_map(a)
    for p in f.preimage_points(PointRef(0, y)):
        assert f(p) == I.canon(PointRef(0, y))


def test_preimage_with_flat_piece():
    f = knot_map([0, HALF, HALF, 1])
    pre = f.preimage_of(point(0, "1/2"))
    assert pre == Subcontinuum.segment(I, 0, Q(1, 3), Q(2, 3))


def test_sup_distance_values():
    # exact sup of |tent(x) - x| is 1, attained at x = 1
    assert sup_distance(tent(), identity(I)) == 1
    assert sup_distance(circle_doubling(), identity(circle())) == HALF
    assert sup_distance(rotation(1, 3), identity(circle())) == Q(1, 3)
    assert sup_distance(tent(), tent()) == 0


def test_discontinuous_pieces_rejected():
    with pytest.raises(DiscontinuousMap):
        PLMap(I, I, {0: [(ZERO, HALF, 0, ZERO, HALF), (HALF, ONE, 0, Q(3, 4), ONE)]})
    C = circle()
    with pytest.raises(DiscontinuousMap):
        PLMap(C, C, {0: [(ZERO, ONE, 0, ZERO, HALF)]})


def test_domain_mismatch():
    with pytest.raises(DomainMismatch):
        compose(tent(), identity(circle()))
    with pytest.raises(DomainMismatch):
        iterate(constant(I, circle(), point(0, 0)), 2)


def test_surjectivity():
    assert tent().is_surjective() and sawtooth(3).is_surjective()
    assert not knot_map([0, HALF, 0]).is_surjective()
    T = theta()
    assert not constant(T, T, point(0, "1/2")).is_surjective()
    assert identity(T).is_surjective()


def test_circle_maps_wrap():
    D = circle_doubling()
    assert D(point(0, "3/4")) == point(0, "1/2")
    R = rotation(2, 5)
    assert iterate(R, 5)(point(0, "1/7")) == point(0, "1/7")
