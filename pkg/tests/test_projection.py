import pytest

from puremix.extension import unit_interval
from puremix.graph import PointRef, point
from puremix.plmap import constant, sup_distance
from puremix.projection import (
    DegenerateSpec, ProjectionSpec, build_projection, default_basis, projection_stages, verify_projection,
)
from puremix.rational import HALF, Q, pow2
from puremix.sets import Subcontinuum
from puremix.spaces import circle, tent, theta, y_tree

SPECS = [
    ProjectionSpec(unit_interval(), point(0, 0), point(0, 1), depth=3),
    ProjectionSpec(circle(), point(0, 0), point(0, "1/2"), depth=3),
    ProjectionSpec(theta(), point(2, "1/2"), point(0, "1/2"), depth=2),
    ProjectionSpec(y_tree((1, 2, 1)), point(0, 1), None, depth=2, variant=True),
]


def zeros_and_ones(f):
    """Points where f hits 0 or 1, read off the raw pieces."""
    g = f.domain
    hits = {0: set(), 1: set()}
    for eid, s0, s1, c, u0, u1 in f.all_pieces():
        for level in (0, 1):
            if u0 == u1 == level:
                hits[level].add(("seg", eid, s0, s1))
            elif u0 == level:
                hits[level].add(g.canon(PointRef(eid, s0)))
            elif u1 == level:
                hits[level].add(g.canon(PointRef(eid, s1)))
    return hits


@pytest.mark.parametrize("spec", SPECS, ids=["interval", "circle", "theta", "ytree"])
def test_projection_fibers_and_images(spec):
    f = build_projection(spec)
    g = spec.space
    hits = zeros_and_ones(f)
    assert hits[0] == {g.canon(spec.x)}
    (y,) = hits[1]
    if spec.y is not None:
        assert y == g.canon(spec.y)
    # every basis member is sent onto a nondegenerate interval: probe values
    for layer in default_basis(g, spec.depth):
        for G in layer:
            vals = set()
            for eid, lo, hi in G.segment_list():
                for k in range(5):
                    vals.add(f(PointRef(eid, lo + (hi - lo) * Q(k, 4))).param)
            assert len(vals) > 1
    assert verify_projection(f, spec).ok


@pytest.mark.parametrize("spec", SPECS, ids=["interval", "circle", "theta", "ytree"])
def test_stage_invariants(spec):
    stages = projection_stages(spec)
    g = spec.space
    x = g.canon(spec.x)
    for n, (a, b) in enumerate(zip(stages, stages[1:])):
        assert sup_distance(a, b) < pow2(n)
        # the quarter sub-level set never grows and keeps x as its only zero
        assert b.preimage_of(PointRef(0, 0)) == Subcontinuum.from_point(g, x)
        for eid, s0, s1, c, u0, u1 in b.all_pieces():
            for s in (s0, s1):
                p = PointRef(eid, s)
                if b(p).param <= Q(1, 4):
                    assert a(p).param <= Q(1, 4)
                    assert b(p).param >= a(p).param


def test_degenerate_spec():
    with pytest.raises(DegenerateSpec):
        build_projection(ProjectionSpec(unit_interval(), point(0, 0), point(0, 0)))


def test_verify_rejects_bad_maps():
    I = unit_interval()
    spec = ProjectionSpec(I, point(0, 0), point(0, 1), depth=2)
    half = constant(I, I, PointRef(0, HALF))
    cert = verify_projection(half, spec)
    assert not cert.ok and set(cert.failures) == {"fiber_0", "fiber_1", "open_images"}
    cert = verify_projection(tent(), spec)
    assert not cert.ok and "fiber_0" in cert.failures
