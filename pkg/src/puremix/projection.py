"""Projections f: X -> [0, 1] with singleton end fibers and no flat pieces.

``f`` equals the distance to ``x`` near ``x``, one minus the distance to ``y``
near ``y``, and a harmonic fill in between.  Localized tent bumps then remove
every interval on which ``f`` is constant, so every open set has an image
with nonempty interior while the fibers over 0 and 1 stay single points.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from itertools import combinations

from .certificate import Certificate, checklist
from .extension import tietze_extend, unit_interval
from .graph import MetricGraph, PointRef
from .plmap import PLMap
from .rational import HALF, ONE, ZERO, pow2
from .sets import Subcontinuum, fine_cover

QUARTER = ONE / 4


class DegenerateSpec(ValueError):
    pass


@dataclass
class ProjectionSpec:
    space: MetricGraph
    x: PointRef
    y: PointRef | None = None
    basis: list | None = None
    depth: int = 3
    variant: bool = False  # allow y to be chosen (farthest point from x)


# -- real-valued PL functions on one edge, as knot lists [(t, value)] ----------


def _simplify(knots):
    out = []
    for t, v in knots:
        if out and out[-1][0] == t:
            continue
        if len(out) >= 2:
            (t0, v0), (t1, v1) = out[-2], out[-1]
            if (v1 - v0) * (t - t1) == (v - v1) * (t1 - t0):
                out[-1] = (t, v)
                continue
        out.append((t, v))
    return out


def envelope_knots(t0, t1, forms):
    """Knots of ``min(c0 + c1 t)`` on [t0, t1]."""
    cands = {t0, t1}
    for (a0, a1), (b0, b1) in combinations(forms, 2):
        if a1 != b1:
            t = (b0 - a0) / (a1 - b1)
            if t0 < t < t1:
                cands.add(t)
    return [(t, min(c0 + c1 * t for c0, c1 in forms)) for t in sorted(cands)]


def distance_knots(g: MetricGraph, p: PointRef, eid: int):
    knots = []
    for t0, t1, forms in g.distance_forms(p, eid):
        knots += envelope_knots(t0, t1, forms)
    return _simplify(knots)


def eval_knots(knots, t):
    ts = [k[0] for k in knots]
    j = min(max(bisect.bisect_right(ts, t) - 1, 0), len(knots) - 2)
    (t0, v0), (t1, v1) = knots[j], knots[j + 1]
    return v0 + (t - t0) * (v1 - v0) / (t1 - t0)


def level_crossings(knots, level):
    out = []
    for (t0, v0), (t1, v1) in zip(knots, knots[1:]):
        if v0 == level:
            out.append(t0)
        if (v0 - level) * (v1 - level) < 0:
            out.append(t0 + (level - v0) * (t1 - t0) / (v1 - v0))
    if knots[-1][1] == level:
        out.append(knots[-1][0])
    return out


def map_knots(f: PLMap, eid):
    """Knots of a map into the unit interval (parameter = value)."""
    return [(s0, u0) for s0, _, _, u0, _ in f.pieces(eid)] + [(ONE, list(f.pieces(eid))[-1][4])]


def knots_to_map(g: MetricGraph, knots_by_edge: dict) -> PLMap:
    pieces = {}
    for eid, knots in knots_by_edge.items():
        pieces[eid] = [(t0, t1, 0, v0, v1) for (t0, v0), (t1, v1) in zip(knots, knots[1:])]
    return PLMap(g, unit_interval(), pieces)


def farthest_point(g: MetricGraph, p: PointRef) -> PointRef:
    best = None
    for eid in g.edge_ids:
        for t, d in distance_knots(g, p, eid):
            cand = (-d, g.canon(PointRef(eid, t)))
            if best is None or cand < best:
                best = cand
    return best[1]


# -- construction ------------------------------------------------------------


def _resolve(spec: ProjectionSpec):
    g = spec.space
    x = g.canon(spec.x)
    y = None if spec.y is None else g.canon(spec.y)
    if y is None or y == x:
        if not spec.variant:
            raise DegenerateSpec("x and y must be distinct points")
        y = farthest_point(g, x)
    return g, x, y


def default_basis(g: MetricGraph, depth: int) -> list:
    out = []
    for n in range(1, depth + 1):
        out.append(list(fine_cover(g, pow2(n))))
    return out


def _base_knots(g: MetricGraph, x, y):
    """f0 on the graph ``g`` normalized so that d(x, y) = 1."""
    fix = {}
    dx = {e: distance_knots(g, x, e) for e in g.edge_ids}
    dy = {e: distance_knots(g, y, e) for e in g.edge_ids}
    for e in g.edge_ids:
        for t in level_crossings(dx[e], QUARTER):
            fix[g.canon(PointRef(e, t))] = QUARTER
        for t in level_crossings(dy[e], QUARTER):
            fix[g.canon(PointRef(e, t))] = 3 * QUARTER
    fill = tietze_extend(g, fix, QUARTER, 3 * QUARTER)
    out = {}
    for e in g.edge_ids:
        kt = map_knots(fill, e)
        ts = {t for t, _ in dx[e] + dy[e] + kt}
        ts |= set(level_crossings(dx[e], QUARTER)) | set(level_crossings(dy[e], QUARTER))
        ts = sorted(ts)
        knots = []
        for ta, tb in zip(ts, ts[1:]):
            m = (ta + tb) / 2
            if eval_knots(dx[e], m) <= QUARTER:
                fn = lambda t: eval_knots(dx[e], t)
            elif eval_knots(dy[e], m) <= QUARTER:
                fn = lambda t: 1 - eval_knots(dy[e], t)
            else:
                fn = lambda t: eval_knots(kt, t)
            knots += [(ta, fn(ta)), (tb, fn(tb))]
        out[e] = _simplify(knots)
    return out


def _bump_knots(g: MetricGraph, eid, lo, hi, amp):
    """``min(amp, c * d(., X minus G))`` for G = [lo, hi] on one edge, scaled so
    the bump is a tent or a ramp with no plateau."""
    e = g.edge(eid)
    L = g.length(eid)
    left_open = not (lo == 0 and g.degree(e.tail) == 1)
    right_open = not (hi == 1 and g.degree(e.head) == 1)
    if left_open and right_open:
        m = (lo + hi) / 2
        return [(lo, ZERO), (m, min(amp, L * (hi - lo) / 2)), (hi, ZERO)]
    if left_open:
        return [(lo, ZERO), (hi, min(amp, L * (hi - lo)))]
    if right_open:
        return [(lo, min(amp, L * (hi - lo))), (hi, ZERO)]
    return None


def _add(knots, bump, sign):
    lo, hi = bump[0][0], bump[-1][0]
    ts = sorted({t for t, _ in knots} | {t for t, _ in bump})
    out = []
    for t in ts:
        v = eval_knots(knots, t)
        if lo <= t <= hi:
            v += sign * eval_knots(bump, t)
        out.append((t, v))
    return _simplify(out)


def _flat_on(knots, lo, hi):
    v = eval_knots(knots, lo)
    return eval_knots(knots, hi) == v and all(val == v for t, val in knots if lo < t < hi)


def _flat_runs(knots):
    return [(t0, t1, v0) for (t0, v0), (t1, v1) in zip(knots, knots[1:]) if v0 == v1]


def projection_stages(spec: ProjectionSpec) -> list[PLMap]:
    """f_0, f_1, ..., f_N and a final clean-up stage; the last is the projection."""
    g0, x, y = _resolve(spec)
    g = g0.scaled(1 / g0.distance(x, y))
    basis = spec.basis if spec.basis is not None else default_basis(g0, spec.depth)
    if basis and isinstance(basis[0], Subcontinuum):
        basis = [basis]
    knots = _base_knots(g, x, y)
    stages = [knots_to_map(g, knots)]
    for n, layer in enumerate(basis, start=1):
        amp = pow2(n + 2)
        for G in layer:
            for eid, lo, hi in G.segment_list():
                if lo < hi and _flat_on(knots[eid], lo, hi):
                    bump = _bump_knots(g, eid, lo, hi, amp)
                    if bump is not None:
                        sign = 1 if eval_knots(knots[eid], lo) <= HALF else -1
                        knots[eid] = _add(knots[eid], bump, sign)
        stages.append(knots_to_map(g, knots))
    amp = pow2(len(basis) + 3)
    for eid in g.edge_ids:
        for lo, hi, v in _flat_runs(knots[eid]):
            bump = _bump_knots(g, eid, lo, hi, amp)
            if bump is not None:
                knots[eid] = _add(knots[eid], bump, 1 if v <= HALF else -1)
    stages.append(knots_to_map(g, knots))
    I = unit_interval()
    return [f.with_graphs(g0, I) for f in stages]


def build_projection(spec: ProjectionSpec) -> PLMap:
    return projection_stages(spec)[-1]


def verify_projection(f: PLMap, spec: ProjectionSpec) -> Certificate:
    g, x, y = _resolve(spec)
    zero = f.preimage_of(PointRef(0, ZERO))
    one = f.preimage_of(PointRef(0, ONE))
    basis = spec.basis if spec.basis is not None else default_basis(g, spec.depth)
    if basis and isinstance(basis[0], Subcontinuum):
        basis = [basis]
    degenerate = []
    for layer in basis:
        for G in layer:
            img = f.image_of(G)
            if img.measure() == 0:
                degenerate.append(repr(G))
    checks = {
        "fiber_0": zero == Subcontinuum.from_point(g, x),
        "fiber_1": one == Subcontinuum.from_point(g, y),
        "open_images": not degenerate,
    }
    return checklist(
        "projection",
        checks,
        witnesses={"preimage_0": repr(zero), "preimage_1": repr(one), "degenerate_images": degenerate},
    )
