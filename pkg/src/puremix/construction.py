"""Staged construction of a pure mixing map h = g o f.

``f: X -> [0, 1]`` comes from :mod:`projection`.  The maps ``g_n: [0, 1] -> X``
are built stage by stage: each stage refines the cover ``F_n``, grows the
anchor interval ``[a_n, b_n]`` towards [0, 1], plants periodic seeds ``S_n``
and re-surjects every grid interval onto a slightly larger continuum so that
images of cover members keep covering more of the space.

Two modes are supported.  In the two-sided mode both ``x1`` and ``x2`` are
kept fixed with singleton fibers.  In the one-sided mode (``x1 == x2``) the
second end is the far point ``y = f^-1(1)`` and nothing is tracked there.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field, replace

import networkx as nx

from .extension import nadler_surjection, surject_interval, unit_interval
from .graph import GraphError, MetricGraph, PointRef
from .plmap import PLMap, compose, sup_distance
from .rational import ONE, ZERO, pow2, simplest_between
from .sets import (
    Subcontinuum,
    closed_ball,
    grid_level,
    grid_pieces,
    noncut_decomposition,
    segment_graph,
)


class ProjectionInvalid(ValueError):
    pass


class StageInfeasible(RuntimeError):
    def __init__(self, prop, msg):
        super().__init__(f"property ({prop}): {msg}")
        self.prop = prop


class FiberViolation(RuntimeError):
    pass


@dataclass
class StageState:
    n: int
    cover: list                  # F_n
    A: Subcontinuum
    Ap: Subcontinuum | None      # None in one-sided mode
    a: object
    b: object
    g: PLMap                     # [0, 1] -> space
    S: tuple                     # sorted seeds in [a, b]
    f: PLMap
    x1: PointRef
    x2: PointRef                 # equals the far point y in one-sided mode
    covers: tuple = ()           # F_0, ..., F_n
    anchors: tuple = ()          # (a_0, b_0), ..., (a_n, b_n)
    refined: list = field(default_factory=list)   # F'_n (F_n without C, C')
    tgrid: tuple = ()
    H: tuple = ()
    C: Subcontinuum | None = None
    Cp: Subcontinuum | None = None
    pullbacks: dict = field(default_factory=dict)  # f(x_F) -> (x_F, x_F')

    @property
    def one_sided(self) -> bool:
        return self.Ap is None

    @property
    def space(self) -> MetricGraph:
        return self.f.domain

    @property
    def union(self) -> Subcontinuum:
        return _union(self.cover)


def _union(sets) -> Subcontinuum:
    sets = list(sets)
    return sets[0].union(*sets[1:])


def first_point(S: Subcontinuum) -> PointRef:
    """Lexicographically smallest canonical point of a nonempty set."""
    g = S.graph
    cands = [g.vertex_point(v) for v in S.verts]
    cands += [g.canon(PointRef(eid, lo)) for eid, lo, _ in S.segment_list()]
    if not cands:
        raise ValueError("empty set")
    return min(cands)


def f_interval(f: PLMap, S: Subcontinuum):
    """Endpoints of the real interval f(S)."""
    img = f.image_of(S)
    vals = [v for _, lo, hi in img._elements() for v in (lo, hi)]
    vals += [ZERO if v == 0 else ONE for v in img.verts]
    return min(vals), max(vals)


def g_image(g: PLMap, lo, hi) -> Subcontinuum:
    """g([lo, hi]) for a map on the unit interval."""
    I = g.domain
    if lo == hi:
        return Subcontinuum.from_point(g.codomain, g(PointRef(0, lo)))
    return g.image_of(Subcontinuum.segment(I, 0, lo, hi))


def _largest_eps(start, ok):
    """Largest 2^-k with k >= start passing ``ok``."""
    for k in range(start, start + 60):
        if ok(pow2(k)):
            return pow2(k)
    raise StageInfeasible(2, "no admissible ball radius")


def normalize(space: MetricGraph, x1: PointRef, x2: PointRef) -> MetricGraph:
    """Rescaled copy of ``space`` with d(x1, x2) = 2."""
    d = space.distance(x1, x2)
    return space.scaled(2 / d)


# -- stage 0 -----------------------------------------------------------------


def init_stage(space: MetricGraph, f: PLMap, x1: PointRef, x2: PointRef | None = None) -> StageState:
    """Stage 0 on ``space``; pass the normalized graph (see :func:`normalize`)."""
    x1 = space.canon(x1)
    if f.domain != space:
        f = f.with_graphs(space, f.codomain)
    zero = f.preimage_of(PointRef(0, ZERO))
    if zero != Subcontinuum.from_point(space, x1):
        raise ProjectionInvalid("f^-1(0) must be {x1}")
    one = f.preimage_points(PointRef(0, ONE))
    if len(one) != 1 or f.preimage_of(PointRef(0, ONE)) != Subcontinuum.from_point(space, one[0]):
        raise ProjectionInvalid("f^-1(1) must be a single point")
    y = one[0]
    one_sided = x2 is None or space.canon(x2) == x1
    if not one_sided and space.canon(x2) != y:
        raise ProjectionInvalid("f^-1(1) must be {x2}")
    x2 = y
    lo_ok = lambda eps: f_interval(f, closed_ball(space, x1, eps))[1] <= ONE / 8
    hi_ok = lambda eps: f_interval(f, closed_ball(space, x2, eps))[0] >= ONE * 7 / 8
    if one_sided:
        eps = _largest_eps(4, lo_ok)
        A0, B = noncut_decomposition(space, x1, eps)
        Ap0, F0 = None, B
    else:
        eps = _largest_eps(4, lambda e: lo_ok(e) and hi_ok(e))
        A0, B = noncut_decomposition(space, x1, eps)
        Ap0, F0 = noncut_decomposition(space, x2, eps, space=B)
    a = first_point(A0 & F0)
    b = x2 if one_sided else first_point(Ap0 & F0)
    g0 = nadler_surjection(ONE / 4, ONE * 3 / 4, F0, {ONE / 4: a, ONE * 3 / 4: b})
    a0, b0 = ONE / 4, ONE * 3 / 4
    return StageState(
        n=0, cover=[F0], A=A0, Ap=Ap0, a=a0, b=b0, g=g0, S=(), f=f, x1=x1, x2=x2,
        covers=([F0],), anchors=((a0, b0),), refined=[F0],
    )



# -- stage n -> n+1 ------------------------------------------------------------


def _choose_eps(st: StageState, a1, b1):
    space, f, U = st.space, st.f, st.union

    def inside(x, A, eps):
        ball = closed_ball(space, x, eps)
        return A.contains(ball) and not ball.meets(U), ball

    def ok(eps):
        good, ball = inside(st.x1, st.A, eps)
        if not good or f_interval(f, ball)[1] > a1 / 2:
            return False
        if st.one_sided:
            return True
        good, ball = inside(st.x2, st.Ap, eps)
        return good and f_interval(f, ball)[0] >= (1 + b1) / 2

    return _largest_eps(st.n + 4, ok)


def _bridge(U: Subcontinuum, B: Subcontinuum, p: PointRef, bound):
    """C = B u K with K a small grid neighbourhood of p inside U, diam C < bound."""
    g = U.graph
    level = grid_level(g, bound, edges=list(U.segs))
    for _ in range(60):
        K = _union([c for c in grid_pieces(U, level) if c.contains_point(p)])
        C = B | K
        if C.diam_below(bound):
            return C
        level += 1
    raise StageInfeasible(2, "could not bridge into the cover")


def _refine(cover, bound) -> list:
    """Split every member along the dyadic grid with cells of diameter <= bound."""
    g = cover[0].graph
    level = grid_level(g, bound, strict=False)
    seen = {}
    for F in cover:
        for piece in grid_pieces(F, level):
            seen.setdefault(piece.key, piece)
    return [seen[k] for k in sorted(seen)]


def _tgrid(st: StageState, a1, b1, refined, C, Cp) -> list:
    f, g, n = st.f, st.g, st.n
    pts = {a1, st.a, st.b, b1}
    for a_i, b_i in st.anchors:
        pts |= {a_i, b_i}
    for cover in list(st.covers) + [refined]:
        for F in cover:
            pts |= set(f_interval(f, F))
    pts.add(f_interval(f, C)[1])
    if Cp is not None:
        pts.add(f_interval(f, Cp)[0])
    ts = sorted(t for t in pts if a1 <= t <= b1)
    bound = pow2(n + 1)
    lo_end, hi_end = st.a, (b1 if st.one_sided else st.b)
    out = [ts[0]]
    for t0, t1 in zip(ts, ts[1:]):
        if lo_end <= t0 and t1 <= hi_end:
            out += _greedy_cuts(g, t0, t1, bound)
        out.append(t1)
    return out


def _greedy_cuts(g: PLMap, t0, t1, bound) -> list:
    """Interior cut points of [t0, t1] so every part has g-image of diameter
    below ``bound``; cuts sit on breakpoints of g where possible."""
    knots = [t for t in g.breakpoints(0) if t0 < t < t1] + [t1]
    cuts = []
    img = g_image(g, t0, t0)
    prev = t0
    for t in knots:
        piece = g_image(g, prev, t)
        cand = img | piece
        if cand.diam_below(bound):
            img, prev = cand, t
            continue
        start = prev
        if prev != t0 and (not cuts or cuts[-1] != prev):
            cuts.append(prev)
        length = piece.measure()
        m = int(length / bound) + 2 if not piece.diam_below(bound) else 1
        for j in range(1, m):
            cuts.append(start + (t - start) * j / m)
        img = g_image(g, cuts[-1] if m > 1 else start, t)
        prev = t
    return cuts


def _choose_H(st: StageState, ts, C, Cp) -> list:
    g = st.g
    cover = st.cover
    unions = [_union(c) for c in st.covers]
    H = []
    for i, (t0, t1) in enumerate(zip(ts, ts[1:])):
        if i == 0:
            p = g(PointRef(0, st.a))
            F = next(F for F in cover if F.contains_point(p))
            H.append(F | C)
            continue
        if Cp is not None and i == len(ts) - 2:
            p = g(PointRef(0, st.b))
            F = next(F for F in cover if F.contains_point(p))
            H.append(F | Cp)
            continue
        gJ = g_image(g, t0, t1)
        j = next((j for j, (a_j, b_j) in enumerate(st.anchors) if a_j <= t0 and t1 <= b_j), None)
        cands = [F for F in cover if (j is None or unions[j].contains(F)) and F.meets(gJ)]
        if not cands:
            raise StageInfeasible(1, f"no cover member for grid interval [{t0}, {t1}]")
        p = g(PointRef(0, t0))
        F = next((F for F in cands if F.contains_point(p)), cands[0])
        H.append(F | gJ)
    return H


def _value_candidates(lo, hi, forbidden, limit=12):
    """Simplest rationals in (lo, hi) avoiding ``forbidden``, widest gap first."""
    cuts = sorted({lo, hi} | {v for v in forbidden if lo < v < hi})
    gaps = sorted(zip(cuts, cuts[1:]), key=lambda gp: (-(gp[1] - gp[0]), gp[0]))
    out = []
    while gaps and len(out) < limit:
        l, r = gaps.pop(0)
        v = simplest_between(l, r)
        out.append(v)
        gaps += [(l, v), (v, r)]
        gaps.sort(key=lambda gp: (-(gp[1] - gp[0]), gp[0]))
    return out


def _point_candidates(P: Subcontinuum) -> list:
    g = P.graph
    pts = {g.vertex_point(v) for v in P.verts}
    for eid, lo, hi in P.segment_list():
        for t in (lo, (lo + hi) / 2, hi):
            pts.add(g.canon(PointRef(eid, t)))
    return sorted(pts)


def _pullback(hn, f: PLMap, H: Subcontinuum, x_F: PointRef, steps: int, ok, budget=200):
    """Orbit z_0, ..., z_steps with z_0 in H, z_steps = x_F and each f(z_j),
    j < steps, accepted by ``ok``."""
    Y = [H]
    for _ in range(steps):
        Y.append(hn.image(Y[-1]))
    if not Y[-1].contains_point(x_F):
        return None
    tries = [budget]

    def dfs(j, z):
        if j == 0:
            return [z]
        P = hn.preimage(z) & Y[j - 1]
        for c in _point_candidates(P):
            tries[0] -= 1
            if tries[0] < 0:
                return None
            if not ok(f(c).param):
                continue
            rest = dfs(j - 1, c)
            if rest is not None:
                return rest + [z]
        return None

    return dfs(steps, x_F)


def advance_stage(st: StageState) -> StageState:
    space, f, g, n = st.space, st.f, st.g, st.n
    U = st.union
    a1, b1 = f_interval(f, U)
    eps = _choose_eps(st, a1, b1)
    A1, B = noncut_decomposition(space, st.x1, eps, space=st.A)
    bound = pow2(n + 2)
    C = _bridge(U, B, g(PointRef(0, st.a)), bound)
    if st.one_sided:
        A1p = Bp = Cp = None
    else:
        A1p, Bp = noncut_decomposition(space, st.x2, eps, space=st.Ap)
        Cp = _bridge(U, Bp, g(PointRef(0, st.b)), bound)
    refined = _refine(st.cover, bound)
    cover = refined + [C] + ([Cp] if Cp is not None else [])
    ts = _tgrid(st, a1, b1, refined, C, Cp)
    H = _choose_H(st, ts, C, Cp)

    # periodic seeds and pullbacks
    hn = _Dynamics(g, f)
    forbidden = set(st.S) | set(ts)
    xvals = set()
    orbit_vals = set()
    pullbacks = {}
    for F in st.cover:
        lo, hi = f_interval(f, F)
        done = False
        for v in _value_candidates(lo, hi, forbidden | xvals | orbit_vals):
            i = next(i for i, (t0, t1) in enumerate(zip(ts, ts[1:])) if t0 < v < t1)
            x_F = first_point(f.preimage_of(PointRef(0, v)) & F)
            taken = xvals | {v}
            ok = lambda s: a1 < s < b1 and s not in taken
            orbit = _pullback(hn, f, H[i], x_F, 2 * n, ok)
            if orbit is None:
                continue
            xvals.add(v)
            orbit_vals |= {f(z).param for z in orbit[:-1]}
            pullbacks[v] = (x_F, orbit[0])
            done = True
            break
        if not done:
            raise StageInfeasible(12, f"no pullback for cover member {F!r}")
    S1 = tuple(sorted(set(st.S) | xvals | orbit_vals))

    a_new = first_point(A1 & B)
    b_new = st.g(PointRef(0, ONE)) if st.one_sided else first_point(A1p & Bp)
    cons = {s: (pullbacks[s][1] if s in pullbacks else g(PointRef(0, s))) for s in S1}
    for t in ts[1:-1]:
        cons[t] = g(PointRef(0, t))
    cons[a1] = a_new
    cons[b1] = b_new
    pieces = []
    if a1 > 0:
        pieces.append((ZERO, a1, a_new.edge, a_new.param, a_new.param))
    keys = sorted(cons)
    for (t0, t1), Hi in zip(zip(ts, ts[1:]), H):
        lo, hi = bisect.bisect_left(keys, t0), bisect.bisect_right(keys, t1)
        local = {t: cons[t] for t in keys[lo:hi]}
        pieces += surject_interval(t0, t1, Hi, local)
    if b1 < 1:
        pieces.append((b1, ONE, b_new.edge, b_new.param, b_new.param))
    g1 = PLMap(unit_interval(), space, {0: pieces})
    return StageState(
        n=n + 1, cover=cover, A=A1, Ap=A1p, a=a1, b=b1, g=g1, S=S1, f=f,
        x1=st.x1, x2=st.x2, covers=st.covers + (cover,), anchors=st.anchors + ((a1, b1),),
        refined=refined, tgrid=tuple(ts), H=tuple(H), C=C, Cp=Cp, pullbacks=pullbacks,
    )


# -- stage invariants ----------------------------------------------------------


class _Dynamics:
    """Memoized images and preimages under g_n o f without composing maps."""

    def __init__(self, g: PLMap, f: PLMap):
        self.g, self.f = g, f
        self._img = {}

    def image(self, S: Subcontinuum) -> Subcontinuum:
        key = S.key
        out = self._img.get(key)
        if out is None:
            out = self.g.image_of(self.f.image_of(S))
            self._img[key] = out
        return out

    def preimage(self, z: PointRef) -> Subcontinuum:
        return self.f.preimage_of_set(self.g.preimage_of(z))

    def __call__(self, p: PointRef) -> PointRef:
        return self.g(self.f(p))

    def orbit_sets(self, S: Subcontinuum, k: int) -> list:
        out = [S]
        for _ in range(k):
            out.append(self.image(out[-1]))
        return out


def check_stage_invariants(prev: StageState | None, cur: StageState):
    """Certificate with one exact PASS/FAIL entry per property (1)-(13)."""
    from .certificate import checklist

    n, f, g = cur.n, cur.f, cur.g
    U = [_union(c) for c in cur.covers]
    two = not cur.one_sided
    dyn = _Dynamics(g, f)
    checks, wit = {}, {}

    if prev is not None and n > 1:
        d = sup_distance(prev.g, g)
        checks["(1)"] = d <= pow2(n - 1)
        wit["sup_distance_g"] = str(d)
    else:
        checks["(1)"] = True
    mesh_ok = n == 0 or all(F.diam <= pow2(n + 1) for F in cur.cover)
    a_ok = cur.A.diam_below(pow2(n + 2)) and (not two or cur.Ap.diam_below(pow2(n + 2)))
    checks["(2)"] = mesh_ok and a_ok
    checks["(3)"] = (
        cur.A.contains_point(cur.x1) and not U[n].contains_point(cur.x1)
        and (not two or (cur.Ap.contains_point(cur.x2) and not U[n].contains_point(cur.x2)))
    )
    if n > 0:
        ok4 = True
        for F in cur.covers[n - 1]:
            parts = [E for E in cur.cover if F.contains(E)]
            ok4 &= bool(parts) and _union(parts) == F
        checks["(4)"] = ok4
        pa, pb = cur.anchors[n - 1]
        checks["(5)"] = cur.a <= pa / 2 and cur.b >= (1 + pb) / 2
        lo, hi = f_interval(f, U[n - 1])
        checks["(6)"] = (lo, hi) == (cur.a, cur.b) and lo <= pa / 2 and hi >= (pb + 1) / 2
    else:
        checks["(4)"] = checks["(5)"] = checks["(6)"] = True
    left = g_image(g, ZERO, cur.a)
    ok7 = cur.A.contains(left)
    if two:
        ok7 &= cur.Ap.contains(g_image(g, cur.b, ONE))
    checks["(7)"] = ok7
    bad8 = [i for i, (a_i, b_i) in enumerate(cur.anchors) if g_image(g, a_i, b_i) != U[i]]
    checks["(8)"] = not bad8
    wit["bad_8"] = bad8
    S = set(cur.S)
    checks["(9)"] = {f(g(PointRef(0, s))).param for s in S} == S and all(cur.a <= s <= cur.b for s in S)
    if n > 0:
        checks["(10)"] = set(prev.S) <= S and all(g(PointRef(0, s)) == prev.g(PointRef(0, s)) for s in prev.S) if prev is not None else True
        ok11 = True
        for F in cur.covers[n - 1]:
            lo, hi = f_interval(f, F)
            ok11 &= any(lo <= s <= hi for s in S)
        checks["(11)"] = ok11
    else:
        checks["(10)"] = checks["(11)"] = True
    bad12 = []
    for i in range(n + 1):
        for F in cur.covers[i]:
            Y = dyn.orbit_sets(F, 2 * i + 1)
            if not (Y[2 * i] & Y[2 * i + 1]).contains(U[i]):
                bad12.append((i, repr(F)))
    checks["(12)"] = not bad12
    wit["bad_12"] = bad12[:3]
    bad13 = []
    for i in range(1, n + 1):
        for F in cur.covers[i]:
            img = dyn.image(F)
            if not any(img.contains(E) for E in cur.covers[i - 1]):
                bad13.append((i, repr(F)))
    checks["(13)"] = not bad13
    wit["bad_13"] = bad13[:3]
    return checklist(f"stage {n}", checks, resolution=pow2(n), witnesses=wit)


# -- assembly ------------------------------------------------------------------


@dataclass
class ConstructionResult:
    f: PLMap                    # X -> [0, 1]
    g: PLMap                    # [0, 1] -> X
    h: PLMap                    # g o f
    stages: list
    space: MetricGraph
    fixed_points: tuple
    resolution: object
    case: str = ""
    original: MetricGraph | None = None   # X before surgery
    phi: PLMap | None = None              # surgery quotient  X^ -> X
    h_factored: PLMap | None = None       # induced map on X
    certificates: list = field(default_factory=list)


def _arc(A: Subcontinuum, p: PointRef, q_: PointRef, t0, t1) -> list:
    """Pieces running along a shortest arc from p to q inside A over [t0, t1]."""
    from .extension import _timed, _walk

    if p == q_:
        return [(t0, t1, p.edge, p.param, p.param)]
    G = segment_graph(A, [p, q_])
    G.graph["metric"] = A.graph
    return _timed(t0, t1, _walk(G, nx.shortest_path(G, p, q_, weight="w")))


def terminal_map(st: StageState) -> PLMap:
    """g_N with its constant ends replaced by arcs ending at x1 (and x2), so
    that g(0) = x1 and g^-1(x1) = {0} as for the limit map."""
    g = st.g
    mid = [p for p in g.pieces(0) if p[0] >= st.a and (st.one_sided or p[1] <= st.b)]
    pieces = _arc(st.A, st.x1, g(PointRef(0, st.a)), ZERO, st.a) + mid
    if not st.one_sided and st.b < 1:
        pieces += _arc(st.Ap, g(PointRef(0, st.b)), st.x2, st.b, ONE)
    return PLMap(g.domain, g.codomain, {0: pieces})


def assemble_map(stages: list, f: PLMap) -> ConstructionResult:
    st = stages[-1]
    space = st.space
    if f.domain != space:
        f = f.with_graphs(space, f.codomain)
    g = terminal_map(st)
    h = compose(g, f)
    fixed = (st.x1,) if st.one_sided else (st.x1, st.x2)
    for x in fixed:
        if h.preimage_of(x) != Subcontinuum.from_point(space, x):
            raise FiberViolation(f"h^-1({x}) is not a single point")
    return ConstructionResult(f, g, h, stages, space, fixed, pow2(st.n))


def rescaled(res: ConstructionResult, space: MetricGraph) -> ConstructionResult:
    """The same maps over ``space`` (same combinatorics, other edge lengths)."""
    I = res.f.codomain
    return replace(
        res,
        f=res.f.with_graphs(space, I),
        g=res.g.with_graphs(I, space),
        h=res.h.with_graphs(space, space),
        space=space,
    )


# -- surgery -------------------------------------------------------------------


def cut_surgery(space: MetricGraph, p: PointRef):
    """Cut ``space`` open at an interior edge point.

    Returns ``(X_hat, phi, x1, x2, cut)``: edge ``e`` is replaced by ``e_a``
    (tail to the new leaf x1) and ``e_b`` (new leaf x2 to head); ``phi`` glues
    the two leaves back to ``p`` and is the identity elsewhere.  ``cut`` is
    ``(e, e_a, e_b, t)`` with t the parameter of p on e.
    """
    p = space.canon(p)
    if space.vertex_of(p) is not None:
        raise GraphError("surgery point must be interior to an edge")
    e = space.edge(p.edge)
    t, L = p.param, e.length
    n1, n2 = "x1", "x2"
    while n1 in space.vertices or n2 in space.vertices:
        n1, n2 = n1 + "'", n2 + "'"
    ea, eb = max(space.edge_ids) + 1, max(space.edge_ids) + 2
    edges = [E for E in space.edges.values() if E.id != e.id]
    edges += [(ea, e.tail, n1, L * t), (eb, n2, e.head, L * (1 - t))]
    X = MetricGraph(list(space.vertices) + [n1, n2], edges)
    pieces = {E: [(ZERO, ONE, E, ZERO, ONE)] for E in space.edge_ids if E != e.id}
    pieces[ea] = [(ZERO, ONE, e.id, ZERO, t)]
    pieces[eb] = [(ZERO, ONE, e.id, t, ONE)]
    phi = PLMap(X, space, pieces)
    return X, phi, X.vertex_point(n1), X.vertex_point(n2), (e.id, ea, eb, t)


def factor_map(h_hat: PLMap, phi: PLMap, cut) -> PLMap:
    """The map h on X with h o phi = phi o h_hat."""
    eid, ea, eb, t = cut
    top = compose(phi, h_hat)
    X = phi.codomain
    pieces = {E: list(top.pieces(E)) for E in X.edge_ids if E != eid}
    pieces[eid] = [(s0 * t, s1 * t, c, u0, u1) for s0, s1, c, u0, u1 in top.pieces(ea)]
    pieces[eid] += [(t + s0 * (1 - t), t + s1 * (1 - t), c, u0, u1) for s0, s1, c, u0, u1 in top.pieces(eb)]
    return PLMap(X, X, pieces)


# -- pipeline ------------------------------------------------------------------


def run_stages(space, f, x1, x2, N, check=True):
    """Normalized stages 0..N with their invariant certificates."""
    target = x2 if x2 is not None and space.canon(x2) != space.canon(x1) else f.preimage_points(PointRef(0, ONE))[0]
    G = normalize(space, x1, target)
    f2 = f.with_graphs(G, f.codomain)
    stages = [init_stage(G, f2, x1, x2)]
    certs = [check_stage_invariants(None, stages[0])] if check else []
    for _ in range(N):
        stages.append(advance_stage(stages[-1]))
        if check:
            certs.append(check_stage_invariants(stages[-2], stages[-1]))
    return stages, f2, certs


def build_pure_mixing(
    space: MetricGraph, N: int = 3, seed_point: PointRef | None = None, check: bool = True, basis_depth: int | None = None
) -> ConstructionResult:
    from .graph import BaseCase, classify_point, select_base_point, validate_graph
    from .projection import ProjectionSpec, build_projection

    validate_graph(space)
    if N < 1:
        raise ValueError("stage budget N must be at least 1")
    depth = N if basis_depth is None else basis_depth
    if seed_point is None:
        x, case = select_base_point(space)
    else:
        x = space.canon(seed_point)
        pc = classify_point(space, x)
        if not pc.is_local_cut_point:
            case = BaseCase.NOT_LOCAL_CUT
        elif pc.menger_order == 2 and not pc.is_cut_point:
            case = BaseCase.ORDER2_LOCAL_CUT
        else:
            raise GraphError("seed point must be a leaf or a non-cut order-2 point")
    if case == BaseCase.NOT_LOCAL_CUT:
        X, x1, x2, phi, cut = space, x, None, None, None
        f = build_projection(ProjectionSpec(X, x1, None, depth=depth, variant=True))
    else:
        X, phi, x1, x2, cut = cut_surgery(space, x)
        f = build_projection(ProjectionSpec(X, x1, x2, depth=depth))
    stages, f2, certs = run_stages(X, f, x1, x2, N, check=check)
    res = rescaled(assemble_map(stages, f2), X)
    res.case = case.value
    res.certificates = certs
    if phi is not None:
        res.original = space
        res.phi = phi
        res.h_factored = factor_map(res.h, phi, cut)
        res.fixed_points = (x,)
    return res


def periodic_seeds(res: ConstructionResult) -> list:
    """Candidate periodic points of the final map: g(S_n) for every stage and
    the pulled-back points x_F, pushed to the original space after surgery."""
    pts = set()
    for st in res.stages:
        pts |= {res.g(PointRef(0, s)) for s in st.S}
        for x_F, _ in st.pullbacks.values():
            pts.add(res.space.canon(PointRef(x_F.edge, x_F.param)))
    if res.phi is not None:
        pts = {res.original.canon(res.phi(p)) for p in pts}
    return sorted(pts)


def stage_maps(res: ConstructionResult) -> list:
    """``h_n = g_n o f`` for n = 1..N of one run, over ``res.space``."""
    out = []
    for st in res.stages[1:]:
        f = res.f.with_graphs(st.space, res.f.codomain)
        out.append(compose(terminal_map(st), f).with_graphs(res.space, res.space))
    return out
