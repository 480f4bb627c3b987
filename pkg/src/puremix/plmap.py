"""Piecewise-linear continuous maps between metric graphs.

Every domain edge is cut at rational breakpoints ``0 = s0 < ... < sm = 1``;
piece ``[s_{j-1}, s_j]`` runs affinely (in edge parameters) along a single
codomain edge.  Paths through several codomain edges are just several
pieces, so this is the same class as constant-speed edge-path maps but keeps
evaluation, images and preimages to one affine solve per piece.
"""
from __future__ import annotations

import bisect
from functools import cached_property

from .graph import GraphError, MetricGraph, PointRef
from .rational import ONE, ZERO, q
from .sets import Subcontinuum, _max_min_affine_1d


class DomainMismatch(ValueError):
    pass


class DiscontinuousMap(ValueError):
    pass


def _lerp(x0, x1, y0, y1, x):
    if x1 == x0:
        return y0
    return y0 + (x - x0) * (y1 - y0) / (x1 - x0)


class PLMap:
    """A continuous PL map ``domain -> codomain``.

    ``pieces`` maps each domain edge id to a list of
    ``(s0, s1, codomain_edge, u0, u1)`` covering [0, 1] in order.
    """

    def __init__(self, domain: MetricGraph, codomain: MetricGraph, pieces: dict, check: bool = True):
        self.domain = domain
        self.codomain = codomain
        self._bps = {}
        self._tg = {}
        for eid in domain.edge_ids:
            plist = _merge_pieces(codomain, pieces[eid])
            self._bps[eid] = [plist[0][0]] + [p[1] for p in plist]
            self._tg[eid] = [(c, u0, u1) for _, _, c, u0, u1 in plist]
        self._memo = {}
        if check:
            self.check()

    # -- structure ---------------------------------------------------------

    def pieces(self, eid):
        bps, tg = self._bps[eid], self._tg[eid]
        for j, (c, u0, u1) in enumerate(tg):
            yield bps[j], bps[j + 1], c, u0, u1

    def all_pieces(self):
        for eid in self.domain.edge_ids:
            for piece in self.pieces(eid):
                yield (eid,) + piece

    def breakpoints(self, eid) -> list:
        return list(self._bps[eid])

    @property
    def n_pieces(self) -> int:
        return sum(len(t) for t in self._tg.values())

    def check(self):
        g, h = self.domain, self.codomain
        for eid in g.edge_ids:
            bps = self._bps[eid]
            if bps[0] != 0 or bps[-1] != 1 or any(a >= b for a, b in zip(bps, bps[1:])):
                raise GraphError(f"bad breakpoints on edge {eid}")
            for c, u0, u1 in self._tg[eid]:
                if c not in h.edges or not (0 <= u0 <= 1 and 0 <= u1 <= 1):
                    raise GraphError(f"bad piece target on edge {eid}")
            tg = self._tg[eid]
            for j in range(len(tg) - 1):
                a = h.canon(PointRef(tg[j][0], tg[j][2]))
                b = h.canon(PointRef(tg[j + 1][0], tg[j + 1][1]))
                if a != b:
                    raise DiscontinuousMap(f"jump on edge {eid} at {bps[j + 1]}")
        for v in g.vertices:
            imgs = {self._eval_end(eid, end) for eid, end in g.incident(v)}
            if len(imgs) > 1:
                raise DiscontinuousMap(f"map is not single valued at vertex {v!r}")

    def _eval_end(self, eid, end):
        tg = self._tg[eid]
        c, u0, u1 = tg[0] if end == 0 else tg[-1]
        return self.codomain.canon(PointRef(c, u0 if end == 0 else u1))

    def with_graphs(self, domain: MetricGraph, codomain: MetricGraph) -> "PLMap":
        """Same pieces over graphs with identical combinatorics (e.g. rescaled)."""
        return PLMap(domain, codomain, {e: list(self.pieces(e)) for e in self.domain.edge_ids}, check=False)

    # -- evaluation ---------------------------------------------------------

    def _locate(self, eid, t):
        bps = self._bps[eid]
        j = bisect.bisect_right(bps, t) - 1
        return min(max(j, 0), len(bps) - 2)

    def _eval_edge(self, eid, t):
        j = self._locate(eid, t)
        bps = self._bps[eid]
        c, u0, u1 = self._tg[eid][j]
        return c, _lerp(bps[j], bps[j + 1], u0, u1, t)

    def evaluate(self, p: PointRef) -> PointRef:
        p = self.domain.canon(p)
        c, u = self._eval_edge(p.edge, p.param)
        return self.codomain.canon(PointRef(c, u))

    __call__ = evaluate

    # -- images -------------------------------------------------------------

    @cached_property
    def _arc_codomain(self):
        """The codomain edge id when the codomain is a single arc, else None."""
        h = self.codomain
        if len(h.edges) == 1:
            (e,) = h.edges.values()
            if not e.is_loop:
                return e.id
        return None

    def _tables(self, eid):
        """Sparse tables for range min / max of knot parameters on one edge."""
        cache = self.__dict__.setdefault("_rmq", {})
        if eid not in cache:
            tg = self._tg[eid]
            vals = [u0 for _, u0, _ in tg] + [tg[-1][2]]
            mins, maxs = [vals], [vals]
            k = 1
            while 2 * k <= len(vals):
                pm, px = mins[-1], maxs[-1]
                mins.append([min(pm[i], pm[i + k]) for i in range(len(pm) - k)])
                maxs.append([max(px[i], px[i + k]) for i in range(len(px) - k)])
                k *= 2
            cache[eid] = (mins, maxs)
        return cache[eid]

    def _range(self, eid, lo, hi):
        """(min, max) of the image parameter over [lo, hi] on an arc codomain."""
        a = self._eval_edge(eid, lo)[1]
        b = self._eval_edge(eid, hi)[1]
        mn, mx = min(a, b), max(a, b)
        bps = self._bps[eid]
        i = bisect.bisect_right(bps, lo)
        j = bisect.bisect_left(bps, hi) - 1
        if i <= j:
            mins, maxs = self._tables(eid)
            k = (j - i + 1).bit_length() - 1
            span = 1 << k
            mn = min(mn, mins[k][i], mins[k][j - span + 1])
            mx = max(mx, maxs[k][i], maxs[k][j - span + 1])
        return mn, mx

    def image_of(self, S: Subcontinuum) -> Subcontinuum:
        key = S.key
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        c = self._arc_codomain
        if c is not None:
            out = [(c,) + self._range(eid, lo, hi) for eid, lo, hi in S._elements()]
            img = Subcontinuum(self.codomain, out)
            self._memo[key] = img
            return img
        out = []
        verts = []
        for eid, lo, hi in S._elements():
            bps, tg = self._bps[eid], self._tg[eid]
            j = self._locate(eid, lo)
            while j < len(tg):
                s0, s1 = bps[j], bps[j + 1]
                if s0 > hi:
                    break
                a, b = max(lo, s0), min(hi, s1)
                c, u0, u1 = tg[j]
                ua, ub = _lerp(s0, s1, u0, u1, a), _lerp(s0, s1, u0, u1, b)
                out.append((c, min(ua, ub), max(ua, ub)))
                if s1 >= hi:
                    break
                j += 1
        for v in S.isolated_vertices:
            p = self.evaluate(self.domain.vertex_point(v))
            w = self.codomain.vertex_of(p)
            if w is not None:
                verts.append(w)
            else:
                out.append((p.edge, p.param, p.param))
        img = Subcontinuum(self.codomain, out, verts)
        self._memo[key] = img
        return img

    @cached_property
    def _by_target(self) -> dict:
        idx = {}
        for eid, s0, s1, c, u0, u1 in self.all_pieces():
            idx.setdefault(c, []).append((eid, s0, s1, u0, u1))
        return idx

    def preimage_of(self, p: PointRef) -> Subcontinuum:
        """Full preimage of a point: isolated points and flat segments."""
        h = self.codomain
        p = h.canon(p)
        targets = []
        v = h.vertex_of(p)
        if v is None:
            targets.append((p.edge, p.param))
        else:
            for eid, end in h.incident(v):
                targets.append((eid, ZERO if end == 0 else ONE))
        segs = []
        for c, u in targets:
            for eid, s0, s1, u0, u1 in self._by_target.get(c, ()):
                if u0 == u1:
                    if u0 == u:
                        segs.append((eid, s0, s1))
                elif min(u0, u1) <= u <= max(u0, u1):
                    s = _lerp(u0, u1, s0, s1, u)
                    segs.append((eid, s, s))
        return Subcontinuum(self.domain, segs)

    def preimage_of_set(self, T: Subcontinuum) -> Subcontinuum:
        """Full preimage of a closed segment set."""
        segs = []
        for c, lo, hi in T.segment_list():
            for eid, s0, s1, u0, u1 in self._by_target.get(c, ()):
                if u0 == u1:
                    if lo <= u0 <= hi:
                        segs.append((eid, s0, s1))
                    continue
                a, b = max(lo, min(u0, u1)), min(hi, max(u0, u1))
                if a <= b:
                    segs.append((eid, _lerp(u0, u1, s0, s1, a), _lerp(u0, u1, s0, s1, b)))
        out = Subcontinuum(self.domain, segs)
        h = self.codomain
        for v in T.verts:
            out = out | self.preimage_of(h.vertex_point(v))
        return out

    def preimage_points(self, p: PointRef) -> list[PointRef]:
        """Preimage as canonical points; flat segments contribute both ends."""
        pre = self.preimage_of(p)
        g = self.domain
        pts = {g.vertex_point(v) for v in pre.isolated_vertices}
        for eid, lo, hi in pre.segment_list():
            pts.add(g.canon(PointRef(eid, lo)))
            pts.add(g.canon(PointRef(eid, hi)))
        return sorted(pts)

    def is_surjective(self) -> bool:
        return self.image_of(Subcontinuum.whole(self.domain)) == Subcontinuum.whole(self.codomain)


def _merge_pieces(codomain: MetricGraph, plist):
    out = []
    for s0, s1, c, u0, u1 in plist:
        s0, s1, u0, u1 = q(s0), q(s1), q(u0), q(u1)
        if s0 == s1:
            continue
        if u0 == u1 and (u0 == 0 or u0 == 1):
            rep = codomain.canon(PointRef(c, u0))
            c, u0, u1 = rep.edge, rep.param, rep.param
        if out:
            a0, a1, ac, au0, au1 = out[-1]
            if ac == c and au1 == u0 and (au1 - au0) * (s1 - s0) == (u1 - u0) * (a1 - a0):
                out[-1] = (a0, s1, c, au0, u1)
                continue
        out.append((s0, s1, c, u0, u1))
    return out


# -- constructors -------------------------------------------------------------


def identity(g: MetricGraph) -> PLMap:
    return PLMap(g, g, {e: [(ZERO, ONE, e, ZERO, ONE)] for e in g.edge_ids})


def constant(domain: MetricGraph, codomain: MetricGraph, p: PointRef) -> PLMap:
    p = codomain.canon(p)
    return PLMap(domain, codomain, {e: [(ZERO, ONE, p.edge, p.param, p.param)] for e in domain.edge_ids})


def from_values(domain: MetricGraph, codomain: MetricGraph, eid_values: dict) -> PLMap:
    """Map into a one-edge codomain from per-edge ``[(s, value), ...]`` knots."""
    (c,) = codomain.edge_ids
    pieces = {}
    for eid in domain.edge_ids:
        knots = eid_values[eid]
        pieces[eid] = [(s0, s1, c, v0, v1) for (s0, v0), (s1, v1) in zip(knots, knots[1:])]
    return PLMap(domain, codomain, pieces)


# -- algebra ------------------------------------------------------------------


def compose(outer: PLMap, inner: PLMap) -> PLMap:
    """``outer o inner``; breakpoints refine inner's by pulled-back outer ones."""
    if inner.codomain != outer.domain:
        raise DomainMismatch("codomain of inner map differs from domain of outer map")
    pieces = {}
    for eid in inner.domain.edge_ids:
        plist = []
        for s0, s1, c, u0, u1 in inner.pieces(eid):
            if u0 == u1:
                c2, w = outer._eval_edge(c, u0)
                plist.append((s0, s1, c2, w, w))
                continue
            lo, hi = min(u0, u1), max(u0, u1)
            obps = outer._bps[c]
            i0 = bisect.bisect_right(obps, lo)
            i1 = bisect.bisect_left(obps, hi)
            cuts = [lo] + obps[i0:i1] + [hi]
            if u1 < u0:
                cuts.reverse()
            for ua, ub in zip(cuts, cuts[1:]):
                sa = _lerp(u0, u1, s0, s1, ua)
                sb = _lerp(u0, u1, s0, s1, ub)
                j = outer._locate(c, (ua + ub) / 2)
                o0, o1 = obps[j], obps[j + 1]
                c2, w0, w1 = outer._tg[c][j]
                plist.append((sa, sb, c2, _lerp(o0, o1, w0, w1, ua), _lerp(o0, o1, w0, w1, ub)))
        pieces[eid] = plist
    return PLMap(inner.domain, outer.codomain, pieces, check=False)


def iterate(m: PLMap, n: int) -> PLMap:
    if m.domain != m.codomain:
        raise DomainMismatch("only self-maps can be iterated")
    out = identity(m.domain)
    for _ in range(n):
        out = compose(m, out)
    return out


def _moving_distance_forms(h: MetricGraph, c1, a1, b1, c2, a2, b2):
    """Forms (k0, k1) with d = min(k0 + k1 t) for points (c1, a1 + b1 t),
    (c2, a2 + b2 t); the same-edge direct term is returned separately."""
    E1, E2 = h.edges[c1], h.edges[c2]
    L1, L2 = E1.length, E2.length
    D = h.vertex_distance
    ends1 = [(E1.tail, L1 * a1, L1 * b1), (E1.head, L1 * (1 - a1), -L1 * b1)]
    ends2 = [(E2.tail, L2 * a2, L2 * b2), (E2.head, L2 * (1 - a2), -L2 * b2)]
    return [(x0 + y0 + D[v][w], x1 + y1) for v, x0, x1 in ends1 for w, y0, y1 in ends2]


def sup_distance(m1: PLMap, m2: PLMap):
    """Exact sup over the domain of the codomain distance between m1 and m2."""
    if m1.domain != m2.domain or m1.codomain != m2.codomain:
        raise DomainMismatch("maps must share domain and codomain")
    h = m1.codomain
    best = ZERO
    for eid in m1.domain.edge_ids:
        cuts = sorted(set(m1._bps[eid]) | set(m2._bps[eid]))
        for s0, s1 in zip(cuts, cuts[1:]):
            mid = (s0 + s1) / 2
            j1, j2 = m1._locate(eid, mid), m2._locate(eid, mid)
            c1, p0, p1 = m1._tg[eid][j1]
            c2, r0, r1 = m2._tg[eid][j2]
            b1 = m1._bps[eid]
            b2 = m2._bps[eid]
            # parameters as affine functions of s on [s0, s1]
            sl1 = (p1 - p0) / (b1[j1 + 1] - b1[j1])
            sl2 = (r1 - r0) / (b2[j2 + 1] - b2[j2])
            a1 = p0 - sl1 * b1[j1]
            a2 = r0 - sl2 * b2[j2]
            forms = _moving_distance_forms(h, c1, a1, sl1, c2, a2, sl2)
            L = h.length(c1)
            spans = [(s0, s1)]
            if c1 == c2 and sl1 != sl2:
                z = (a2 - a1) / (sl1 - sl2)
                if s0 < z < s1:
                    spans = [(s0, z), (z, s1)]
            for lo, hi in spans:
                f = forms
                if c1 == c2:
                    mid2 = (lo + hi) / 2
                    sign = 1 if (a1 + sl1 * mid2) >= (a2 + sl2 * mid2) else -1
                    f = forms + [(sign * L * (a1 - a2), sign * L * (sl1 - sl2))]
                val = _max_min_affine_1d(f, lo, hi)
                if val > best:
                    best = val
    return best
