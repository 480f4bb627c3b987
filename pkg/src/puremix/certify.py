"""Certificates for mixing, exactness, periodic density and entropy of PL maps.

Every verdict is decided with exact rational arithmetic on images and
preimages of finitely many closed sets.  Mixing of a map that has no small
Markov partition is only ever claimed at a stated resolution within a stated
window of iterates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .certificate import Certificate
from .graph import PointRef
from .markov import (
    NonMarkov,
    as_sparse,
    covering_matrix,
    is_primitive,
    partition_from_points,
    primitivity_exponent,
    spectral_lower_bound,
)
from .plmap import DomainMismatch, PLMap, compose
from .rational import ONE, ZERO, fmt, q
from .sets import Subcontinuum, fine_cover

MIXING, NOT_MIXING, INCONCLUSIVE = "MIXING", "NOT_MIXING", "INCONCLUSIVE"
EXACT, NOT_EXACT = "EXACT", "NOT_EXACT"
PURE_MIXING, NOT_PURE = "PURE_MIXING", "NOT_PURE_MIXING"


def _pt(p: PointRef) -> str:
    return f"({p.edge}, {fmt(p.param)})"


def grid_points(g, cells) -> set:
    pts = {g.vertex_point(v) for v in g.vertices}
    for C in cells:
        for eid, lo, hi in C.segment_list():
            pts.add(g.canon(PointRef(eid, lo)))
            pts.add(g.canon(PointRef(eid, hi)))
    return pts


def saturate(m: PLMap, seeds, depth: int = 8, max_points: int = 4000):
    """Close ``seeds`` plus the breakpoints of m under forward images.

    Returns ``(points, saturated)``; saturated means the point set is forward
    invariant, so the segments between points form a Markov partition.
    """
    g = m.domain
    pts = set(seeds)
    pts |= {g.canon(PointRef(eid, s)) for eid in g.edge_ids for s in m.breakpoints(eid)}
    frontier = set(pts)
    for _ in range(depth):
        if not frontier or len(pts) > max_points:
            break
        frontier = {m(p) for p in frontier} - pts
        pts |= frontier
    return pts, not frontier


def _meets(S: Subcontinuum, T: Subcontinuum) -> bool:
    """Whether S meets the interior of the cell T (T an edge segment)."""
    return (S & T).measure() > 0


# -- mixing -----------------------------------------------------------------------


def _markov_mixing(m, cells, depth, max_points):
    g = m.domain
    if m.n_pieces > max_points:
        return None
    pts, ok = saturate(m, grid_points(g, cells), depth, max_points)
    if not ok:
        return None
    members = partition_from_points(g, pts)
    M = covering_matrix(m, members)
    prim = is_primitive(M)
    wit = {"markov": True, "cells": len(members), "primitive": prim}
    if prim:
        wit["exponent"] = primitivity_exponent(M)
    if len(members) <= 16:
        wit["matrix"] = M.toarray().tolist()
    return prim, wit


def _window_mixing(m, cells, window, n_max):
    """Iterate exact images of every cell; find n0 with all pairs meeting on
    [n0, n0 + P].  A repeated image tuple with a failing pair is a proof of
    non-mixing (the failure recurs forever)."""
    images = list(cells)
    seen = {}
    good = []  # good[n-1]: all pairs meet at iterate n
    first_bad = {}
    n0 = None
    for n in range(1, n_max + 1):
        images = [m.image_of(S) for S in images]
        bad = next(
            ((i, j) for i, S in enumerate(images) for j, T in enumerate(cells) if not _meets(S, T)),
            None,
        )
        good.append(bad is None)
        if bad is not None:
            first_bad[n] = bad
            n0 = None
        elif n0 is None:
            n0 = n
        P = window if window is not None else 2 * n0 if n0 is not None else None
        if n0 is not None and n - n0 >= P:
            return MIXING, {"n0": n0, "window": P, "checked_through": n}
        key = tuple(S.key for S in images)
        if key in seen:
            start = seen[key]
            cyc = range(start + 1, n + 1)
            if all(good[k - 1] for k in cyc):
                n0 = n0 if n0 is not None else start + 1
                return MIXING, {"n0": n0, "window": "periodic", "cycle": [start, n]}
            k = next(k for k in cyc if not good[k - 1])
            i, j = first_bad[k]
            return NOT_MIXING, {"cycle": [start, n], "iterate": k, "pair": [i, j]}
        seen[key] = n
    return INCONCLUSIVE, {"n0": n0, "checked_through": n_max}


def certify_mixing_at_resolution(
    m: PLMap, eps, window: int | None = None, n_max: int = 64, depth: int = 8, max_points: int = 4000
) -> Certificate:
    """Mixing of m on the cells of the fine cover at mesh < eps.

    If the cell endpoints saturate to a Markov partition the verdict is the
    primitivity of its covering matrix (unconditional); otherwise exact image
    iteration within a window of iterates decides.
    """
    if m.domain != m.codomain:
        raise DomainMismatch("mixing is defined for self-maps")
    eps = q(eps)
    cells = list(fine_cover(m.domain, eps))
    wit = {"cells": len(cells)}
    mk = _markov_mixing(m, cells, depth, max_points)
    if mk is not None:
        prim, extra = mk
        wit.update(extra)
        verdict = MIXING if prim else NOT_MIXING
        # window data is still reported so n0 is comparable across methods
        wv, wextra = _window_mixing(m, cells, window, n_max)
        wit.update({f"window_{k}": v for k, v in wextra.items()})
        wit["window_verdict"] = wv
    else:
        wit["markov"] = False
        verdict, extra = _window_mixing(m, cells, window, n_max)
        wit.update(extra)
    return Certificate("mixing", verdict, verdict == MIXING, fmt(eps), wit)


def brute_force_mixing(m: PLMap, members: list) -> bool:
    """Some iterate k <= (n-1)^2 + 1 maps every member over every member."""
    n = len(members)
    images = list(members)
    for _ in range((n - 1) ** 2 + 1):
        images = [m.image_of(S) for S in images]
        if all(S.contains(T) for S in images for T in members):
            return True
    return False


# -- exactness --------------------------------------------------------------------


def fixed_points(m: PLMap) -> list:
    """Fixed points of a self-map: isolated ones and endpoints of fixed segments.

    Returns ``(points, segments)`` with segments as ``(eid, lo, hi)``.
    """
    g = m.domain
    pts, segs = set(), []
    for v in g.vertices:
        p = g.vertex_point(v)
        if g.canon(m(p)) == p:
            pts.add(p)
    for eid in g.edge_ids:
        for s0, s1, c, u0, u1 in m.pieces(eid):
            if c != eid:
                continue
            if u0 == s0 and u1 == s1:
                segs.append((eid, s0, s1))
                pts |= {g.canon(PointRef(eid, s0)), g.canon(PointRef(eid, s1))}
                continue
            # s = u0 + (s - s0) * k with k the slope
            k = (u1 - u0) / (s1 - s0)
            if k == 1:
                continue
            s = (u0 - k * s0) / (1 - k)
            if s0 <= s <= s1:
                pts.add(g.canon(PointRef(eid, s)))
    return sorted(p for p in pts if g.canon(m(p)) == p), segs


def fiber_witness(m: PLMap, hints=()):
    """A fixed point whose full preimage is itself, or None."""
    g = m.domain
    if g.total_length == 0:
        return None
    cands = [g.canon(p) for p in hints] + fixed_points(m)[0]
    for p in cands:
        if g.canon(m(p)) == p and m.preimage_of(p) == Subcontinuum.from_point(g, p):
            return p
    return None


def exact_at(m: PLMap, cells, k_max: int = 64):
    """Smallest k with m^k(C) = X for every cell C, or None within k_max."""
    whole = Subcontinuum.whole(m.domain)
    images = list(cells)
    for k in range(1, k_max + 1):
        images = [m.image_of(S) for S in images]
        if all(S == whole for S in images):
            return k
    return None


def certify_exactness(m: PLMap, eps=None, hints=(), k_max: int = 64) -> Certificate:
    """NOT_EXACT on a fixed point p with preimage {p}: no open set missing p
    ever covers p.  EXACT when every cell (Markov partition if one saturates,
    else the fine cover at eps) eventually covers the space."""
    p = fiber_witness(m, hints)
    if p is not None:
        return Certificate(
            "exactness", NOT_EXACT, True, None, {"fixed_point": _pt(p), "fiber": [_pt(p)]}
        )
    g = m.domain
    eps = q(eps) if eps is not None else ONE / 4
    cells = list(fine_cover(g, eps))
    pts, sat = saturate(m, grid_points(g, cells))
    if sat:
        cells = partition_from_points(g, pts)
    k = exact_at(m, cells, k_max)
    if k is not None:
        return Certificate(
            "exactness", EXACT, True, fmt(eps), {"exponent": k, "cells": len(cells), "markov": sat}
        )
    return Certificate("exactness", INCONCLUSIVE, False, fmt(eps), {"cells": len(cells), "k_max": k_max})


def certify_pure_mixing(m: PLMap, eps, window=None, hints=(), n_max: int = 64) -> Certificate:
    mix = certify_mixing_at_resolution(m, eps, window, n_max)
    ex = certify_exactness(m, eps, hints)
    wit = {"mixing": mix.verdict, "exactness": ex.verdict}
    wit.update({f"mixing_{k}": v for k, v in mix.witnesses.items()})
    wit.update({f"exactness_{k}": v for k, v in ex.witnesses.items()})
    ok = mix.verdict == MIXING and ex.verdict == NOT_EXACT
    if ok:
        # independent re-check of the structural witness
        g = m.domain
        p = fiber_witness(m, hints)
        ok = p is not None and m.preimage_of(p) == Subcontinuum.from_point(g, p)
    failures = [] if ok else [c.kind for c in (mix, ex) if not (c.verdict in (MIXING, NOT_EXACT))]
    return Certificate("pure_mixing", PURE_MIXING if ok else NOT_PURE, ok, fmt(q(eps)), wit, failures)


# -- entropy --------------------------------------------------------------------


@dataclass
class EntropyBound:
    """Certified ``log(rho)`` lower bound with ``rho`` exact."""

    rho: Fraction
    estimate: float  # floating spectral radius of the winning matrix
    cells: int
    markov: bool
    source: str

    @property
    def value(self) -> float:
        return math.log(self.rho) if self.rho > 0 else 0.0

    def exceeds(self, rho) -> bool:
        """Exact test ``self.rho > rho`` (compare logs by comparing radii)."""
        return self.rho > Fraction(rho)

    def as_dict(self) -> dict:
        return {
            "rho_lower": f"{self.rho.numerator}/{self.rho.denominator}",
            "log_lower": round(self.value, 12),
            "rho_estimate": round(self.estimate, 12),
            "cells": self.cells,
            "markov": self.markov,
            "source": self.source,
        }


def dyadic_partition(g, k: int) -> list:
    pts = {g.vertex_point(v) for v in g.vertices}
    for eid in g.edge_ids:
        pts |= {g.canon(PointRef(eid, q(f"{j}/{2**k}"))) for j in range(1, 2**k)}
    return partition_from_points(g, pts)


def _matrix_like(m) -> bool:
    return not isinstance(m, PLMap)


def entropy_markov_lower_bound(
    m,
    depth: int = 8,
    max_points: int = 2000,
    grids=None,
    require_markov: bool = False,
    piece_limit: int = 50000,
) -> EntropyBound:
    """Best covering-matrix lower bound over several partitions.

    For an arc partition with disjoint interiors, ``log rho(M)`` of its
    covering matrix is at most the topological entropy whether or not the
    partition is Markov, so the maximum over candidates is still certified.
    Candidates: breakpoints closed under images up to ``depth`` rounds (Markov
    when saturated; large maps use the bare breakpoints) and uniform dyadic
    grids, by default 2^-1 down to 2^-12 (finer, up to 2^-14, for maps with
    many pieces).  The breakpoint candidate is skipped above ``piece_limit``
    pieces.
    A matrix argument is bounded directly.
    """
    if _matrix_like(m):
        M = as_sparse(m)
        rho, est = spectral_lower_bound(M)
        return EntropyBound(rho, est, M.shape[0], True, "matrix")
    g = m.domain
    cands = []
    markov = False
    if m.n_pieces <= piece_limit:
        rounds = depth if m.n_pieces <= max_points else 0
        pts, sat = saturate(m, (), rounds, max_points)
        markov = sat
        cands.append(("markov" if sat else f"breakpoints+{rounds}", partition_from_points(g, pts), sat))
    if require_markov and not markov:
        raise NonMarkov("breakpoint images do not saturate within the depth budget")
    if grids is None:
        grids = range(1, min(14, max(12, m.n_pieces.bit_length() - 3)) + 1)
    for k in grids:
        cands.append((f"dyadic{k}", dyadic_partition(g, k), False))
    best = None
    for name, members, is_markov in cands:
        rho, est = spectral_lower_bound(covering_matrix(m, members))
        if best is None or rho > best.rho:
            best = EntropyBound(rho, est, len(members), is_markov, name)
    return best


# -- periodic points --------------------------------------------------------------


def orbit_period(m: PLMap, p: PointRef, k_max: int):
    """Least k <= k_max with m^k(p) = p (exact), else None."""
    g = m.domain
    p = g.canon(p)
    z = p
    for k in range(1, k_max + 1):
        z = g.canon(m(z))
        if z == p:
            return k
    return None


def sample_points(g, samples: int) -> list:
    """About ``samples`` grid points spread over the edges by length."""
    total = g.total_length
    pts = set()
    for eid in g.edge_ids:
        n = max(1, round(samples * g.length(eid) / total))
        pts |= {g.canon(PointRef(eid, q(f"{j}/{n}"))) for j in range(n + 1)}
    return sorted(pts)


def _nearest(g, x: PointRef, by_edge: dict, pts: list, eps):
    """Closest known periodic point to x; same-edge neighbours first, full
    search only when none of them is within eps."""
    best = None
    for p in by_edge.get(x.edge, []):
        d = abs(p.param - x.param) * g.length(x.edge)
        if best is None or d < best[0]:
            best = (d, p)
    if best is not None and best[0] < eps:
        return best
    for p in pts:
        d = g.distance(x, p)
        if best is None or d < best[0]:
            best = (d, p)
    return best


def periodic_density_check(
    m: PLMap, eps, samples: int = 64, seeds=(), k_max: int = 7, seed_k_max: int = 512, piece_budget: int = 200000
) -> Certificate:
    """Every sample grid point lies within eps of an exactly verified periodic point.

    Periodic points come from ``seeds`` (orbits followed exactly) and from
    solving m^k(p) = p piece by piece for k <= k_max while the iterate stays
    within ``piece_budget`` pieces.
    """
    g = m.domain
    eps = q(eps)
    period = {}
    for s in seeds:
        k = orbit_period(m, s, seed_k_max)
        if k is not None:
            period.setdefault(g.canon(s), k)
    fixed_segs = []
    mk = m
    solved = 0
    for k in range(1, k_max + 1):
        if k > 1:
            if mk.n_pieces * m.n_pieces > piece_budget:
                break
            mk = compose(m, mk)
        pts, segs = fixed_points(mk)
        for p in pts:
            if p not in period:
                period[p] = orbit_period(m, p, k)
        fixed_segs += [(eid, lo, hi, k) for eid, lo, hi in segs]
        solved = k
    by_edge = {}
    for p in period:
        by_edge.setdefault(p.edge, []).append(p)
    allpts = sorted(period)
    gap, worst, report = ZERO, None, []
    for x in sample_points(g, samples):
        seg = next(((eid, k) for eid, lo, hi, k in fixed_segs if eid == x.edge and lo <= x.param <= hi), None)
        if seg is not None:
            d, p, k = ZERO, x, orbit_period(m, x, seg[1])
        else:
            near = _nearest(g, x, by_edge, allpts, eps) if allpts else None
            if near is None:
                d, p, k = None, None, None
            else:
                (d, p), k = near, period[near[1]]
        if d is None or k is None:
            gap, worst = None, x
            report.append([_pt(x), None, None, None])
            continue
        if gap is not None and d > gap:
            gap, worst = d, x
        report.append([_pt(x), _pt(p), k, fmt(d)])
    # independent exact re-evaluation of every reported orbit
    verified = all(
        r[1] is None or orbit_period(m, _parse_pt(r[1]), r[2]) is not None for r in report
    )
    ok = gap is not None and gap < eps and verified
    wit = {
        "max_gap": None if gap is None else fmt(gap),
        "worst_sample": None if worst is None else _pt(worst),
        "periodic_points": len(period),
        "solved_periods": solved,
        "seeds": len(seeds),
        "orbits_reverified": verified,
        "samples": report,
    }
    return Certificate("periodic_density", "PASS" if ok else "FAIL", ok, fmt(eps), wit)


def _parse_pt(text: str) -> PointRef:
    e, t = text.strip("()").split(",")
    return PointRef(int(e), q(t.strip()))


# -- composition and factor checks -----------------------------------------------------


def kolyada_crosscheck(f: PLMap, g: PLMap, eps, tol=Fraction(15, 100), window=None, n_max: int = 64) -> Certificate:
    """Mixing of g o f must carry over to f o g; entropy bounds must agree within tol.

    Only the implication from g o f to f o g is asserted; the converse is
    false in general and is not checked.
    """
    if f.codomain != g.domain or g.codomain != f.domain:
        raise DomainMismatch("f and g are not composable both ways")
    gf, fg = compose(g, f), compose(f, g)
    mix_gf = certify_mixing_at_resolution(gf, eps, window, n_max)
    mix_fg = certify_mixing_at_resolution(fg, eps, window, n_max)
    ent_gf = entropy_markov_lower_bound(gf)
    ent_fg = entropy_markov_lower_bound(fg)
    diff = abs(ent_gf.value - ent_fg.value)
    implication = mix_gf.verdict != MIXING or mix_fg.verdict == MIXING
    checks = {"mixing_implication": implication, "entropy_gap": diff <= float(tol)}
    wit = {
        "g_after_f_mixing": mix_gf.verdict,
        "f_after_g_mixing": mix_fg.verdict,
        "g_after_f_n0": mix_gf.witnesses.get("n0", mix_gf.witnesses.get("window_n0")),
        "f_after_g_n0": mix_fg.witnesses.get("n0", mix_fg.witnesses.get("window_n0")),
        "g_after_f_entropy": ent_gf.as_dict(),
        "f_after_g_entropy": ent_fg.as_dict(),
        "entropy_gap": round(diff, 12),
        "tolerance": f"{tol.numerator}/{tol.denominator}",
    }
    failures = [k for k, ok in checks.items() if not ok]
    return Certificate("kolyada", "FAIL" if failures else "PASS", not failures, fmt(q(eps)), wit, failures)


def _joint_points(phi: PLMap, h_hat: PLMap, h: PLMap) -> list:
    """Breakpoints of both sides of h o phi = phi o h_hat on the cover space,
    plus midpoints between consecutive ones."""
    G = phi.domain
    pts = set()
    for eid in G.edge_ids:
        pts |= {G.canon(PointRef(eid, s)) for s in phi.breakpoints(eid)}
        pts |= {G.canon(PointRef(eid, s)) for s in h_hat.breakpoints(eid)}
    X = h.domain
    for eid in X.edge_ids:
        for s in h.breakpoints(eid):
            pts.update(phi.preimage_points(X.canon(PointRef(eid, s))))
    # phi o h_hat breaks where h_hat hits a breakpoint of phi
    for eid in G.edge_ids:
        for s in phi.breakpoints(eid):
            pts.update(h_hat.preimage_points(G.canon(PointRef(eid, s))))
    out = set(pts)
    for eid in G.edge_ids:
        ts = sorted({p.param for p in pts if p.edge == eid} | {ZERO, ONE})
        for a, b in zip(ts, ts[1:]):
            out.add(G.canon(PointRef(eid, (a + b) / 2)))
    return sorted(out)


def factor_commute_check(phi: PLMap, h_hat: PLMap, h: PLMap, grid: int = 10**4) -> Certificate:
    """Exact pointwise test of h(phi(p)) = phi(h_hat(p)) at joint breakpoints,
    their midpoints and a uniform grid; reports the first counterexample."""
    if phi.codomain != h.domain or h_hat.domain != phi.domain:
        raise DomainMismatch("phi, h_hat and h are not compatible")
    G, X = phi.domain, h.domain
    joint = _joint_points(phi, h_hat, h)
    total = G.total_length
    grid_pts = []
    for eid in G.edge_ids:
        n = max(1, round(grid * G.length(eid) / total))
        grid_pts += [G.canon(PointRef(eid, q(f"{j}/{n}"))) for j in range(n + 1)]
    bad = None
    checked = 0
    for p in joint + grid_pts:
        checked += 1
        lhs, rhs = X.canon(h(phi(p))), X.canon(phi(h_hat(p)))
        if lhs != rhs:
            bad = {"point": _pt(p), "h_phi": _pt(lhs), "phi_h_hat": _pt(rhs)}
            break
    wit = {"joint_points": len(joint), "grid_points": len(grid_pts), "checked": checked}
    if bad:
        wit["counterexample"] = bad
    return Certificate("factor_commute", "FAIL" if bad else "PASS", bad is None, None, wit, ["commute"] if bad else [])
