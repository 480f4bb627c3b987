"""Acceptance criteria, one test each.

Every test records a single PASS/FAIL line; the lines are printed as they
happen and again in the terminal summary (see conftest.py).
"""
import math
import random
import time

import pytest

from oracles import brute_classify
from puremix.certify import (
    PURE_MIXING, brute_force_mixing, certify_pure_mixing, entropy_markov_lower_bound,
    factor_commute_check, kolyada_crosscheck, periodic_density_check,
)
from puremix.construction import build_pure_mixing, periodic_seeds, stage_maps
from puremix.extension import unit_interval
from puremix.graph import BaseCase, PointRef, classify_point, select_base_point
from puremix.markov import covering_matrix, is_primitive, markov_partition_of
from puremix.rational import Q
from puremix.sets import Subcontinuum
from puremix.spaces import circle, circle_corpus, markov_corpus, random_graph, theta, y_tree

RESULTS = []


def report(k, title, ok, detail):
    line = f"criterion {k} [{title}]: {'PASS' if ok else 'FAIL'} ({detail})"
    RESULTS.append(line)
    print(line, flush=True)
    assert ok, line


@pytest.fixture(scope="module")
def timed_build():
    t0 = time.perf_counter()
    res = build_pure_mixing(unit_interval(), N=3, check=True)
    return res, time.perf_counter() - t0


def test_c1_interval_build(timed_build):
    res, secs = timed_build
    stages_ok = len(res.certificates) == 4 and all(
        c.ok and all(c.witnesses[f"({i})"] == "PASS" for i in range(1, 14)) for c in res.certificates
    )
    pure = certify_pure_mixing(res.h, Q(1, 8), hints=res.fixed_points)
    w = pure.witnesses
    n0 = w.get("mixing_n0", w.get("mixing_window_n0"))
    zero = PointRef(0, Q(0))
    fiber = res.h.preimage_of(zero) == Subcontinuum.from_point(res.space, zero)
    ok = stages_ok and pure.verdict == PURE_MIXING and n0 is not None and n0 <= 6 and fiber and secs <= 60
    report(1, "interval build N=3", ok, f"stages {stages_ok}, {pure.verdict}, n0={n0}, h^-1(0)={{0}} {fiber}, {secs:.1f}s")


def test_c2_entropy_anchor(timed_build):
    res, _ = timed_build
    b = entropy_markov_lower_bound(res.h)
    # log rho > log(3)/2  iff  rho^2 > 3, decided in exact arithmetic
    ok = b.rho * b.rho > 3
    report(2, "entropy >= log(3)/2", ok, f"log rho >= {b.value:.4f} vs {math.log(3) / 2:.4f}, {b.cells} cells")


def test_c3_entropy_growth(interval_build4):
    vals = [entropy_markov_lower_bound(h).value for h in stage_maps(interval_build4)]
    monotone = all(a <= b for a, b in zip(vals, vals[1:]))
    ok = len(vals) == 4 and monotone and vals[-1] - vals[0] >= 0.5
    report(3, "entropy growth N=1..4", ok, ", ".join(f"{v:.4f}" for v in vals))


def test_c4_dense_periodicity(timed_build):
    res, _ = timed_build
    st = res.stages[2]
    scale = res.space.total_length / st.space.total_length
    eps = max(F.diam for F in st.cover) * scale
    cert = periodic_density_check(res.h, eps, seeds=periodic_seeds(res), k_max=0)
    ok = cert.ok and cert.witnesses["orbits_reverified"]
    report(4, "dense periodic points", ok, f"eps={eps}, max gap {cert.witnesses['max_gap']}, {cert.witnesses['periodic_points']} periodic points")


def test_c5_surgery_factor(circle_build, theta_build):
    parts = []
    ok = True
    for name, res in (("circle", circle_build), ("theta", theta_build)):
        fc = factor_commute_check(res.phi, res.h, res.h_factored)
        x = res.fixed_points[0]
        fiber = res.h_factored.preimage_of(x) == Subcontinuum.from_point(res.original, x)
        ok &= fc.ok and fiber
        parts.append(f"{name}: commute {fc.verdict} on {fc.witnesses['checked']} points, fiber {fiber}")
    report(5, "surgery and factor", ok, "; ".join(parts))


def test_c6_kolyada(timed_build):
    res, _ = timed_build
    cert = kolyada_crosscheck(res.f, res.g, Q(1, 8))
    w = cert.witnesses
    ok = cert.ok and w["g_after_f_mixing"] == "MIXING" and w["f_after_g_mixing"] == "MIXING"
    report(6, "Kolyada cross-check", ok, f"g.f {w['g_after_f_mixing']}, f.g {w['f_after_g_mixing']}, gap {w['entropy_gap']}")


def test_c7_oracle_equivalence():
    corpus = markov_corpus() + circle_corpus()
    disagree, checked = [], 0
    for name, m in corpus:
        part = markov_partition_of(m)
        if not part.markov or len(part) > 8:
            continue
        checked += 1
        prim = is_primitive(covering_matrix(m, part.members))
        if prim != brute_force_mixing(m, part.members):
            disagree.append(name)
    ok = checked >= 20 and not disagree
    report(7, "primitivity vs image iteration", ok, f"{checked} maps, disagreements {disagree}")


def test_c8_classifier_oracle():
    rng = random.Random(2024)
    disagree, checked = 0, 0
    for _ in range(10):
        g = random_graph(rng, max_edges=12)
        pts = [g.vertex_point(v) for v in g.vertices] + [PointRef(e, Q(1, 2)) for e in g.edge_ids]
        for p in pts:
            pc = classify_point(g, p)
            cut, order = brute_classify(g, g.canon(p))
            checked += 1
            if (pc.is_cut_point, pc.menger_order, pc.is_local_cut_point) != (cut, order, order >= 2):
                disagree += 1
    cases = [select_base_point(g)[1] for g in (unit_interval(), y_tree(), y_tree((1, 2, 3, 1)))]
    cyc = [select_base_point(g)[1] for g in (circle(), theta())]
    ok = not disagree and all(c == BaseCase.NOT_LOCAL_CUT for c in cases) and all(
        c == BaseCase.ORDER2_LOCAL_CUT for c in cyc
    )
    report(8, "classifier oracle", ok, f"{checked} points, {disagree} disagreements, base cases {[c.value for c in cases + cyc]}")
