"""Floating-point orbit estimates (heuristics, never certificates)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .plmap import PLMap

GRID_BITS = 14


class FloatMap:
    """Vectorized evaluation of a PL self-map on arrays of (edge, param)."""

    def __init__(self, m: PLMap):
        self.tables = {}
        for eid in m.domain.edge_ids:
            ps = list(m.pieces(eid))
            self.tables[eid] = (
                np.array([float(p[0]) for p in ps]),
                np.array([float(p[1]) for p in ps]),
                np.array([p[2] for p in ps]),
                np.array([float(p[3]) for p in ps]),
                np.array([float(p[4]) for p in ps]),
            )

    def __call__(self, E: np.ndarray, T: np.ndarray):
        outE = np.empty_like(E)
        outT = np.empty_like(T)
        for eid, (s0, s1, c, u0, u1) in self.tables.items():
            sel = E == eid
            if not sel.any():
                continue
            t = T[sel]
            j = np.clip(np.searchsorted(s0, t, side="right") - 1, 0, len(s0) - 1)
            w = (t - s0[j]) / (s1[j] - s0[j])
            outE[sel] = c[j]
            outT[sel] = np.clip(u0[j] + w * (u1[j] - u0[j]), 0.0, 1.0)
        return outE, outT


class FloatMetric:
    """Geodesic distance between point arrays, through vertex distances."""

    def __init__(self, g):
        self.vindex = {v: i for i, v in enumerate(g.vertices)}
        n = len(g.vertices)
        D = np.full((n, n), np.inf)
        for v, row in g.vertex_distance.items():
            for w, d in row.items():
                D[self.vindex[v], self.vindex[w]] = float(d)
        self.D = D
        ids = sorted(g.edge_ids)
        size = max(ids) + 1
        self.L = np.zeros(size)
        self.tail = np.zeros(size, dtype=int)
        self.head = np.zeros(size, dtype=int)
        self.loop = np.zeros(size, dtype=bool)
        for eid in ids:
            e = g.edge(eid)
            self.L[eid] = float(e.length)
            self.tail[eid] = self.vindex[e.tail]
            self.head[eid] = self.vindex[e.head]
            self.loop[eid] = e.is_loop

    def dist(self, e, t, E, T):
        """Distances from the single point (e, t) to arrays (E, T)."""
        L = self.L
        a, b = t * L[e], (1 - t) * L[e]
        A, B = T * L[E], (1 - T) * L[E]
        ta, ha = self.tail[e], self.head[e]
        tE, hE = self.tail[E], self.head[E]
        D = self.D
        d = np.minimum.reduce([
            a + D[ta, tE] + A,
            a + D[ta, hE] + B,
            b + D[ha, tE] + A,
            b + D[ha, hE] + B,
        ])
        same = E == e
        direct = np.abs(T - t) * L[e]
        if self.loop[e]:
            direct = np.minimum(direct, L[e] - direct)
        return np.where(same, np.minimum(d, direct), d)


@dataclass
class SeparatedEstimate:
    n: int
    eps: float
    count: int
    grid: int

    @property
    def value(self) -> float:
        return math.log(self.count) / self.n if self.count > 0 else 0.0


def grid_arrays(g, bits: int = GRID_BITS):
    """Points j / 2^bits on every edge (vertices once)."""
    Es, Ts, seen = [], [], set()
    k = 2**bits
    for eid in sorted(g.edge_ids):
        e = g.edge(eid)
        for j in range(k + 1):
            if j in (0, k):
                v = e.tail if j == 0 else e.head
                if v in seen:
                    continue
                seen.add(v)
            Es.append(eid)
            Ts.append(j / k)
    return np.array(Es), np.array(Ts)


def orbits(m: PLMap, E, T, n: int):
    fm = FloatMap(m)
    out = [(E, T)]
    for _ in range(n - 1):
        out.append(fm(*out[-1]))
    return np.array([o[0] for o in out]), np.array([o[1] for o in out])


def separated_count(m: PLMap, eps: float, n: int, bits: int = GRID_BITS) -> int:
    """Greedy (n, eps)-separated subset of the dyadic grid, scanned in order.

    A candidate is kept if its orbit is more than eps away at some step from
    the orbit of every point already kept.
    """
    g = m.domain
    metric = FloatMetric(g)
    E, T = grid_arrays(g, bits)
    OE, OT = orbits(m, E, T, n)
    chosen = []
    interval = len(g.edge_ids) == 1 and not metric.loop[E[0]]
    start = 0
    for i in range(len(E)):
        if interval:
            # the grid is scanned left to right, so only recent picks can be close
            while start < len(chosen) and (T[i] - T[chosen[start]]) * metric.L[E[0]] > eps:
                start += 1
            chosen_arr = np.array(chosen[start:], dtype=int)
        else:
            chosen_arr = np.array(chosen, dtype=int)
        if len(chosen_arr):
            d0 = metric.dist(E[i], T[i], E[chosen_arr], T[chosen_arr])
            near = chosen_arr[d0 <= eps]
            if len(near):
                worst = np.zeros(len(near))
                for k in range(n):
                    dk = metric.dist(OE[k, i], OT[k, i], OE[k, near], OT[k, near])
                    worst = np.maximum(worst, dk)
                if (worst <= eps).any():
                    continue
        chosen.append(i)
    return len(chosen)


def entropy_separated_estimate(m: PLMap, eps: float, n_max: int, bits: int = GRID_BITS) -> SeparatedEstimate:
    """``log s(n, eps) / n`` at n = n_max from a greedy grid search (heuristic)."""
    return SeparatedEstimate(n_max, float(eps), separated_count(m, float(eps), n_max, bits), 2**bits)
