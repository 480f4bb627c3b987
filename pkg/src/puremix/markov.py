"""Partitions, covering matrices and certified growth rates."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .graph import PointRef
from .plmap import PLMap
from .rational import ONE, ZERO
from .sets import Subcontinuum


class NonMarkov(ValueError):
    pass


@dataclass
class MarkovPartition:
    members: list
    markov: bool
    depth: int
    points: int

    def __len__(self):
        return len(self.members)


def partition_from_points(g, points) -> list:
    """Closed edge segments between consecutive cut points (vertices included)."""
    cuts = {eid: {ZERO, ONE} for eid in g.edge_ids}
    for p in points:
        if g.vertex_of(p) is None:
            cuts[p.edge].add(p.param)
    out = []
    for eid in g.edge_ids:
        ts = sorted(cuts[eid])
        out += [Subcontinuum.segment(g, eid, a, b) for a, b in zip(ts, ts[1:])]
    return out


def markov_partition_of(m: PLMap, depth: int = 8, max_points: int = 20000) -> MarkovPartition:
    """Partition cut at breakpoints and their forward images.

    Saturation (no new points) within ``depth`` rounds makes it a Markov
    partition; otherwise the finest partition reached is returned unflagged.
    """
    g = m.domain
    pts = {g.vertex_point(v) for v in g.vertices}
    pts |= {g.canon(PointRef(eid, s)) for eid in g.edge_ids for s in m.breakpoints(eid)}
    frontier = set(pts)
    rounds = 0
    while frontier and rounds < depth and len(pts) <= max_points:
        new = {m(p) for p in frontier} - pts
        pts |= new
        frontier = new
        rounds += 1
    return MarkovPartition(partition_from_points(g, pts), not frontier, rounds, len(pts))


def covering_matrix(m: PLMap, members: list) -> sparse.csr_matrix:
    """0/1 matrix with M[i, j] = 1 iff m(member i) contains member j.

    Members must be nondegenerate segments with pairwise disjoint interiors.
    """
    index = {}
    for j, P in enumerate(members):
        ((eid, a, b),) = P.segment_list()
        index.setdefault(eid, []).append((a, b, j))
    for eid in index:
        index[eid].sort()
    starts = {eid: [a for a, _, _ in lst] for eid, lst in index.items()}
    rows, cols = [], []
    for i, P in enumerate(members):
        img = m.image_of(P)
        for c, lo, hi in img.segment_list():
            lst = index.get(c, [])
            k = bisect.bisect_left(starts.get(c, []), lo)
            while k < len(lst) and lst[k][1] <= hi:
                rows.append(i)
                cols.append(lst[k][2])
                k += 1
    n = len(members)
    data = np.ones(len(rows), dtype=np.int64)
    M = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
    M.data[:] = 1
    return M


def as_sparse(M) -> sparse.csr_matrix:
    if sparse.issparse(M):
        return sparse.csr_matrix(M, dtype=np.int64)
    return sparse.csr_matrix(np.asarray(M, dtype=np.int64))


# -- primitivity -----------------------------------------------------------------


def period(M) -> int:
    """Period of an irreducible nonnegative matrix (gcd of cycle lengths)."""
    M = as_sparse(M)
    order, pred = breadth_first_order(M, 0, directed=True, return_predecessors=True)
    level = np.full(M.shape[0], -1)
    level[0] = 0
    for v in order[1:]:
        level[v] = level[pred[v]] + 1
    coo = M.tocoo()
    diffs = level[coo.row] + 1 - level[coo.col]
    return reduce(math.gcd, (int(abs(d)) for d in diffs), 0)


def is_irreducible(M) -> bool:
    M = as_sparse(M)
    if M.shape[0] == 1:
        return M[0, 0] != 0
    n, _ = connected_components(M, directed=True, connection="strong")
    return n == 1


def is_primitive(M) -> bool:
    return is_irreducible(M) and period(M) == 1


def wielandt_bound(n: int) -> int:
    return (n - 1) ** 2 + 1


def _bool_mul(A, B):
    return np.minimum(A @ B, 1)


def primitivity_exponent(M, dense_limit: int = 1024):
    """Smallest k with M^k entrywise positive, by repeated squaring then
    binary search, or None when M is not primitive.  For matrices above
    ``dense_limit`` only primitivity is decided and the Wielandt bound is
    returned as the exponent bound."""
    M = as_sparse(M)
    if not is_primitive(M):
        return None
    n = M.shape[0]
    if n > dense_limit:
        return wielandt_bound(n)
    A = (M.toarray() > 0).astype(np.int64)
    powers = [A]
    k = 1
    while not powers[-1].all():
        powers.append(_bool_mul(powers[-1], powers[-1]))
        k *= 2
        if k > 2 * wielandt_bound(n):
            raise AssertionError("primitive matrix failed to become positive")
    # binary search on the exponent using the stored powers
    acc = np.eye(n, dtype=np.int64)
    exp = 0
    for j in range(len(powers) - 2, -1, -1):
        trial = _bool_mul(acc, powers[j])
        if not trial.all():
            acc = trial
            exp += 2**j
    return exp + 1


# -- growth rates ------------------------------------------------------------------


def _perron_vector(A) -> np.ndarray:
    n = A.shape[0]
    if n <= 400:
        w, V = np.linalg.eig(A.toarray().astype(float))
        v = np.abs(V[:, int(np.argmax(w.real))].real)
    else:
        B = A.astype(float) + sparse.identity(n, format="csr")
        v = np.ones(n) / n
        for _ in range(3000):
            nv = B @ v
            nv /= nv.sum()
            if np.abs(nv - v).max() < 1e-14:
                v = nv
                break
            v = nv
    return v


def spectral_lower_bound(M):
    """Certified lower bound on the spectral radius of a 0/1 (or integer) matrix.

    On each strongly connected component a positive integer vector x close to
    the Perron vector is chosen and ``min_i (Mx)_i / x_i`` is computed exactly;
    by the Collatz-Wielandt formula this never exceeds the spectral radius.
    Returns ``(bound: Fraction, estimate: float)``.
    """
    M = as_sparse(M)
    n = M.shape[0]
    if n == 0:
        return Fraction(0), 0.0
    ncomp, labels = connected_components(M, directed=True, connection="strong")
    best, est = Fraction(0), 0.0
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        A = M[idx][:, idx]
        if A.nnz == 0:
            continue
        v = _perron_vector(A)
        v = v / v.max()
        x = np.maximum(np.rint(v * 2**40).astype(np.int64), 1)
        y = A @ x
        r = min(Fraction(int(yi), int(xi)) for yi, xi in zip(y, x))
        if r > best:
            best = r
        if len(idx) <= 400:
            est = max(est, float(np.abs(np.linalg.eigvals(A.toarray().astype(float))).max()))
        else:
            est = max(est, float(np.max((A @ v)[v > 0] / v[v > 0])))
    return best, est


def log_lower(r: Fraction) -> float:
    return math.log(r) if r > 0 else float("-inf")
