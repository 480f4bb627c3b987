import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import brute_primitive
from puremix.markov import (
    covering_matrix, is_irreducible, is_primitive, markov_partition_of, period,
    primitivity_exponent, spectral_lower_bound, wielandt_bound,
)
from puremix.spaces import flip, identity_interval, markov_corpus, permutation_map, sawtooth, tent

matrices = st.integers(1, 7).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=n, max_size=n)
).map(lambda rows: np.array(rows, dtype=np.int64))


def brute_exponent(M):
    A = (M > 0).astype(np.int64)
    P = A.copy()
    for k in range(1, wielandt_bound(len(M)) + 1):
        if P.all():
            return k
        P = np.minimum(P @ A, 1)
    return None


@given(matrices)
def test_primitivity_matches_powers(M):
    assert is_primitive(M) == brute_primitive(M)
    assert primitivity_exponent(M) == brute_exponent(M)


@given(matrices)
def test_spectral_bound_is_below_radius(M):
    r, est = spectral_lower_bound(M)
    rho = float(np.abs(np.linalg.eigvals(M.astype(float))).max())
    assert float(r) <= rho + 1e-9
    assert float(r) >= rho - 1e-6
    assert abs(est - rho) < 1e-6


def test_wielandt_matrix_is_extremal():
    n = 5
    W = np.zeros((n, n), dtype=np.int64)
    for i in range(n - 1):
        W[i, i + 1] = 1
    W[n - 1, 0] = W[n - 1, 1] = 1
    assert primitivity_exponent(W) == wielandt_bound(n)


def test_period_of_cycles():
    C = np.roll(np.eye(4, dtype=np.int64), 1, axis=1)
    assert is_irreducible(C) and period(C) == 4 and not is_primitive(C)
    assert not is_irreducible(np.array([[1, 1], [0, 1]]))


def test_exact_growth_rates():
    assert spectral_lower_bound(np.ones((2, 2), dtype=np.int64))[0] == 2
    assert math.isclose(math.log(spectral_lower_bound(np.ones((2, 2)))[0]), math.log(2))
    golden = spectral_lower_bound(np.array([[1, 1], [1, 0]]))[0]
    # r <= phi exactly iff r^2 <= r + 1 for r >= 1
    assert golden * golden <= golden + 1
    assert float(golden) > (1 + math.sqrt(5)) / 2 - 1e-9


@pytest.mark.parametrize("m,rho", [(tent(), 2), (sawtooth(3), 3), (sawtooth(5), 5), (identity_interval(), 1), (flip(), 1)])
def test_covering_matrix_radius(m, rho):
    part = markov_partition_of(m)
    assert part.markov
    M = covering_matrix(m, part.members)
    assert spectral_lower_bound(M)[0] == rho


def test_covering_matrix_entries():
    m = permutation_map([1, 2, 0])
    part = markov_partition_of(m)
    M = covering_matrix(m, part.members).toarray()
    # [0,1/2] -> [1/2,1]; [1/2,1] -> [0,1]
    assert M.tolist() == [[0, 1], [1, 1]]


def test_corpus_is_small_and_markov():
    corpus = markov_corpus()
    assert len(corpus) >= 20
    for name, m in corpus:
        part = markov_partition_of(m)
        assert part.markov and len(part) <= 8, name
