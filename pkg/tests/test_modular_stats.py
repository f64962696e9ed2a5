import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import isprime

from zaremba_lab.cantor import IntervalUnion
from zaremba_lab.errors import DomainError
from zaremba_lab.modular_stats import (
    as_mask,
    classify_good,
    count_T_action,
    count_T_action_brute,
    equidistributed_interval,
    equidistributed_length_bound,
    intersect_inverse,
    intersect_inverse_brute,
    inverse_table,
    is_k_equidistributed,
    random_interval_union,
    sigma_star,
    thicken,
    thicken_upper_bound,
)


@st.composite
def residue_sets(draw, q_max=400):
    q = draw(st.integers(3, q_max))
    A = draw(st.sets(st.integers(0, q - 1), min_size=1, max_size=60))
    B = draw(st.sets(st.integers(0, q - 1), min_size=1, max_size=60))
    return q, A, B


def test_inverse_table():
    inv = inverse_table(10)
    assert inv.tolist() == [0, 1, 0, 7, 0, 0, 0, 3, 0, 9]


def test_as_mask_forms_agree():
    U = IntervalUnion(10, ((2, 3),))
    m = as_mask(U, 10)
    assert np.array_equal(m, as_mask([2, 3, 4], 10))
    assert np.array_equal(m, as_mask(np.array([12, 3, 4]), 10))
    assert np.array_equal(m, as_mask(m, 10))
    with pytest.raises(DomainError):
        as_mask(U, 11)
    with pytest.raises(DomainError):
        as_mask(np.zeros(5, dtype=bool), 10)


def test_random_interval_union_is_seeded_and_separated():
    U = random_interval_union(101, 3, 5, 0)
    assert U.intervals == ((42, 5), (59, 5), (83, 5))
    assert random_interval_union(101, 3, 5, 0) == U
    big = random_interval_union(99991, 100, 300, 7)
    assert big.size == 30000
    ends = [s + n for s, n in big.intervals]
    assert all(e < s for e, (s, _) in zip(ends, big.intervals[1:]))
    with pytest.raises(DomainError):
        random_interval_union(100, 20, 5, 0)


def test_t_action_small():
    assert count_T_action({1}, {1}, 2, 5).observed == 0
    assert count_T_action(range(1, 20), range(1, 20), 5, 101).observed == 26


@given(residue_sets(), st.integers(0, 20))
def test_t_action_matches_double_loop(sets, N):
    q, A, B = sets
    N = min(N, q - 1)
    assert count_T_action(A, B, N, q).observed == count_T_action_brute(A, B, N, q)


def test_intersect_small():
    assert intersect_inverse(set(range(1, 7)), set(range(1, 7)), 7).observed == 6
    assert intersect_inverse({1, 2}, {1, 3}, 5).observed == 2
    r = intersect_inverse(range(2, 13), range(1, 13), 12)
    assert r.observed == 10
    assert r.params["excluded"] == 1 and r.params["residue_lift"] == 10


@given(residue_sets())
def test_intersect_matches_double_loop(sets):
    q, A, B = sets
    assert intersect_inverse(A, B, q).observed == intersect_inverse_brute(A, B, q)


@given(residue_sets())
def test_conventions_agree_on_units(sets):
    q, A, B = sets
    units = {a for a in A if math.gcd(a, q) == 1}
    if units:
        r = intersect_inverse(units, B, q)
        assert r.observed == r.params["residue_lift"]


@given(st.integers(3, 500).filter(isprime), st.data())
def test_prime_modulus_conventions_coincide(q, data):
    A = data.draw(st.sets(st.integers(0, q - 1), min_size=1))
    r = intersect_inverse(A, A, q)
    assert r.observed == r.params["residue_lift"] == sigma_star(A, q).observed


def test_sigma_star_small():
    assert sigma_star(set(range(6)), 6).observed == 2
    r = sigma_star(range(12), 12)
    assert r.observed == r.params["mobius_sum"] == 4
    assert r.predicted == pytest.approx(4.0)


@given(st.integers(4, 3000).filter(lambda q: not isprime(q)), st.data())
def test_mobius_identity(q, data):
    A = data.draw(st.sets(st.integers(0, q - 1), min_size=1, max_size=200))
    r = sigma_star(A, q)
    assert r.observed == r.params["mobius_sum"]


def test_report_serialises():
    d = intersect_inverse({1, 2}, {1, 3}, 5, seed=3).to_dict()
    assert set(d) == {"op", "q", "params", "observed", "predicted", "abs_dev", "rel_dev", "seed"}
    assert json.loads(json.dumps(d))["seed"] == 3


def test_thicken():
    assert thicken({5}, 4, 100)[1] == 5
    mask, size = thicken({0}, 4, 10)
    assert np.nonzero(mask)[0].tolist() == [0, 1, 2, 8, 9] and size == 5
    assert thicken({3}, 50, 20)[1] == 20
    with pytest.raises(DomainError):
        thicken({3}, 0, 20)
    assert thicken_upper_bound({5, 6}, IntervalUnion(100, ((4, 4),)), 4, 4) == (6, 12.0, True)


@given(st.integers(50, 2000), st.integers(1, 8), st.integers(2, 30), st.integers(1, 30), st.integers(0, 10**6))
def test_thickening_bound(q, count, length, N2, seed):
    if count * (length + 1) > q:
        return
    A = random_interval_union(q, count, length, seed)
    rng = np.random.default_rng(seed)
    C = rng.choice(A.elements(), size=min(A.size, 5), replace=False)
    _, _, ok = thicken_upper_bound(C, A, length, N2)
    assert ok


def test_classify_good():
    g = classify_good(IntervalUnion(101, ((10, 20), (50, 20))), 5)
    assert len(g.bad.intervals) == 0 and len(g.good.intervals) == 2
    g = classify_good(IntervalUnion(101, ((10, 20),)), 5, A_inv=[])
    assert g.bad.intervals == ((10, 20),)
    with pytest.raises(DomainError):
        classify_good(IntervalUnion(101, ((10, 20),)), 0)


def test_equidistributed_examples():
    assert equidistributed_interval(range(2, 101, 2), 100, 2) == (1, 100)
    assert equidistributed_interval([1, 2, 3, 4, 50], 100, 2) == (1, 4)
    with pytest.raises(DomainError):
        equidistributed_interval([], 10, 2)
    with pytest.raises(DomainError):
        equidistributed_interval([11], 10, 2)


@given(st.integers(4, 400), st.integers(2, 6), st.data())
def test_equidistributed_output_passes_definition(N, k, data):
    A = sorted(data.draw(st.sets(st.integers(1, N), min_size=1)))
    lo, hi = equidistributed_interval(A, N, k)
    ind = np.zeros(N, dtype=np.int64)
    ind[np.array(A) - 1] = 1
    prefix = np.concatenate(([0], np.cumsum(ind)))
    delta = len(A) / N
    assert is_k_equidistributed(prefix, lo - 1, hi, k, delta)
    assert hi - lo + 1 >= equidistributed_length_bound(N, k, delta)


def test_statistics_at_desk_scale():
    q = 99991
    A = random_interval_union(q, 100, 300, 2024)
    r = intersect_inverse(A, A, q, seed=2024)
    assert r.rel_dev <= 0.2
