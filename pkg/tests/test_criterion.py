from math import gcd

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zaremba_lab.cf_core import expand, max_quotient
from zaremba_lab.criterion import (
    HyperbolaPoint,
    Verdict,
    check_bounded,
    convergent_denominators,
    critical_denominators,
    critical_denominators_brute,
    min_product,
    min_product_brute,
    product_profile,
    product_profile_brute,
    record_denominators,
    repulsion_check,
    rough_G,
    signed_residue,
    signed_residues,
)
from zaremba_lab.errors import DomainError


@st.composite
def coprime_pairs(draw, q_min=2, q_max=3000):
    q = draw(st.integers(q_min, q_max))
    a = draw(st.integers(1, q - 1).filter(lambda a: gcd(a, q) == 1))
    return a, q


def test_signed_residue_ties_go_positive():
    assert signed_residue(1, 2, 4) == 2
    assert signed_residue(3, 2, 4) == 2
    assert signed_residue(3, 5, 7) == 1
    assert signed_residue(5, 1, 7) == -2


def test_signed_residue_rejects_bad_x():
    with pytest.raises(DomainError):
        signed_residue(1, 0, 7)
    with pytest.raises(DomainError):
        signed_residue(1, 7, 7)


@given(coprime_pairs())
def test_signed_residues_vectorised(pair):
    a, q = pair
    xs = np.arange(1, q)
    assert signed_residues(a, xs, q).tolist() == [signed_residue(a, int(x), q) for x in xs]


def test_min_product_known():
    assert min_product(5, 7) == HyperbolaPoint(1, -2, 2, 1)
    assert min_product(7, 16) == HyperbolaPoint(2, -2, 4, 1)


def test_min_product_reducible_pair_is_annotated():
    w = min_product(6, 14)
    assert w.gcd == 2 and w.product == 0 and w.x == 7


def test_min_product_window_errors():
    with pytest.raises(DomainError):
        min_product(3, 7, 0, 3)
    with pytest.raises(DomainError):
        min_product(3, 7, 4, 3)
    with pytest.raises(DomainError):
        min_product(3, 7, 1, 7)


def test_min_product_matches_scan_exhaustively():
    for q in range(2, 250):
        for a in range(1, q):
            if gcd(a, q) == 1:
                assert min_product(a, q).product == min_product_brute(a, q, 1, q - 1).product


@given(coprime_pairs(q_min=5), st.data())
def test_min_product_arbitrary_window(pair, data):
    a, q = pair
    lo = data.draw(st.integers(1, q - 1))
    hi = data.draw(st.integers(lo, q - 1))
    fast, slow = min_product(a, q, lo, hi), min_product_brute(a, q, lo, hi)
    assert (fast.x, fast.y, fast.product) == (slow.x, slow.y, slow.product)


@given(coprime_pairs())
def test_records_are_convergent_denominators(pair):
    a, q = pair
    assert record_denominators(a, q) == [x for x in convergent_denominators(a, q) if x < q]


def test_check_bounded_verdicts():
    c = check_bounded(5, 7, 2)
    assert c.verdict is Verdict.INCONCLUSIVE and c.direct and bool(c)
    c = check_bounded(7, 16, 3)
    assert c.verdict is Verdict.INCONCLUSIVE and c.direct
    c = check_bounded(1, 7, 2)
    assert c.verdict is Verdict.FALSE and not c.direct
    assert check_bounded(5, 7, 5).verdict is Verdict.TRUE
    with pytest.raises(DomainError):
        check_bounded(2, 4, 3)


@given(coprime_pairs(), st.integers(2, 10))
def test_verdicts_agree_with_digits(pair, M):
    a, q = pair
    c = check_bounded(a, q, M)
    direct = max_quotient(expand(a, q)) <= M
    assert c.direct == direct
    if c.verdict is Verdict.TRUE:
        assert direct
    if c.verdict is Verdict.FALSE:
        assert not direct


def test_criterion_both_directions_exhaustive():
    for q in range(2, 300):
        x = np.arange(1, q)
        for a in range(1, q):
            if gcd(a, q) != 1:
                continue
            r = (a * x) % q
            p = int((x * np.minimum(r, q - r)).min())
            mq = max_quotient(expand(a, q))
            for M in range(2, 11):
                if p * M >= q:
                    assert mq <= M
                if mq <= M:
                    assert p * (M + 2) >= q


def test_critical_denominators_small():
    got = critical_denominators(5, 7, 1, 2)
    assert [(c.x, c.residue, c.type_tag) for c in got] == [(1, -2, "I"), (3, 1, "II")]
    assert [c.product for c in got] == [2, 3]


def test_critical_window_errors():
    with pytest.raises(DomainError):
        critical_denominators(5, 7, 3, 2)  # t > sqrt(q)
    with pytest.raises(DomainError):
        critical_denominators(5, 7, 0.5, 2)


@given(coprime_pairs(q_min=4, q_max=800), st.sampled_from([0.2, 0.3, 0.4, 0.5]), st.integers(2, 4))
def test_critical_denominators_match_brute(pair, theta, Mt):
    a, q = pair
    t = max(1.0, q**theta)
    fast = critical_denominators(a, q, t, Mt)
    assert fast == critical_denominators_brute(a, q, t, Mt)
    for c in fast:
        assert t <= c.x <= q / t and Mt * c.product <= q


@given(coprime_pairs(q_min=4, q_max=800))
def test_critical_denominators_level_one_is_a_subset(pair):
    # with level 1 the all-x scan may also keep non-convergents (x = 3 for 1/4)
    a, q = pair
    t = max(1.0, q**0.2)
    fast = {c.x for c in critical_denominators(a, q, t, 1)}
    assert fast <= {c.x for c in critical_denominators_brute(a, q, t, 1)}


def test_critical_denominators_level_one_example():
    assert critical_denominators(1, 4, 1.3, 1) == []
    assert [c.x for c in critical_denominators_brute(1, 4, 1.3, 1)] == [3]


def test_repulsion_small():
    r = repulsion_check(2, 101, 2, 3)
    assert not r and r.x_max == 4 and r.witness == 1
    assert repulsion_check(2, 101, 2, 30).holds  # empty range is vacuous
    with pytest.raises(DomainError):
        repulsion_check(2, 100, 2, 3)


def test_product_profile_small():
    p = product_profile(34, 89, 2, 1)
    assert p.min_product == 39 and p.argmin == 3
    assert p.cells[(0, 2)] and not p.cells[(0, 0)]


@given(coprime_pairs(q_min=50, q_max=2000), st.integers(1, 3))
def test_product_profile_matches_brute(pair, M):
    a, q = pair
    t = q**0.25
    fast, slow = product_profile(a, q, t, M), product_profile_brute(a, q, t, M)
    assert fast.cells == slow.cells
    assert fast.min_product == slow.min_product


def test_rough_G():
    assert rough_G(2.0, 5) == 20.0
    assert rough_G(100.0, 1) == 100.0
