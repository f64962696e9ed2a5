import itertools
from math import gcd

import pytest
from hypothesis import given, strategies as st

from zaremba_lab.cf_core import (
    ConvergentTable,
    DigitSeq,
    Rational,
    canonicalize,
    continuant,
    convergents,
    evaluate,
    expand,
    inverse_digits,
    max_quotient,
    modular_inverse,
    raw_digits,
    sum_quotients,
)
from zaremba_lab.errors import DomainError, ValidationError


@st.composite
def coprime_pairs(draw, q_max=5000):
    q = draw(st.integers(2, q_max))
    a = draw(st.integers(1, q - 1).filter(lambda a: gcd(a, q) == 1))
    return a, q


digit_tuples = st.lists(st.integers(1, 9), min_size=0, max_size=12).map(tuple)


def test_expand_known_values():
    assert expand(5, 7).digits == (1, 2, 2)
    assert expand(7, 16).digits == (2, 3, 2)
    assert expand(1, 2).digits == (2,)
    assert expand(0, 9).digits == ()


def test_expand_reduces_first():
    assert expand(6, 14) == expand(3, 7)
    r = evaluate(expand(6, 14))
    assert (r.num, r.den) == (3, 7)


def test_expand_rejects_out_of_range():
    with pytest.raises(DomainError):
        expand(7, 7)
    with pytest.raises(DomainError):
        expand(-1, 7)
    with pytest.raises(DomainError):
        expand(1, 0)


def test_digitseq_validation():
    with pytest.raises(ValidationError):
        DigitSeq((2, 1))
    with pytest.raises(ValidationError):
        DigitSeq((0, 3))
    assert str(DigitSeq((1, 2, 2))) == "[0;1,2,2]"


def test_rational_fields():
    r = Rational(6, 14)
    assert not r.reduced
    assert r.as_reduced() == Rational(3, 7)
    with pytest.raises(DomainError):
        Rational(3, 0)


def test_continuant_small():
    assert continuant(()) == 1
    assert continuant((3,)) == 3
    assert continuant((2, 3)) == 7
    assert continuant((1, 2, 2)) == 7
    # Fibonacci growth with all-ones digits
    assert [continuant((1,) * n) for n in range(8)] == [1, 1, 2, 3, 5, 8, 13, 21]


def test_continuant_is_exact_past_64_bits():
    assert continuant((1,) * 100) == 573147844013817084101


def test_m_and_s_undefined_on_empty():
    with pytest.raises(DomainError):
        max_quotient(expand(0, 5))
    with pytest.raises(DomainError):
        sum_quotients(expand(0, 5))


def test_convergent_table_layout():
    t = convergents(expand(5, 7))
    assert t.p == (0, 1, 2, 5)
    assert t.q == (1, 1, 3, 7)
    assert t.check()
    assert not ConvergentTable((0, 1, 1), (1, 1, 3)).check()


def test_canonicalize_rewrites_trailing_one():
    assert canonicalize([2, 2, 1]).digits == (2, 3)
    assert canonicalize([3]).digits == (3,)
    with pytest.raises(ValidationError):
        canonicalize([1])


def test_inverse_digits_examples():
    # 5 * 3 = 15 = 1 (mod 7); 5/7 = [1,2,2] has odd length so the inverse is
    # the reversal [2,2,1] = [2,3] = 3/7
    inv = inverse_digits(expand(5, 7))
    assert inv.digits == (2, 3)
    assert evaluate(inv).num == 3
    # even length: 2/7 = [3,2], inverse 4/7 = [1,1,3]
    assert inverse_digits(expand(2, 7)).digits == expand(4, 7).digits
    with pytest.raises(DomainError):
        inverse_digits(expand(0, 7))


def test_modular_inverse():
    assert modular_inverse(5, 7) == 3
    with pytest.raises(DomainError):
        modular_inverse(4, 8)


@given(coprime_pairs())
def test_roundtrip(pair):
    a, q = pair
    r = evaluate(expand(a, q))
    assert (r.num, r.den) == (a, q)


@given(coprime_pairs())
def test_raw_digits_match_fraction_algorithm(pair):
    from fractions import Fraction

    a, q = pair
    x, ds = Fraction(a, q), []
    while x:
        c = int(1 / x)
        ds.append(c)
        x = 1 / x - c
    assert raw_digits(a, q) == ds


@given(coprime_pairs())
def test_determinant_identity(pair):
    t = convergents(expand(*pair))
    for nu in range(1, len(t)):
        assert t.p[nu] * t.q[nu - 1] - t.p[nu - 1] * t.q[nu] == (-1) ** (nu - 1)


@given(coprime_pairs())
def test_inverse_law(pair):
    a, q = pair
    inv = inverse_digits(expand(a, q))
    assert (evaluate(inv).num * a) % q == 1 % q
    assert inv == expand(pow(a, -1, q), q)


@given(coprime_pairs())
def test_inverse_is_reversal_of_some_expansion(pair):
    # a^{-1}/q is the reversal of either [c_1..c_s] or [c_1..c_s - 1, 1]
    a, q = pair
    ds = list(expand(a, q).digits)
    alt = ds[:-1] + [ds[-1] - 1, 1]
    target = expand(pow(a, -1, q), q)
    options = []
    for e in (ds, alt):
        rev = e[::-1]
        if rev != [1]:
            options.append(canonicalize(rev))
    assert target in options


@given(digit_tuples)
def test_continuant_symmetry_random(ds):
    assert continuant(ds) == continuant(ds[::-1])


def test_continuant_symmetry_exhaustive():
    for n in range(7):
        for ds in itertools.product(range(1, 6), repeat=n):
            assert continuant(ds) == continuant(ds[::-1])


def test_domino_identity_exhaustive():
    K = continuant
    for n in range(2, 8):
        for ds in itertools.product(range(1, 5), repeat=n):
            for m in range(1, n):
                assert K(ds) == K(ds[:m]) * K(ds[m:]) + K(ds[: m - 1]) * K(ds[m + 1:])


@given(st.lists(st.integers(1, 50), min_size=1, max_size=15))
def test_evaluate_accepts_plain_sequences(ds):
    ds = list(ds)
    if ds[-1] == 1:
        ds[-1] = 2
    r = evaluate(ds)
    assert expand(r.num, r.den).digits == tuple(ds)
    assert r.reduced
