import itertools
import json
import math
import random

import pytest
from hypothesis import given, strategies as st

from zaremba_lab.errors import CapacityError, DomainError
from zaremba_lab.independence import (
    ContinuantPair,
    Instance,
    convergent_pairs,
    cross_ratio_check,
    default_k2_harvest,
    dirichlet_box,
    distance_bounds_check,
    harvest,
    k2_window,
    linear_problem_R,
    read_corpus,
    repulsion_C,
    repulsion_dependent,
    test_independence as independence_test,
    triple_uniqueness,
    wedge_d,
    write_corpus,
)

pairs = st.lists(st.integers(1, 6), min_size=1, max_size=10).map(ContinuantPair.from_digits)


def test_continuant_pair():
    X = ContinuantPair.from_digits((2, 3))
    assert (X.x, X.x_hat) == (7, 3)
    assert ContinuantPair.from_digits(()).x == 1
    with pytest.raises(DomainError):
        ContinuantPair.from_digits((0, 2))


@given(pairs)
def test_pair_invariants(X):
    assert math.gcd(X.x, X.x_hat) == 1
    assert 0 < X.x_hat <= X.x


def test_wedge_examples():
    X = ContinuantPair.from_digits((2, 3))
    Y = ContinuantPair.from_digits((2, 2))
    assert wedge_d(X, Y) == -1
    assert wedge_d(X, X) == 0


def test_consecutive_convergents_have_unit_wedge():
    for q in range(2, 300):
        for a in range(1, q):
            if math.gcd(a, q) == 1:
                ps = convergent_pairs(a, q)
                assert all(abs(wedge_d(u, v)) == 1 for u, v in zip(ps, ps[1:]))


@given(pairs, pairs, pairs, pairs)
def test_cross_ratio_identities(X, Y, Z, W):
    assert cross_ratio_check(X, Y, Z, W) == (True, True, True)
    assert cross_ratio_check(X, Y, X, W) == (True, True, True)


def test_cross_ratio_identities_random_batch():
    rng = random.Random(5)
    for _ in range(10**4):
        P = [ContinuantPair.from_digits([rng.randint(1, 6) for _ in range(rng.randint(1, 10))]) for _ in range(4)]
        assert all(cross_ratio_check(*P))


def test_independence_examples():
    assert independence_test((1, 1), (1, 1), 10**6).relation == (1, -1)
    assert independence_test((2, 3), (3, 2), 10**6).relation == (3, -2)
    assert independence_test((2, 3), (2, 1), 10**6).independent
    # a modular relation that is not an integer one: 3 * 4 = 12 = -1 (mod 13)
    assert independence_test((4, 1), (3, 1), 13).relation == (3, 1)
    with pytest.raises(CapacityError):
        independence_test((1, 2, 3), (1000, 1000, 1000), 10**6)
    with pytest.raises(DomainError):
        independence_test((1, 2), (1,), 10)


@given(st.integers(2, 10**4), st.lists(st.integers(1, 10**4), min_size=2, max_size=3), st.data())
def test_independence_against_brute_force(q, xs, data):
    C = tuple(data.draw(st.integers(0, 4)) for _ in xs)
    cert = independence_test(xs, C, q)
    box = [v for v in itertools.product(*[range(-c, c + 1) for c in C])
           if any(v) and sum(a * x for a, x in zip(v, xs)) % q == 0]
    if cert.independent:
        assert not box
    else:
        rel = cert.relation
        assert rel in box
        lead = next(v for v in rel if v)
        assert lead > 0
        canonical = [v for v in box if next(c for c in v if c) > 0]
        assert rel == min(canonical)


def test_dirichlet_examples():
    out = dirichlet_box((1, 1), (1, 1), 2, 10**6)
    assert out.m == (1, -1) and out.value == 0 and out.case == "I"
    out = dirichlet_box((10, 13), (13, 13), 3, 10**6)
    assert out.R == pytest.approx((34.6667, 34.6667), abs=1e-3)
    assert out.case == "I" and 10 * out.m[0] + 13 * out.m[1] == 0


def test_dirichlet_preconditions():
    with pytest.raises(DomainError, match="8k"):
        dirichlet_box((10, 13), (13, 13), 1, 100)
    with pytest.raises(DomainError, match="R_j < 1"):
        dirichlet_box((1, 1), (1, 1), 10, 10**6)
    with pytest.raises(DomainError, match="exceeds"):
        dirichlet_box((20, 13), (13, 13), 3, 10**6)
    with pytest.raises(DomainError):
        dirichlet_box((1, 1), (1, 1), 0.5, 10**6)


@given(st.sampled_from([2, 3]), st.integers(10**5, 10**7), st.integers(4, 60), st.floats(1, 20), st.data())
def test_dirichlet_postcondition(k, q, X, T, data):
    xs = [data.draw(st.integers(-X, X)) % q for _ in range(k)]
    try:
        out = dirichlet_box(xs, [X] * k, T, q)
    except (DomainError, CapacityError):
        return
    signed = [x - q if 2 * x > q else x for x in xs]
    s = sum(m * x for m, x in zip(out.m, signed))
    assert any(out.m)
    assert all(abs(m) <= 2 * r for m, r in zip(out.m, out.R))
    assert s == out.value and (s == 0 or 0 < abs(s) <= T)


def test_R_and_C_formulas():
    assert linear_problem_R((13, 13), 3) == pytest.approx((8 * 169 / 3 / 13,) * 2)
    assert repulsion_C((12, 12), 36.0) == pytest.approx((2 * 8 * 144 / 36 / 12,) * 2)
    with pytest.raises(DomainError):
        linear_problem_R((3,), 1)


def test_repulsion_dependent_example():
    t = 36.008228571715144
    r = repulsion_dependent(1065, 1459, (7, 11), (12, 12), 2, t)
    assert r.holds and r.m == (-3, 2) and r.combination == 1 and r.residue == -394
    # negative control: a = 1 lies outside Z_M(t)
    with pytest.raises(DomainError):
        repulsion_dependent(1, 1459, (7, 11), (12, 12), 2, t)
    neg = repulsion_dependent(1, 1459, (7, 11), (12, 12), 2, t, require_member=False)
    assert not neg.holds


def test_repulsion_dependent_vacuous_threshold():
    # q / (4 M t) <= 1: any nonzero residue clears it
    q, M, t = 1459, 60, 36.008228571715144
    r = repulsion_dependent(1065, q, (7, 11), (12, 12), M, t)
    assert r.threshold <= 1 and r.holds


def test_triple_uniqueness():
    q = 10**6
    assert triple_uniqueness((1000, 2000, 3000), (1, 1, -1), (-1, -1, 1), (1, 1, 1), (1, 1, 1), 600, 2, q)
    assert triple_uniqueness((1000, 2000, 3000), (1, 1, -1), (1, 1, -1), (1, 1, 1), (1, 1, 1), 600, 2, q)
    # x = y admits two unrelated relations, but only with bounds the statement excludes
    with pytest.raises(DomainError):
        triple_uniqueness((5, 5, 7), (1, -1, 0), (7, 0, -5), (10, 10, 10), (10, 10, 10), 600, 2, q)
    with pytest.raises(DomainError, match="not a relation"):
        triple_uniqueness((1000, 2000, 3001), (1, 1, -1), (1, 1, -1), (1, 1, 1), (1, 1, 1), 600, 2, q)
    with pytest.raises(DomainError, match="primitive"):
        triple_uniqueness((1000, 2000, 3000), (2, 2, -2), (1, 1, -1), (2, 2, 2), (1, 1, 1), 600, 2, q)


def test_distance_bounds_on_consecutive_convergents():
    ps = convergent_pairs(34, 89)
    r = distance_bounds_check(34, 34, 89, ps[3], ps[4], 2, 4)
    assert r.d == 1
    assert r.distance.status == "HOLDS"
    assert r.distance.lhs == pytest.approx(1 / 104)
    assert r.lower.status == r.upper.status == "NOT-APPLICABLE"


def test_distance_bounds_not_applicable_without_shared_prefix():
    X = ContinuantPair.from_digits((2, 3))
    Y = ContinuantPair.from_digits((3, 2))
    r = distance_bounds_check(3, 2, 7, X, Y, 2, 2)
    assert {r.distance.status, r.lower.status, r.upper.status} == {"NOT-APPLICABLE"}


@pytest.fixture(scope="module")
def corpus():
    return default_k2_harvest()


def test_harvest_is_deterministic(corpus):
    assert len(corpus) == 1678
    assert corpus[0] == Instance(1459, 2, 36.008228571715144, 1065, (1, 2, 1, 2, 2, 1), 37, 27, (1, 2, 1, 2, 2))


def test_harvested_instances_are_consistent(corpus):
    for ins in corpus[::7]:
        X = ContinuantPair.from_digits(ins.digits)
        assert (X.x, X.x_hat) == (ins.x, ins.x_hat)
        assert ins.t < ins.x < ins.q / ins.t
        assert ins.digits[: len(ins.node)] == ins.node or ins.digits[: len(ins.node) - 1] == ins.node[:-1]


def test_harvested_pairs_are_independent(corpus):
    groups = {}
    for ins in corpus:
        groups.setdefault((ins.q, ins.M, ins.node), set()).add(ins.x)
    n = 0
    for (q, M, _), xs in groups.items():
        N = math.floor(q / k2_window(q, M)[1] ** 2)
        for x1, x2 in itertools.combinations(sorted(xs), 2):
            n += 1
            assert independence_test((x1, x2), (1, 1), q).independent
            assert math.gcd(x1, x2) < 4 * (M + 2) ** 2 * max(N, 1) ** 2
    assert n == 55


def test_distance_bounds_on_harvested_pairs(corpus):
    by_node = {}
    for ins in corpus:
        by_node.setdefault((ins.q, ins.M, ins.node), []).append(ins)
    for group in by_node.values():
        for A, B in itertools.combinations(group, 2):
            if A.a == B.a:
                continue
            X, Y = ContinuantPair.from_digits(A.digits), ContinuantPair.from_digits(B.digits)
            l = next((j + 1 for j, (u, v) in enumerate(zip(X.digits, Y.digits)) if u != v), min(len(X.digits), len(Y.digits)))
            assert distance_bounds_check(A.a, B.a, A.q, X, Y, 2, l).ok


def test_corpus_roundtrip(tmp_path, corpus):
    path = tmp_path / "corpus.jsonl"
    write_corpus(corpus[:20], path)
    assert read_corpus(path) == corpus[:20]
    first = json.loads(path.read_text().splitlines()[0])
    assert {"q", "M", "t", "a", "digits", "x", "x_hat"} <= set(first)


def test_harvest_skips_large_t():
    assert harvest([101], 2, lambda q: 11.0) == []
