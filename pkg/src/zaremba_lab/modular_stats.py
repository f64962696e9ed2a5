"""Exhaustive counting statistics for sets of residues and their inverses.

Sets are accepted either as :class:`~zaremba_lab.cantor.IntervalUnion` or as
any iterable of residues; internally everything becomes a boolean mask over
``Z/qZ``.  Every randomised construction takes an explicit seed, which is
copied into the resulting :class:`StatReport`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np
from sympy import divisors, mobius, totient

from .cantor import IntervalUnion
from .errors import DomainError

__all__ = [
    "StatReport",
    "GoodPartition",
    "inverse_table",
    "as_mask",
    "random_interval_union",
    "count_T_action",
    "count_T_action_brute",
    "intersect_inverse",
    "intersect_inverse_brute",
    "sigma_star",
    "thicken",
    "thicken_upper_bound",
    "classify_good",
    "is_k_equidistributed",
    "equidistributed_interval",
    "equidistributed_length_bound",
]

ResidueSet = Union[IntervalUnion, Iterable[int], np.ndarray]


@dataclass(frozen=True)
class StatReport:
    op: str
    q: int
    observed: int
    predicted: float
    params: dict = field(default_factory=dict)
    seed: Optional[int] = None

    @property
    def abs_dev(self) -> float:
        return abs(self.observed - self.predicted)

    @property
    def rel_dev(self) -> float:
        return self.abs_dev / max(self.predicted, 1.0)

    def to_dict(self) -> dict:
        return {
            "op": self.op,
            "q": self.q,
            "params": self.params,
            "observed": self.observed,
            "predicted": self.predicted,
            "abs_dev": self.abs_dev,
            "rel_dev": self.rel_dev,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class GoodPartition:
    good: IntervalUnion
    bad: IntervalUnion
    theta: float
    N_star: int

    @property
    def bad_size(self) -> int:
        return self.bad.size


def inverse_table(q: int) -> np.ndarray:
    """``inv[u] = u^{-1} mod q`` for units, ``0`` otherwise (length ``q``)."""
    if q < 2:
        raise DomainError(f"q must be >= 2, got {q}")
    inv = np.zeros(q, dtype=np.int64)
    for u in range(1, q):
        if math.gcd(u, q) == 1:
            inv[u] = pow(u, -1, q)
    return inv


def as_mask(S: ResidueSet, q: int) -> np.ndarray:
    """Boolean indicator of ``S`` reduced mod ``q``."""
    if isinstance(S, IntervalUnion):
        if S.q != q:
            raise DomainError(f"set lives modulo {S.q}, expected {q}")
        return S.mask()
    if isinstance(S, np.ndarray) and S.dtype == bool:
        if S.shape != (q,):
            raise DomainError(f"mask has shape {S.shape}, expected ({q},)")
        return S.copy()
    arr = np.asarray(S if isinstance(S, np.ndarray) else list(S), dtype=np.int64)
    out = np.zeros(q, dtype=bool)
    if arr.size:
        out[arr % q] = True
    return out


def random_interval_union(q: int, count: int, length: int, seed: int) -> IntervalUnion:
    """``count`` pairwise separated intervals of ``length`` residues in ``[0, q)``."""
    free = q - count * (length + 1)
    if free < 0:
        raise DomainError("intervals do not fit")
    rng = np.random.default_rng(seed)
    pos = np.sort(rng.integers(0, free + 1, size=count))
    starts = pos + np.arange(count) * (length + 1)
    return IntervalUnion(q, tuple((int(s), length) for s in starts))


def count_T_action(A: ResidueSet, B: ResidueSet, N: int, q: int, seed: Optional[int] = None) -> StatReport:
    """Triples ``(a, b, c)`` in ``A x B x [1, N]`` with ``(a + 2c)(b + 2c) = 1``."""
    if q < 3:
        raise DomainError(f"q must be >= 3, got {q}")
    if N < 0 or N >= q:
        raise DomainError(f"need 0 <= N < q, got N={N}")
    am, bm = as_mask(A, q), as_mask(B, q)
    a_el = np.nonzero(am)[0]
    inv = inverse_table(q)
    unit = np.zeros(q, dtype=bool)
    unit[1:] = inv[1:] != 0
    total = 0
    for c in range(1, N + 1):
        u = (a_el + 2 * c) % q
        ok = unit[u]
        b = (inv[u[ok]] - 2 * c) % q
        total += int(bm[b].sum())
    pred = N * int(am.sum()) * int(bm.sum()) / q
    return StatReport("T_action", q, total, pred, {"N": N, "|A|": int(am.sum()), "|B|": int(bm.sum())}, seed)


def count_T_action_brute(A: Iterable[int], B: Iterable[int], N: int, q: int) -> int:
    Bs = set(b % q for b in B)
    n = 0
    for a in set(x % q for x in A):
        for b in Bs:
            for c in range(1, N + 1):
                if ((a + 2 * c) * (b + 2 * c)) % q == 1:
                    n += 1
    return n


def _partial_inverse(q: int) -> tuple[np.ndarray, np.ndarray]:
    """For every residue ``a`` with ``g = gcd(a, q) < q`` return the geometric
    partner ``g * (a/g)^{-1} mod q/g`` (its real point ``(a/g)^{-1}/(q/g)``
    scaled by ``q``) and the reduced modulus ``q/g``."""
    part = np.full(q, -1, dtype=np.int64)
    qred = np.zeros(q, dtype=np.int64)
    for a in range(1, q):
        g = math.gcd(a, q)
        qq = q // g
        if qq == 1:
            continue
        part[a] = g * pow(a // g, -1, qq) if qq > 1 else 0
        qred[a] = qq
    return part, qred


def intersect_inverse(A: ResidueSet, B: ResidueSet, q: int, seed: Optional[int] = None) -> StatReport:
    """``|A cap B^{-1}|``.

    For a unit ``a`` this asks whether ``a^{-1} in B``.  For ``g = gcd(a, q) > 1``
    the point ``(a/g)^{-1}/(q/g)`` is tested against ``B`` read as real points
    ``b/q``; this is the same as asking whether ``g (a/g)^{-1}`` lies in ``B``.
    A second count (``params['residue_lift']``) instead accepts ``a`` when some
    ``b in B`` is congruent to ``(a/g)^{-1}`` modulo ``q/g``.  The residue 0
    has no partner and is tallied in ``params['excluded']``.
    """
    am, bm = as_mask(A, q), as_mask(B, q)
    part, qred = _partial_inverse(q)
    geo = 0
    lift = 0
    excluded = int(am[0])
    for a in np.nonzero(am)[0]:
        a = int(a)
        if a == 0:
            continue
        p = int(part[a])
        if bm[p]:
            geo += 1
        qq = int(qred[a])
        if qq == q:
            lift += int(bm[p])
        else:
            r = p // (q // qq)  # (a/g)^{-1} mod q/g
            lift += int(bm[r::qq].any())
    pred = int(am.sum()) * int(bm.sum()) / q
    return StatReport(
        "intersect_inverse", q, geo, pred,
        {"|A|": int(am.sum()), "|B|": int(bm.sum()), "residue_lift": lift, "excluded": excluded},
        seed,
    )


def intersect_inverse_brute(A: Iterable[int], B: Iterable[int], q: int) -> int:
    """Double loop over ``A x B`` for the geometric convention."""
    Bs = set(b % q for b in B)
    n = 0
    for a in set(x % q for x in A):
        if a == 0:
            continue
        g = math.gcd(a, q)
        qq = q // g
        inv = pow(a // g, -1, qq) if qq > 1 else 0
        # real point inv/qq equals b/q  <=>  b = g * inv
        if any(b * qq == inv * q for b in Bs):
            n += 1
    return n


def sigma_star(A: ResidueSet, q: int) -> StatReport:
    """Units ``a in A`` with ``a^{-1} in A``, compared with ``|A|^2 phi(q)/q^2``.

    ``params['mobius_sum']`` holds ``sum_{g | q} mu(g) |A_g cap A^{-1}|`` where
    ``A_g`` keeps the multiples of ``g``; it must equal the direct count.
    """
    am = as_mask(A, q)
    inv = inverse_table(q)
    els = np.nonzero(am)[0]
    units = els[inv[els] != 0] if els.size else els
    direct = int(am[inv[units]].sum()) if units.size else 0
    mob = 0
    for g in divisors(q):
        mu = int(mobius(g))
        if mu == 0:
            continue
        Ag = [int(a) for a in els if a % g == 0]
        mob += mu * intersect_inverse(Ag, am, q).observed
    size = int(am.sum())
    pred = size * size * int(totient(q)) / (q * q)
    return StatReport("sigma_star", q, direct, pred, {"|A|": size, "mobius_sum": mob})


def thicken(C: ResidueSet, N2: int, q: int) -> tuple[np.ndarray, int]:
    """``C + [-floor(N2/2), floor(N2/2)]`` as a mask, with its size."""
    if N2 < 1:
        raise DomainError(f"N2 must be positive, got {N2}")
    cm = as_mask(C, q)
    if N2 >= q:
        out = np.ones(q, dtype=bool) if cm.any() else np.zeros(q, dtype=bool)
        return out, int(out.sum())
    h = N2 // 2
    out = np.zeros(q, dtype=bool)
    for s in range(-h, h + 1):
        out |= np.roll(cm, s)
    return out, int(out.sum())


def thicken_upper_bound(C: ResidueSet, A: IntervalUnion, N1: int, N2: int) -> tuple[int, float, bool]:
    """Check ``|C + [-N2/2, N2/2]| <= |A| (1 + 2 N2 / N1)`` for ``C`` inside ``A``,
    where every interval of ``A`` has at least ``N1`` elements."""
    _, size = thicken(C, N2, A.q)
    bound = A.size * (1 + 2 * N2 / N1)
    return size, bound, size <= bound


def classify_good(A: IntervalUnion, N_star: int, theta: float = 0.5, A_inv: Optional[ResidueSet] = None) -> GoodPartition:
    """Mark each interval of ``A`` good when at least a ``theta`` share of its
    consecutive length-``N_star`` blocks (the last one may be shorter) meets
    ``A^{-1}``.  ``A^{-1}`` defaults to the inverse image under the geometric
    convention of :func:`intersect_inverse`."""
    if N_star < 1:
        raise DomainError("N_star must be positive")
    if not 0 < theta <= 1:
        raise DomainError("theta must lie in (0, 1]")
    q = A.q
    if A_inv is None:
        part, _ = _partial_inverse(q)
        am = A.mask()
        # x is in A^{-1} when its geometric partner lies in A
        inv_mask = np.zeros(q, dtype=bool)
        has = part >= 0
        inv_mask[has] = am[part[has]]
    else:
        inv_mask = as_mask(A_inv, q)
    good, bad = [], []
    for s, n in A.intervals:
        idx = np.arange(s, s + n) % q
        blocks = [idx[i:i + N_star] for i in range(0, n, N_star)]
        hits = sum(bool(inv_mask[b].any()) for b in blocks)
        (good if hits >= theta * len(blocks) else bad).append((s, n))
    return GoodPartition(IntervalUnion(q, tuple(good)), IntervalUnion(q, tuple(bad)), theta, N_star)


def _split(lo: int, hi: int, k: int) -> list[tuple[int, int]]:
    """``[lo, hi)`` into ``k`` consecutive parts of sizes ``floor`` or ``ceil``."""
    n = hi - lo
    base, extra = divmod(n, k)
    out, s = [], lo
    for i in range(k):
        m = base + (1 if i < extra else 0)
        out.append((s, s + m))
        s += m
    return out


def is_k_equidistributed(prefix: np.ndarray, lo: int, hi: int, k: int, delta: float) -> bool:
    """Every part ``J_i`` of ``[lo, hi)`` has ``|A cap J_i| >= delta |J_i| / 2``."""
    for a, b in _split(lo, hi, k):
        if 2 * (prefix[b] - prefix[a]) < delta * (b - a):
            return False
    return True


def equidistributed_length_bound(N: int, k: int, delta: float) -> float:
    return N * math.exp(-4 * k * math.log(4 * k) * math.log(1 / delta))


def equidistributed_interval(A: Iterable[int], N: int, k: int) -> tuple[int, int]:
    """Descent for a ``k``-equidistributed interval of ``[1, N]``.

    While the current interval fails the test, move to its densest part
    (whose density exceeds the current one by a factor ``1 + 1/(4k)`` when the
    interval has at least ``2k`` points).  Returns ``(start, end)`` inclusive;
    the interval is equidistributed with respect to its own density, hence
    also with respect to the global density, which can only be smaller.
    """
    if k < 2:
        raise DomainError("k must be >= 2")
    ind = np.zeros(N, dtype=np.int64)
    for a in A:
        if not 1 <= a <= N:
            raise DomainError(f"element {a} outside [1, {N}]")
        ind[a - 1] = 1
    if ind.sum() == 0:
        raise DomainError("A must be non-empty")
    prefix = np.concatenate(([0], np.cumsum(ind)))
    lo, hi = 0, N
    while True:
        dens = (prefix[hi] - prefix[lo]) / (hi - lo)
        if is_k_equidistributed(prefix, lo, hi, k, dens):
            return lo + 1, hi
        parts = [(a, b) for a, b in _split(lo, hi, k) if b > a]
        lo, hi = max(parts, key=lambda ab: ((prefix[ab[1]] - prefix[ab[0]]) / (ab[1] - ab[0]), -ab[0]))
