"""Cantor-type sets of fractions with bounded partial quotients.

Two families are handled here.

``Q_M(t)``
    reduced fractions ``u/v = [0; c_1, ..., c_s]`` with every ``c_j <= M`` and
    ``v < t``.  Its *boundary* consists of nodes with ``K(c_1..c_s, 1) >= t``.

``Z_M(t)``
    numerators ``a`` in ``[1, q)`` whose expansion of ``a/q`` has ``c_j <= M``
    at every position where the expansion is still "short", i.e. where
    ``K(c_1..c_{j-1}, 1) < t``, and which reach ``K(c_1..c_s, 1) >= t``.
    A rational has two expansions (``[..., c]`` and ``[..., c - 1, 1]``); it
    belongs to the set when either one passes.  With this reading ``Z_M(t)``
    is exactly the set of lattice points ``a/q`` in a finite union of closed
    real intervals, which :func:`decompose_ZM` exploits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .cf_core import DigitSeq, continuant, evaluate, raw_digits
from .errors import DomainError, FitError, ValidationError

__all__ = [
    "FractionNode",
    "IntervalUnion",
    "DimensionEstimate",
    "ADReport",
    "enumerate_QM",
    "count_QM",
    "boundary_QMbar",
    "interval_J",
    "real_pieces",
    "decompose_ZM",
    "membership_ZM",
    "membership_mask",
    "ad_check",
    "hensley_w",
    "estimate_dimension",
]


@dataclass(frozen=True)
class FractionNode:
    digits: DigitSeq
    u: int
    v: int
    v_ext: int

    @classmethod
    def from_digits(cls, ds: Sequence[int]) -> "FractionNode":
        d = DigitSeq(tuple(ds))
        r = evaluate(d)
        return cls(d, r.num, r.den, continuant(tuple(ds) + (1,)))

    def as_fraction(self) -> Fraction:
        return Fraction(self.u, self.v)


@dataclass(frozen=True)
class IntervalUnion:
    """Disjoint sorted runs ``[start, start + length)`` of residues mod ``q``."""

    q: int
    intervals: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        ivs = tuple((int(s), int(n)) for s, n in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        end = None
        for s, n in ivs:
            if n <= 0:
                raise ValidationError(f"empty interval at {s}")
            if end is not None and s < end:
                raise ValidationError("intervals must be sorted and disjoint")
            end = s + n
        if end is not None and end > ivs[0][0] + self.q:
            raise ValidationError("intervals exceed the modulus")

    @classmethod
    def from_elements(cls, q: int, elements: Iterable[int]) -> "IntervalUnion":
        xs = sorted(set(int(e) for e in elements))
        runs: list[list[int]] = []
        for x in xs:
            if runs and runs[-1][0] + runs[-1][1] == x:
                runs[-1][1] += 1
            else:
                runs.append([x, 1])
        return cls(q, tuple((s, n) for s, n in runs))

    @classmethod
    def from_mask(cls, q: int, mask: np.ndarray) -> "IntervalUnion":
        m = np.asarray(mask, dtype=bool).astype(np.int8)
        d = np.diff(np.concatenate(([0], m, [0])))
        starts = np.nonzero(d == 1)[0]
        ends = np.nonzero(d == -1)[0]
        return cls(q, tuple(zip(starts.tolist(), (ends - starts).tolist())))

    def __len__(self) -> int:
        return sum(n for _, n in self.intervals)

    @property
    def size(self) -> int:
        return len(self)

    @property
    def lengths(self) -> list[int]:
        return [n for _, n in self.intervals]

    def elements(self) -> np.ndarray:
        if not self.intervals:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([np.arange(s, s + n, dtype=np.int64) for s, n in self.intervals])

    def mask(self) -> np.ndarray:
        """Boolean indicator over residues ``0..q-1`` (wrapping mod q)."""
        out = np.zeros(self.q, dtype=bool)
        out[self.elements() % self.q] = True
        return out

    def __contains__(self, x: int) -> bool:
        return any(s <= x < s + n for s, n in self.intervals)

    def to_json(self) -> str:
        return json.dumps({"q": self.q, "intervals": [list(iv) for iv in self.intervals]})

    @classmethod
    def from_json(cls, text: str) -> "IntervalUnion":
        d = json.loads(text)
        return cls(d["q"], tuple(tuple(iv) for iv in d["intervals"]))


@dataclass(frozen=True)
class DimensionEstimate:
    M: int
    samples: tuple[tuple[float, int], ...]
    slope: float
    w_fit: float
    w_hensley: float

    @property
    def error(self) -> float:
        return abs(self.w_fit - self.w_hensley)


@dataclass(frozen=True)
class ADReport:
    w: float
    N: int
    C1_hat: float
    C2_inv_hat: Optional[float]
    upper_witness: tuple[int, int]
    n_upper_tests: int
    n_lower_tests: int
    per_scale: dict = field(default_factory=dict)


def _check_M(M: int) -> None:
    if M < 2:
        raise DomainError(f"M must be >= 2, got {M}")


def _dfs_nodes(M: int, t: float):
    """Yield digit tuples with entries <= M and continuant < t (any last digit)."""
    stack = [((), 1, 0)]
    while stack:
        ds, k, km = stack.pop()
        children = []
        for c in range(1, M + 1):
            v = c * k + km
            if v >= t:
                break
            children.append((ds + (c,), v, k))
        for ch in reversed(children):
            yield ch
            stack.append(ch)


def enumerate_QM(M: int, t: float) -> list[FractionNode]:
    """All reduced ``u/v`` in (0, 1) with digits ``<= M`` and ``v < t``.

    The zero fraction (empty expansion) is excluded.  Output is sorted by value.
    """
    _check_M(M)
    out = []
    for ds, v, vm in _dfs_nodes(M, t):
        if ds[-1] >= 2:
            out.append(FractionNode.from_digits(ds))
    out.sort(key=lambda n: Fraction(n.u, n.v))
    return out


def count_QM(M: int, t: float) -> int:
    """``|Q_M(t)|`` without materialising the nodes."""
    _check_M(M)
    n = 0
    stack = [(1, 0)]
    while stack:
        k, km = stack.pop()
        for c in range(1, M + 1):
            v = c * k + km
            if v >= t:
                break
            if c >= 2:
                n += 1
            stack.append((v, k))
    return n


def boundary_QMbar(M: int, t: float) -> list[FractionNode]:
    """Nodes of ``Q_M(t)`` whose extension ``K(c_1..c_s, 1)`` reaches ``t``."""
    return [n for n in enumerate_QM(M, t) if n.v_ext >= t]


def interval_J(node: FractionNode, M: int, q: Optional[int] = None):
    """The closed interval between ``[0; r_1..r_{l-1}, M+1]`` and
    ``[0; r_1..r_{l-1}, r_l - 1, M+1]``.

    Returns ``(lo, hi)`` as fractions, or, when ``q`` is given, the integer
    range ``(first, last)`` of numerators ``b`` with ``b/q`` inside it.
    """
    ds = node.digits.digits
    if not ds or ds[-1] < 2:
        raise ValidationError(f"node digits must end with r_l >= 2, got {ds}")
    head = ds[:-1]
    e1 = evaluate(head + (M + 1,))
    e2 = evaluate(head + (ds[-1] - 1, M + 1))
    f1, f2 = Fraction(e1.num, e1.den), Fraction(e2.num, e2.den)
    lo, hi = min(f1, f2), max(f1, f2)
    if q is None:
        return lo, hi
    return -((-lo.numerator * q) // lo.denominator), (hi.numerator * q) // hi.denominator


def real_pieces(M: int, t: float) -> list[tuple[Fraction, Fraction]]:
    """Closed real intervals whose union, intersected with ``(0, 1)``, is the
    real counterpart of ``Z_M(t)``.

    Depth-first over prefixes ``P`` with ``K(P, 1) < t``: the next digit must
    be ``<= M``; digits ``c`` with ``K(P, c, 1) >= t`` leave the tail free and
    together contribute one interval from ``[0; P, c_0]`` to ``[0; P, M+1]``;
    smaller digits are explored recursively.
    """
    _check_M(M)
    out: list[tuple[Fraction, Fraction]] = []
    # state: K(P), K(P^-), numerator p(P), p(P^-)
    stack = [(1, 0, 0, 1)]
    while stack:
        k, km, p, pm = stack.pop()
        # smallest c with (c + 1) k + km >= t
        c0 = max(1, math.ceil((t - km) / k) - 1)
        while c0 > 1 and c0 * k + km >= t:
            c0 -= 1
        while (c0 + 1) * k + km < t:
            c0 += 1
        if c0 <= M:
            e1 = Fraction(c0 * p + pm, c0 * k + km)
            e2 = Fraction((M + 1) * p + pm, (M + 1) * k + km)
            out.append((min(e1, e2), max(e1, e2)))
        for c in range(min(c0 - 1, M), 0, -1):
            stack.append((c * k + km, k, c * p + pm, p))
    out.sort()
    return out


def membership_ZM(a: int, q: int, M: int, t: float) -> bool:
    """Direct digit check of ``a`` in ``Z_M(t)`` (``a`` taken mod ``q``)."""
    if q < 2:
        raise DomainError(f"modulus must be >= 2, got {q}")
    a %= q
    ds = raw_digits(a, q)
    if not ds:
        return False

    def walk(seq):
        qm, qc = 0, 1
        for c in seq:
            if qc + qm < t and c > M:
                return False
            qm, qc = qc, c * qc + qm
        return qc + qm >= t

    return walk(ds) or walk(ds[:-1] + [ds[-1] - 1, 1])


def membership_mask(q: int, M: int, t: float) -> np.ndarray:
    """Boolean array over ``a = 0..q`` from the compiled digit walk."""
    return _kernels.membership_mask(int(q), int(M), float(t))


def decompose_ZM(q: int, M: int, t: float) -> IntervalUnion:
    """``Z_M(t)`` as a union of maximal runs of consecutive residues."""
    _check_M(M)
    if t > math.sqrt(q):
        raise DomainError(f"need t <= sqrt(q), got t={t}, q={q}")
    mask = np.zeros(q, dtype=bool)
    for lo, hi in real_pieces(M, t):
        first = max(1, -((-lo.numerator * q) // lo.denominator))
        last = min(q - 1, (hi.numerator * q) // hi.denominator)
        if first <= last:
            mask[first:last + 1] = True
    return IntervalUnion.from_mask(q, mask)


def ad_check(U: IntervalUnion, w: float, N: Optional[int] = None) -> ADReport:
    """Empirical Frostman and lower-regularity constants of ``U``.

    Upper side: dyadic windows of length ``N 2^k`` at stride ``len/4``,
    ``C1 = max |U cap I| / (|I|^w N^{1-w})``.  Lower side: windows of the same
    lengths centred at every element of ``U`` (a sample of at most 2000
    centres), ``C2^{-1} = min |U cap I| / (|I|^w N^{1-w})``.
    """
    if U.size == 0:
        raise DomainError("AD check needs a non-empty set")
    q = U.q
    if N is None:
        N = min(U.lengths)
    N = max(1, int(N))
    ind = U.mask().astype(np.int64)
    # cumulative over two periods handles windows wrapping around q
    cs = np.concatenate(([0], np.cumsum(np.concatenate((ind, ind)))))
    C1 = 0.0
    wit = (0, 0)
    n_up = 0
    C2 = None
    n_lo = 0
    per_scale = {}
    elems = U.elements() % q
    if elems.size > 2000:
        elems = elems[np.linspace(0, elems.size - 1, 2000).astype(np.int64)]
    L = N
    while L <= q:
        norm = L**w * N ** (1 - w)
        stride = max(1, L // 4)
        starts = np.arange(0, q, stride)
        counts = cs[starts + L] - cs[starts]
        i = int(np.argmax(counts))
        up = float(counts[i]) / norm
        n_up += starts.size
        if up > C1:
            C1, wit = up, (int(starts[i]), L)
        lo_val = None
        if L >= N:
            st = (elems - L // 2) % q
            cc = cs[st + L] - cs[st]
            lo_val = float(cc.min()) / norm
            n_lo += st.size
            C2 = lo_val if C2 is None else min(C2, lo_val)
        per_scale[int(L)] = {"upper": up, "lower": lo_val}
        L *= 2
    return ADReport(w, N, C1, C2, wit, n_up, n_lo, per_scale)


def hensley_w(M: int) -> float:
    """Two-term asymptotic for the dimension of bounded-quotient reals."""
    if M < 2:
        raise DomainError(f"M must be >= 2, got {M}")
    pi = math.pi
    return 1 - 6 / (pi**2 * M) - 72 * math.log(M) / (pi**4 * M**2)


def estimate_dimension(M: int, t_grid: Sequence[float], max_nodes: int = 10**7) -> DimensionEstimate:
    """Least-squares slope of ``log |Q_M(t)|`` against ``log t``, halved."""
    _check_M(M)
    ts = [float(t) for t in t_grid]
    if len(ts) < 4:
        raise FitError(f"need at least four grid points, got {len(ts)}")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise FitError("t_grid must be strictly increasing")
    counts = []
    for t in ts:
        c = count_QM(M, t)
        if c > max_nodes:
            raise FitError(f"|Q_{M}({t})| = {c} exceeds the node budget {max_nodes}")
        counts.append(c)
    if any(c <= 0 for c in counts) or any(b <= a for a, b in zip(counts, counts[1:])):
        raise FitError(f"counts must be positive and increasing, got {counts}")
    slope = float(np.polyfit(np.log(ts), np.log(counts), 1)[0])
    return DimensionEstimate(M, tuple(zip(ts, counts)), slope, slope / 2, hensley_w(M))
