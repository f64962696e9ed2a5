"""The hyperbola criterion for bounded partial quotients.

For coprime ``a, q`` consider the solutions of ``a x = y (mod q)`` with the
signed residue ``y`` in ``(-q/2, q/2]``.  Small partial quotients of ``a/q``
force every product ``x |y|`` to be large, and conversely:

* if ``x |y| >= q/M`` for every ``1 <= x < q`` then all ``c_j <= M``;
* if all ``c_j <= M`` then ``x |y| >= q/(M+2)`` for every ``1 <= x < q``.

This module exposes both directions together with the bookkeeping needed by
the independence module (critical denominators, repulsion, dyadic profiles).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from math import ceil, floor, gcd
from typing import Optional

import numpy as np
from sympy import isprime

from .cf_core import expand, max_quotient, raw_digits
from .errors import DomainError

__all__ = [
    "HyperbolaPoint",
    "CriticalDenominator",
    "Verdict",
    "BoundCertificate",
    "RepulsionResult",
    "ProductProfile",
    "signed_residue",
    "signed_residues",
    "convergent_denominators",
    "record_denominators",
    "min_product",
    "min_product_brute",
    "check_bounded",
    "critical_denominators",
    "critical_denominators_brute",
    "repulsion_check",
    "product_profile",
    "product_profile_brute",
    "rough_G",
]


@dataclass(frozen=True)
class HyperbolaPoint:
    """A solution ``(x, y)`` of ``a x = y (mod q)`` and its product ``x |y|``.

    ``gcd`` records ``gcd(a, q)`` when the caller passed a reducible pair.
    """

    x: int
    y: int
    product: int
    gcd: int = 1


class Verdict(str, enum.Enum):
    TRUE = "TRUE"
    FALSE = "FALSE"
    INCONCLUSIVE = "INCONCLUSIVE-BY-CRITERION"


@dataclass(frozen=True)
class BoundCertificate:
    """Outcome of :func:`check_bounded`.

    ``direct`` is the answer read off the expansion itself and is always
    filled in, so an inconclusive criterion still yields a definite result.
    """

    verdict: Verdict
    direct: bool
    M: int
    witness: HyperbolaPoint

    def __bool__(self) -> bool:
        return self.direct


@dataclass(frozen=True)
class CriticalDenominator:
    x: int
    residue: int
    level: int
    type_tag: str  # "I" if x <= sqrt(q), else "II"

    @property
    def product(self) -> int:
        return self.x * abs(self.residue)


@dataclass(frozen=True)
class RepulsionResult:
    holds: bool
    x_max: int
    witness: Optional[int] = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class ProductProfile:
    """Dyadic occupancy of convergent pairs ``(x, |ax|)``.

    ``cells`` maps ``(i, j)`` to True when some convergent denominator
    ``x`` in ``[t 2^i, t 2^{i+1}]`` has ``|ax|`` in ``[t 2^j, t 2^{j+1}]``.
    """

    t: float
    upper: float
    cells: dict[tuple[int, int], bool] = field(default_factory=dict)
    min_product: Optional[int] = None
    argmin: Optional[int] = None


def signed_residue(a: int, x: int, q: int) -> int:
    """Representative of ``a x mod q`` in ``(-q/2, q/2]``.

    >>> signed_residue(3, 5, 7)
    1
    """
    if q < 2:
        raise DomainError(f"modulus must be >= 2, got {q}")
    if not 1 <= x < q:
        raise DomainError(f"need 1 <= x < q, got x={x}, q={q}")
    r = (a * x) % q
    return r - q if 2 * r > q else r


def signed_residues(a: int, xs: np.ndarray, q: int) -> np.ndarray:
    """Vectorised :func:`signed_residue` (int64; requires ``a q < 2^62``)."""
    r = (np.int64(a % q) * np.asarray(xs, dtype=np.int64)) % q
    return np.where(2 * r > q, r - q, r)


def convergent_denominators(a: int, q: int) -> list[int]:
    """Distinct denominators ``q_0 = 1 <= q_1 < q_2 < ...`` of the reduced ``a/q``."""
    out: list[int] = [1]
    qm, qc = 0, 1
    for c in raw_digits(a % q, q):
        qm, qc = qc, c * qc + qm
        if not out or qc != out[-1]:
            out.append(qc)
    return out


def record_denominators(a: int, q: int) -> list[int]:
    """Scan oracle: all ``x`` in ``[1, q)`` whose ``|a x mod q|`` beats every
    smaller ``x``.  For reduced ``a/q`` these are the convergent denominators
    below ``q`` (best approximations)."""
    out = []
    best = q
    for x in range(1, q):
        r = abs(signed_residue(a, x, q))
        if r < best:
            best = r
            out.append(x)
    return out


def _require_window(q: int, lo: int, hi: int) -> None:
    if q < 2:
        raise DomainError(f"modulus must be >= 2, got {q}")
    if not 1 <= lo <= hi < q:
        raise DomainError(f"need 1 <= lo <= hi < q, got lo={lo}, hi={hi}, q={q}")


def min_product_brute(a: int, q: int, lo: int, hi: int) -> HyperbolaPoint:
    """Full scan over ``x`` in ``[lo, hi]``; smallest ``x`` wins ties."""
    _require_window(q, lo, hi)
    best = None
    for x in range(lo, hi + 1):
        y = signed_residue(a, x, q)
        pr = x * abs(y)
        if best is None or pr < best.product:
            best = HyperbolaPoint(x, y, pr, gcd(a, q))
    return best


def _scan_numpy(a: int, q: int, lo: int, hi: int) -> HyperbolaPoint:
    xs = np.arange(lo, hi + 1, dtype=np.int64)
    ys = signed_residues(a, xs, q)
    prod = xs * np.abs(ys)
    i = int(np.argmin(prod))
    return HyperbolaPoint(int(xs[i]), int(ys[i]), int(prod[i]), gcd(a, q))


def min_product(a: int, q: int, lo: int = 1, hi: Optional[int] = None) -> HyperbolaPoint:
    """Minimise ``x |a x mod q|`` over ``x`` in ``[lo, hi]``.

    With ``lo = 1`` and coprime input the smallest minimiser is a strict
    best approximation of ``a/q`` and hence a convergent denominator, so only
    convergent and neighbouring semiconvergent denominators are examined.
    Other windows, and reducible pairs, fall back to an exact vectorised scan.
    """
    if hi is None:
        hi = q - 1
    _require_window(q, lo, hi)
    g = gcd(a, q)
    if lo != 1 or g != 1 or a * q >= 2**62:
        if a * q >= 2**62:
            return min_product_brute(a, q, lo, hi)
        return _scan_numpy(a, q, lo, hi)
    digits = raw_digits(a % q, q)
    cands = set()
    qm, qc = 0, 1
    for c in digits:
        # semiconvergents k q_nu + q_{nu-1} for the extreme k, plus the convergent
        for k in (1, c - 1, c):
            if k >= 1:
                cands.add(k * qc + qm)
        qm, qc = qc, c * qc + qm
    cands.add(1)
    best = None
    for x in sorted(c for c in cands if lo <= c <= hi):
        y = signed_residue(a, x, q)
        pr = x * abs(y)
        if best is None or pr < best.product:
            best = HyperbolaPoint(x, y, pr, 1)
    return best


def check_bounded(a: int, q: int, M: int) -> BoundCertificate:
    """Decide ``M(a) <= M`` and report what the hyperbola criterion proves.

    * ``TRUE``: the minimal product is at least ``q/M``.
    * ``FALSE``: some product is below ``q/(M+2)`` (the witness).
    * ``INCONCLUSIVE``: the minimum sits in ``[q/(M+2), q/M)``.
    """
    if M < 1:
        raise DomainError(f"M must be positive, got {M}")
    if gcd(a, q) != 1:
        raise DomainError(f"need gcd(a, q) = 1, got a={a}, q={q}")
    w = min_product(a, q)
    direct = max_quotient(expand(a % q, q)) <= M
    if w.product * M >= q:
        verdict = Verdict.TRUE
    elif w.product * (M + 2) < q:
        verdict = Verdict.FALSE
    else:
        verdict = Verdict.INCONCLUSIVE
    return BoundCertificate(verdict, direct, M, w)


def _window(q: int, t: float) -> tuple[int, int]:
    """Integer range of ``x`` with ``t <= x <= q/t`` and ``x < q``."""
    if t < 1 or t > math.sqrt(q):
        raise DomainError(f"need 1 <= t <= sqrt(q), got t={t}, q={q}")
    lo = max(1, ceil(t))
    hi = min(q - 1, floor(q / t))
    return lo, hi


def _tag(x: int, q: int) -> str:
    return "I" if x * x <= q else "II"


def critical_denominators(a: int, q: int, t: float, M_tilde: int) -> list[CriticalDenominator]:
    """Convergent denominators ``x`` of ``a/q`` in ``[t, q/t]`` with
    ``M_tilde * x |a x| <= q``, sorted by ``x``.  ``x = q`` is excluded."""
    lo, hi = _window(q, t)
    out = []
    for x in convergent_denominators(a, q):
        if lo <= x <= hi:
            y = signed_residue(a, x, q)
            if M_tilde * x * abs(y) <= q:
                out.append(CriticalDenominator(x, y, M_tilde, _tag(x, q)))
    return out


def critical_denominators_brute(a: int, q: int, t: float, M_tilde: int) -> list[CriticalDenominator]:
    """Scan every ``x`` in the window and keep those with a small product and
    a reduced approximating fraction ``p/x`` (``p = (a x - y)/q``)."""
    lo, hi = _window(q, t)
    out = []
    for x in range(lo, hi + 1):
        y = signed_residue(a, x, q)
        if M_tilde * x * abs(y) <= q and gcd(x, (a * x - y) // q) == 1:
            out.append(CriticalDenominator(x, y, M_tilde, _tag(x, q)))
    return out


def repulsion_check(a: int, q: int, M: int, t: float) -> RepulsionResult:
    """Check ``|a x| >= t`` for every ``1 <= x <= q/(4 M t)`` (prime ``q``)."""
    if not isprime(q):
        raise DomainError(f"repulsion is stated for prime moduli, got q={q}")
    x_max = min(q - 1, floor(q / (4 * M * t)))
    if x_max < 1:
        return RepulsionResult(True, x_max)
    xs = np.arange(1, x_max + 1, dtype=np.int64)
    bad = np.nonzero(np.abs(signed_residues(a, xs, q)) < t)[0]
    if bad.size:
        return RepulsionResult(False, x_max, int(xs[bad[0]]))
    return RepulsionResult(True, x_max)


def _dyadic_levels(t: float, upper: float) -> list[float]:
    levels = []
    d = float(t)
    while d <= upper:
        levels.append(d)
        d *= 2
    return levels


def _profile_from(xs, a, q, t, upper) -> dict[tuple[int, int], bool]:
    levels = _dyadic_levels(t, upper)
    cells = {(i, j): False for i in range(len(levels)) for j in range(len(levels))}
    for x in xs:
        y = abs(signed_residue(a, x, q))
        for i, d1 in enumerate(levels):
            if d1 <= x <= 2 * d1:
                for j, d2 in enumerate(levels):
                    if d2 <= y <= 2 * d2:
                        cells[(i, j)] = True
    return cells


def product_profile(a: int, q: int, t: float, M: int) -> ProductProfile:
    """Dyadic histogram of convergent pairs ``(x, |a x|)`` inside
    ``[t, q/(4 M t)]`` and the minimal product over that window."""
    if gcd(a, q) != 1:
        raise DomainError(f"need gcd(a, q) = 1, got a={a}, q={q}")
    upper = q / (4 * M * t)
    xs = [x for x in convergent_denominators(a, q) if x < q]
    cells = _profile_from(xs, a, q, t, upper)
    lo, hi = max(1, ceil(t)), min(q - 1, floor(upper))
    mp = min_product(a, q, lo, hi) if lo <= hi else None
    return ProductProfile(
        t, upper, cells,
        None if mp is None else mp.product,
        None if mp is None else mp.x,
    )


def product_profile_brute(a: int, q: int, t: float, M: int) -> ProductProfile:
    """Same histogram with convergents found by the record scan."""
    upper = q / (4 * M * t)
    cells = _profile_from(record_denominators(a, q), a, q, t, upper)
    lo, hi = max(1, ceil(t)), min(q - 1, floor(upper))
    mp = min_product_brute(a, q, lo, hi) if lo <= hi else None
    return ProductProfile(
        t, upper, cells,
        None if mp is None else mp.product,
        None if mp is None else mp.x,
    )


def rough_G(N: float, M: int, c: float = 1.0) -> float:
    """Crude cap on partial quotients of elements surviving the dyadic
    pruning: ``max(N^c, 4 M)``."""
    return max(N**c, 4.0 * M)
