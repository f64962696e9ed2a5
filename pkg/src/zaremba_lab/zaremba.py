"""Numerators with bounded partial quotients for a fixed denominator.

The search walks the tree of digit strings ``c_1, c_2, ...`` with
``c_j <= M`` while tracking the continuants ``K(c_1..c_l)`` and the
convergent numerators.  A string closes when a final digit
``c = (q - K(c_1..c_{l-1})) / K(c_1..c_l)`` is an integer in ``[2, M]``;
its numerator is then coprime to ``q`` automatically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np
from sympy import totient

from . import _kernels
from .cantor import hensley_w
from .cf_core import raw_digits
from .errors import DomainError

__all__ = [
    "SearchResult",
    "LarcherRow",
    "iter_numerators",
    "find_numerators",
    "find_numerators_brute",
    "exists_zaremba",
    "count_numerators",
    "min_sum",
    "min_sum_brute",
    "min_sum_table",
    "larcher_report",
    "moser_envelope",
]


@dataclass(frozen=True)
class SearchResult:
    q: int
    M: int
    numerators: tuple[int, ...]
    predicted_scale: float

    @property
    def count(self) -> int:
        return len(self.numerators)


@dataclass(frozen=True)
class LarcherRow:
    q: int
    a: int
    min_S: int
    per_log: float
    per_log_sqrtloglog: Optional[float]
    totient_scaled: Optional[float]


def _check(q: int, M: int) -> None:
    if q < 2:
        raise DomainError(f"q must be >= 2, got {q}")
    if M < 2:
        raise DomainError(f"M must be >= 2, got {M}")


def iter_numerators(q: int, M: int) -> Iterator[int]:
    """Numerators in depth-first digit order (``c = 1, 2, ..., M`` at each level)."""
    _check(q, M)
    # state: K(P), K(P^-), p(P), p(P^-)
    stack = [(1, 0, 0, 1)]
    while stack:
        k, km, p, pm = stack.pop()
        r = q - km
        if r % k == 0 and 2 <= r // k <= M:
            c = r // k
            yield c * p + pm
        children = []
        for c in range(1, M + 1):
            nk = c * k + km
            # a closing digit >= 2 after nk needs 2 nk + k <= q
            if 2 * nk + k > q:
                break
            children.append((nk, k, c * p + pm, p))
        stack.extend(reversed(children))


def find_numerators(q: int, M: int) -> SearchResult:
    _check(q, M)
    nums = tuple(sorted(int(a) for a in _kernels.dfs_numerators(q, M)))
    return SearchResult(q, M, nums, q ** (2 * hensley_w(M) - 1))


def find_numerators_brute(q: int, M: int) -> tuple[int, ...]:
    """Oracle: scan every ``a`` and expand."""
    _check(q, M)
    return tuple(int(a) for a in np.nonzero(_kernels.bounded_numerators_mask(q, M))[0])


def exists_zaremba(q: int, M: int) -> Optional[int]:
    """First numerator met by the depth-first search, or ``None``."""
    return next(iter_numerators(q, M), None)


def count_numerators(q: int, M: int) -> tuple[int, float]:
    """Number of admissible numerators and its ratio to ``q^{2 w_M - 1}``."""
    res = find_numerators(q, M)
    return res.count, res.count / res.predicted_scale


_FIB = [0, 1]
while len(_FIB) < 200:
    _FIB.append(_FIB[-1] + _FIB[-2])


def _min_completion(r: int) -> int:
    """Smallest digit sum ``sigma`` of a tail that can multiply a continuant
    by ``r``: any tail with sum ``sigma`` has continuant at most ``F_{sigma+1}``."""
    s = 0
    while _FIB[s + 1] < r:
        s += 1
    return s


def min_sum(q: int, method: str = "scan") -> tuple[int, int]:
    """``(a, S(a))`` minimising the digit sum over ``a`` coprime to ``q``;
    the smallest ``a`` wins ties.

    ``method="scan"`` runs a compiled full scan with early abort;
    ``method="bnb"`` runs a branch-and-bound over the digit tree using the
    Fibonacci bound on continuant growth.
    """
    if q < 2:
        raise DomainError(f"q must be >= 2, got {q}")
    if method == "scan":
        a, s = _kernels.min_sum_scan(q)
        return int(a), int(s)
    if method != "bnb":
        raise DomainError(f"unknown method {method!r}")
    best_s, best_a = q, 1  # a = 1 always works with S = q
    stack = [(1, 0, 0, 1, 0)]
    while stack:
        k, km, p, pm, S = stack.pop()
        r = q - km
        if r % k == 0 and r // k >= 2:
            c = r // k
            a = c * p + pm
            if S + c < best_s or (S + c == best_s and a < best_a):
                best_s, best_a = S + c, a
        children = []
        c = 1
        while True:
            nk = c * k + km
            if 2 * nk + k > q:
                break
            nS = S + c
            if nS + 2 > best_s:
                break
            # the tail after nk must lift the continuant to q
            if nS + _min_completion(-(-q // (nk + k))) <= best_s:
                children.append((nk, k, c * p + pm, p, nS))
            c += 1
        stack.extend(reversed(children))
    return best_a, best_s


def min_sum_brute(q: int) -> tuple[int, int]:
    best = None
    for a in range(1, q):
        if math.gcd(a, q) == 1:
            s = sum(raw_digits(a, q))
            if best is None or s < best[1]:
                best = (a, s)
    return best


def min_sum_table(q_lo: int, q_hi: int) -> np.ndarray:
    """Rows ``(q, a, S)`` for every ``q`` in ``[q_lo, q_hi]``."""
    if q_lo < 2 or q_hi < q_lo:
        raise DomainError(f"bad range [{q_lo}, {q_hi}]")
    return _kernels.min_sum_table(q_lo, q_hi)


def moser_envelope(q: int, M: int = 5) -> int:
    """``M (ceil(log q / log phi) + 2)``: a digit-sum cap for any ``a`` with all
    digits ``<= M``, since such an expansion has at most that many digits."""
    phi = (1 + math.sqrt(5)) / 2
    return M * (math.ceil(math.log(q) / math.log(phi)) + 2)


def larcher_report(qs: Iterable[int]) -> list[LarcherRow]:
    """Empirical columns comparing ``min S(a)`` with logarithmic envelopes.

    Columns needing ``log log q > 0`` are ``None`` for ``q <= e``.
    """
    qs = list(qs)
    rows = []
    for q in qs:
        a, s = min_sum(q)
        lq = math.log(q)
        llq = math.log(lq) if lq > 1 else None
        rows.append(
            LarcherRow(
                q, a, s, s / lq,
                None if llq is None else s / (lq * math.sqrt(llq)),
                None if llq is None else s * int(totient(q)) / (q * lq * llq),
            )
        )
    return rows
