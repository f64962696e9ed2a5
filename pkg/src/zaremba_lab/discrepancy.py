"""Lattice point sets ``X(a, q)`` and their exact star discrepancy.

Points carry integer numerators over a common denominator, so every count
and every box volume is an exact rational.  Star discrepancy here is the
supremum over anchored boxes ``[0, x] x [0, y]`` and ``[0, x) x [0, y)`` of
``|#(P in box)/n - x y|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from sympy import isprime, n_order

from . import _kernels
from .cf_core import expand, max_quotient, sum_quotients
from .errors import DomainError, ValidationError

__all__ = [
    "PointSet2D",
    "DiscrepancyReport",
    "LarcherSets",
    "KHReport",
    "KH_CATALOG",
    "lattice_points",
    "larcher_sequences",
    "star_discrepancy_exact",
    "star_discrepancy_grid",
    "star_discrepancy_1d",
    "lattice_star_discrepancy",
    "lattice_star_upper_bound",
    "extreme_discrepancy_exact",
    "zaremba_bound",
    "certify_zaremba_bound",
    "koksma_hlawka_demo",
]


@dataclass(frozen=True)
class PointSet2D:
    """Points ``(x_j/den, y_j/den)`` with integer numerators in ``[1, den]``."""

    x: tuple[int, ...]
    y: tuple[int, ...]
    den: int

    def __post_init__(self) -> None:
        if len(self.x) != len(self.y):
            raise ValidationError("coordinate lists differ in length")
        if self.den < 1:
            raise ValidationError("denominator must be positive")
        for v in self.x + self.y:
            if not 1 <= v <= self.den:
                raise ValidationError(f"coordinate {v}/{self.den} outside (0, 1]")

    @property
    def n(self) -> int:
        return len(self.x)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.x, dtype=np.int64), np.array(self.y, dtype=np.int64)

    def to_csv(self) -> str:
        lines = ["x_num,y_num,den"]
        lines += [f"{a},{b},{self.den}" for a, b in zip(self.x, self.y)]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class DiscrepancyReport:
    exact_value: Fraction
    witness_box: tuple[Fraction, Fraction, bool]  # (x, y, closed)
    zaremba_bound: Optional[float] = None
    larcher_bound: Optional[float] = None

    @property
    def value(self) -> float:
        return float(self.exact_value)


@dataclass(frozen=True)
class LarcherSets:
    one_d: tuple[int, ...]  # numerators over q
    lattice: PointSet2D
    exponential: PointSet2D
    q: int
    g: int


@dataclass(frozen=True)
class KHReport:
    f_id: str
    error: Fraction
    variation: int
    discrepancy: Fraction

    @property
    def holds(self) -> bool:
        return self.error <= self.variation * self.discrepancy


def lattice_points(a: int, q: int) -> PointSet2D:
    """``(j/q, (a j mod q)/q)`` for ``j = 1..q`` with residue 0 sent to 1."""
    if q < 1:
        raise DomainError(f"q must be positive, got {q}")
    if math.gcd(a, q) != 1:
        raise DomainError(f"need gcd(a, q) = 1, got a={a}, q={q}")
    ys = tuple(((a * j) % q) or q for j in range(1, q + 1))
    return PointSet2D(tuple(range(1, q + 1)), ys, q)


def larcher_sequences(g: int, q: int) -> LarcherSets:
    """The additive 1D and 2D sets and the exponential 2D set built from a
    primitive root ``g`` modulo the prime ``q``."""
    if not isprime(q):
        raise ValidationError(f"q must be prime, got {q}")
    if q == 2:
        if g % 2 != 1:
            raise ValidationError("1 is the only primitive root mod 2")
    elif g % q == 0 or n_order(g % q, q) != q - 1:
        raise ValidationError(f"{g} is not a primitive root modulo {q}")
    one = tuple(((j * g) % q) or q for j in range(1, q + 1))
    lat = PointSet2D(tuple(range(1, q + 1)), one, q)
    ex, ey = [], []
    p = g % q
    for _ in range(1, q):
        nxt = (p * g) % q
        ex.append(p or q)
        ey.append(nxt or q)
        p = nxt
    return LarcherSets(one, lat, PointSet2D(tuple(ex), tuple(ey), q), q, g)


def star_discrepancy_1d(nums, den: int) -> Fraction:
    """``max_i max(i/n - u_(i), u_(i) - (i-1)/n)`` over the sorted points."""
    u = sorted(nums)
    n = len(u)
    if n == 0:
        raise DomainError("empty point set")
    best = Fraction(0)
    for i, v in enumerate(u, start=1):
        x = Fraction(v, den)
        best = max(best, Fraction(i, n) - x, x - Fraction(i - 1, n))
    return best


def _box_sweep(xs: np.ndarray, ys: np.ndarray, den: int, cx: np.ndarray, cy: np.ndarray):
    """Evaluate closed excess and open deficit at every candidate corner.

    ``cx``, ``cy`` are sorted candidate numerators.  Returns the best scaled
    value (numerator over ``n den^2``) and its corner.
    """
    n = xs.size
    # closed: count x <= cx[i], y <= cy[k]; open: x < cx[i], y < cy[k]
    ix_c = np.searchsorted(cx, xs, side="left")  # first candidate >= x
    iy_c = np.searchsorted(cy, ys, side="left")
    ix_o = np.searchsorted(cx, xs, side="right")  # first candidate > x
    iy_o = np.searchsorted(cy, ys, side="right")
    H_c = np.zeros((cx.size + 1, cy.size + 1), dtype=np.int64)
    H_o = np.zeros((cx.size + 1, cy.size + 1), dtype=np.int64)
    np.add.at(H_c, (ix_c, iy_c), 1)
    np.add.at(H_o, (ix_o, iy_o), 1)
    Cc = H_c.cumsum(0).cumsum(1)[: cx.size, : cy.size]
    Co = H_o.cumsum(0).cumsum(1)[: cx.size, : cy.size]
    d2 = den * den
    if n * d2 >= 2**62:  # fall back to Python integers rather than overflow
        Cc, Co, cx, cy = Cc.astype(object), Co.astype(object), cx.astype(object), cy.astype(object)
    vol = np.outer(cx, cy)
    excess = Cc * d2 - n * vol
    deficit = n * vol - Co * d2
    ie = np.unravel_index(int(np.argmax(excess)), excess.shape)
    idf = np.unravel_index(int(np.argmax(deficit)), deficit.shape)
    e, d = int(excess[ie]), int(deficit[idf])
    if e >= d:
        return e, int(cx[ie[0]]), int(cy[ie[1]]), True
    return d, int(cx[idf[0]]), int(cy[idf[1]]), False


def star_discrepancy_exact(P: PointSet2D, a: Optional[int] = None) -> DiscrepancyReport:
    """Critical-coordinate sweep: box corners range over point coordinates
    together with 1; closed boxes give the excess, open boxes the deficit.

    If the set came from :func:`lattice_points`, pass ``a`` to attach the
    Zaremba and digit-sum bounds.
    """
    if P.n == 0:
        raise DomainError("empty point set")
    xs, ys = P.arrays()
    cx = np.unique(np.concatenate((xs, [P.den])))
    cy = np.unique(np.concatenate((ys, [P.den])))
    num, bx, by, closed = _box_sweep(xs, ys, P.den, cx, cy)
    val = Fraction(num, P.n * P.den * P.den)
    zb = lb = None
    if a is not None:
        zb = zaremba_bound(a, P.den)
        lb = sum_quotients(expand(a % P.den, P.den)) / P.den
    return DiscrepancyReport(val, (Fraction(bx, P.den), Fraction(by, P.den), closed), zb, lb)


def star_discrepancy_grid(P: PointSet2D) -> Fraction:
    """Oracle: every grid corner ``(i/den, k/den)``, counting by broadcasting."""
    if P.n == 0:
        raise DomainError("empty point set")
    xs, ys = P.arrays()
    g = np.arange(0, P.den + 1, dtype=np.int64)
    le_x = xs[None, :] <= g[:, None]  # (den+1, n)
    le_y = ys[None, :] <= g[:, None]
    lt_x = xs[None, :] < g[:, None]
    lt_y = ys[None, :] < g[:, None]
    Cc = le_x.astype(np.int64) @ le_y.T.astype(np.int64)
    Co = lt_x.astype(np.int64) @ lt_y.T.astype(np.int64)
    vol = np.outer(g, g)
    d2 = P.den * P.den
    best = max(int((Cc * d2 - P.n * vol).max()), int((P.n * vol - Co * d2).max()))
    return Fraction(best, P.n * d2)


def lattice_star_discrepancy(a: int, q: int) -> Fraction:
    """Exact ``D*(X(a, q))`` in ``O(q^2)`` compiled time."""
    if math.gcd(a, q) != 1:
        raise DomainError(f"need gcd(a, q) = 1, got a={a}, q={q}")
    num, _, _, _ = _kernels.lattice_star_discrepancy(a % q, q)
    return Fraction(int(num), q * q)


def lattice_star_upper_bound(a: int, q: int, m: int) -> Fraction:
    """Rigorous upper bound for ``D*(X(a, q))`` from an ``m x m`` grid."""
    if m < 1:
        raise DomainError("grid size must be positive")
    return Fraction(int(_kernels.lattice_grid_upper_bound(a % q, q, m)), q * m * m)


def extreme_discrepancy_exact(P: PointSet2D, n_max: int = 64) -> Fraction:
    """Supremum over all axis-parallel boxes (not only anchored ones).

    Edges range over point coordinates together with 0 and 1; closed boxes
    give the excess and open boxes the deficit.  Quartic in the number of
    distinct coordinates, so limited to small sets.
    """
    if P.n == 0:
        raise DomainError("empty point set")
    if P.n > n_max:
        raise DomainError(f"extreme discrepancy limited to n <= {n_max}")
    xs, ys = P.arrays()
    cx = np.unique(np.concatenate(([0], xs, [P.den])))
    cy = np.unique(np.concatenate(([0], ys, [P.den])))
    n, d2 = P.n, P.den * P.den
    best = 0
    in_y_closed = (ys[None, None, :] >= cy[:, None, None]) & (ys[None, None, :] <= cy[None, :, None])
    in_y_open = (ys[None, None, :] > cy[:, None, None]) & (ys[None, None, :] < cy[None, :, None])
    hy = cy[None, :] - cy[:, None]
    valid_y = hy >= 0
    for i in range(cx.size):
        for j in range(i, cx.size):
            wx = int(cx[j] - cx[i])
            sel_c = (xs >= cx[i]) & (xs <= cx[j])
            sel_o = (xs > cx[i]) & (xs < cx[j])
            cnt_c = (in_y_closed & sel_c[None, None, :]).sum(axis=2)
            cnt_o = (in_y_open & sel_o[None, None, :]).sum(axis=2)
            vol = wx * hy
            exc = np.where(valid_y, cnt_c * d2 - n * vol, 0)
            dfc = np.where(valid_y, n * vol - cnt_o * d2, 0)
            best = max(best, int(exc.max()), int(dfc.max()))
    return Fraction(best, n * d2)


def zaremba_bound(a: int, q: int) -> float:
    """``(4M/log(M+1) + (4M+1)/log q) log q / q`` with ``M = M(a)``."""
    if q < 2:
        raise DomainError(f"q must be >= 2, got {q}")
    if math.gcd(a, q) != 1:
        raise DomainError(f"need gcd(a, q) = 1, got a={a}, q={q}")
    M = max_quotient(expand(a % q, q))
    lq = math.log(q)
    return (4 * M / math.log(M + 1) + (4 * M + 1) / lq) * lq / q


def certify_zaremba_bound(a: int, q: int) -> str:
    """``'trivial'``, ``'grid'`` or ``'exact'`` when ``D* <= min(1, bound)``
    is certified; ``'violated'`` otherwise."""
    B = zaremba_bound(a, q)
    m0 = 16 if B >= 1 else max(16, int(10 / B))
    st, _ = _kernels.certify_zaremba_bound(a % q, q, m0)
    return {0: "trivial", 1: "grid", 2: "exact", -1: "violated"}[int(st)]


# f(x, y) on exact rationals, its integral over the unit square and its
# Hardy-Krause variation (anchored at (1, 1)): V = var f(., 1) + var f(1, .)
# + integral of |d^2 f / dx dy|.
KH_CATALOG: dict[str, tuple[Callable[[Fraction, Fraction], Fraction], Fraction, int]] = {
    "xy": (lambda x, y: x * y, Fraction(1, 4), 3),
    "mean": (lambda x, y: (x + y) / 2, Fraction(1, 2), 1),
    "x": (lambda x, y: x, Fraction(1, 2), 1),
    "const": (lambda x, y: Fraction(1), Fraction(1), 0),
}


def koksma_hlawka_demo(f_id: str, P: PointSet2D) -> KHReport:
    """Quadrature error of a catalog function against ``V(f) D*(P)``."""
    if f_id not in KH_CATALOG:
        raise DomainError(f"unknown function {f_id!r}; choose from {sorted(KH_CATALOG)}")
    f, integral, var = KH_CATALOG[f_id]
    mean = sum(f(Fraction(x, P.den), Fraction(y, P.den)) for x, y in zip(P.x, P.y)) / P.n
    return KHReport(f_id, abs(mean - integral), var, star_discrepancy_exact(P).exact_value)
