"""Integer relations between convergent denominators.

A convergent denominator ``x = K(r_1..r_s)`` of ``a/q`` comes with its
companion ``x_hat = K(r_2..r_s)`` (the convergent numerator), and two such
pairs define the wedge ``d(x, y) = x y_hat - y x_hat``.  Wedges measure how
long a digit prefix two expansions share, which controls how far apart
``a`` and ``b`` can be and which small integer relations between
denominators are possible.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np
from sympy import primerange

from .cantor import boundary_QMbar, interval_J, membership_mask, membership_ZM
from .cf_core import continuant, raw_digits
from .criterion import signed_residue
from .errors import CapacityError, DomainError

__all__ = [
    "ContinuantPair",
    "IndependenceCertificate",
    "DirichletOutcome",
    "RepulsionDepResult",
    "BoundCheck",
    "DistanceReport",
    "Instance",
    "wedge_d",
    "cross_ratio_check",
    "test_independence",
    "linear_problem_R",
    "dirichlet_box",
    "repulsion_C",
    "repulsion_dependent",
    "triple_uniqueness",
    "distance_bounds_check",
    "convergent_pairs",
    "k2_window",
    "harvest",
    "default_k2_harvest",
    "write_corpus",
    "read_corpus",
]


@dataclass(frozen=True)
class ContinuantPair:
    digits: tuple[int, ...]
    x: int
    x_hat: int

    @classmethod
    def from_digits(cls, ds: Sequence[int]) -> "ContinuantPair":
        ds = tuple(int(c) for c in ds)
        if any(c < 1 for c in ds):
            raise DomainError(f"digits must be positive, got {ds}")
        x_hat = continuant(ds[1:]) if ds else 0
        return cls(ds, continuant(ds), x_hat)


@dataclass(frozen=True)
class IndependenceCertificate:
    xs: tuple[int, ...]
    bounds: tuple[int, ...]
    q: int
    relation: Optional[tuple[int, ...]] = None

    @property
    def independent(self) -> bool:
        return self.relation is None


@dataclass(frozen=True)
class DirichletOutcome:
    m: tuple[int, ...]
    value: int  # sum m_j x_j over the integers
    case: str  # "I" (exact relation) or "II" (0 < |value| <= T)
    R: tuple[float, ...]


@dataclass(frozen=True)
class RepulsionDepResult:
    holds: bool
    m: tuple[int, ...]
    combination: int
    residue: int
    threshold: float

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class BoundCheck:
    status: str  # "HOLDS", "FAILS" or "NOT-APPLICABLE"
    lhs: Optional[Fraction] = None
    rhs: Optional[Fraction] = None
    reason: str = ""


@dataclass(frozen=True)
class DistanceReport:
    d: int
    distance: BoundCheck
    lower: BoundCheck
    upper: BoundCheck

    @property
    def ok(self) -> bool:
        return all(c.status != "FAILS" for c in (self.distance, self.lower, self.upper))


@dataclass(frozen=True)
class Instance:
    """One harvested critical denominator ``x`` of ``a`` inside ``J_{u/v}``."""

    q: int
    M: int
    t: float
    a: int
    digits: tuple[int, ...]
    x: int
    x_hat: int
    node: tuple[int, ...] = ()


def wedge_d(X: ContinuantPair, Y: ContinuantPair) -> int:
    """``d(x, y) = x y_hat - y x_hat``."""
    return X.x * Y.x_hat - Y.x * X.x_hat


def cross_ratio_check(X: ContinuantPair, Y: ContinuantPair, Z: ContinuantPair, Xs: ContinuantPair) -> tuple[bool, bool, bool]:
    """The three wedge identities, evaluated exactly:

    * ``d(y,z) x + d(z,x) y + d(x,y) z = 0``
    * the same with ``x_hat, y_hat, z_hat``
    * ``d(x,x*) d(y,z) = d(x,y) d(x*,z) - d(x,z) d(x*,y)``
    """
    dyz, dzx, dxy = wedge_d(Y, Z), wedge_d(Z, X), wedge_d(X, Y)
    first = dyz * X.x + dzx * Y.x + dxy * Z.x == 0
    second = dyz * X.x_hat + dzx * Y.x_hat + dxy * Z.x_hat == 0
    third = wedge_d(X, Xs) * dyz == dxy * wedge_d(Xs, Z) - wedge_d(X, Z) * wedge_d(Xs, Y)
    return first, second, third


def test_independence(xs: Sequence[int], bounds: Sequence[float], q: int, capacity: int = 10**8) -> IndependenceCertificate:
    """Exhaustive search for ``sum alpha_j x_j = 0 (mod q)`` with
    ``|alpha_j| <= C_j`` and not all zero.

    Relations come in sign pairs; the one with a positive leading nonzero
    coefficient is reported, taking the lexicographically smallest such.
    """
    xs = tuple(int(x) for x in xs)
    C = tuple(int(math.floor(c)) for c in bounds)
    if len(xs) != len(C) or not xs:
        raise DomainError("need one bound per element")
    if any(c < 0 for c in C):
        raise DomainError("bounds must be non-negative")
    box = math.prod(2 * c + 1 for c in C)
    if box > capacity:
        raise CapacityError(f"coefficient box has {box} points, above {capacity}")
    last = np.arange(-C[-1], C[-1] + 1, dtype=object)
    last_terms = [(int(v) * xs[-1]) % q for v in last]
    # lexicographic order with alpha_1 >= 0; within alpha_1 = 0 the next
    # coordinate is the leading one and must be positive, and so on
    for head in itertools.product(*[range(-c, c + 1) for c in C[:-1]]):
        lead = next((h for h in head if h != 0), 0)
        if lead < 0:
            continue
        s = sum(h * x for h, x in zip(head, xs[:-1])) % q
        for v, term in zip(last, last_terms):
            if (s + term) % q == 0:
                rel = head + (int(v),)
                if lead == 0 and int(v) <= 0:
                    continue
                return IndependenceCertificate(xs, C, q, rel)
    return IndependenceCertificate(xs, C, q, None)


def linear_problem_R(Xs: Sequence[float], T: float) -> tuple[float, ...]:
    """``R_j = X_j^{-1} (4k prod X / T)^{1/(k-1)}``."""
    k = len(Xs)
    if k < 2:
        raise DomainError("need at least two variables")
    base = (4 * k * math.prod(Xs) / T) ** (1 / (k - 1))
    return tuple(base / X for X in Xs)


def dirichlet_box(xs: Sequence[int], Xs: Sequence[float], T: float, q: int, capacity: int = 5 * 10**6) -> DirichletOutcome:
    """Pigeonhole construction of a small combination ``sum m_j x_j``.

    All sums ``sum n_j x_j`` with ``|n_j| <= floor(R_j)`` are listed (the
    ``x_j`` taken as signed residues).  A repeated value gives an exact
    relation; otherwise the closest two sums differ by at most ``T``.
    """
    k = len(xs)
    if len(Xs) != k:
        raise DomainError("need one magnitude bound per element")
    if T < 1:
        raise DomainError(f"T must be >= 1, got {T}")
    sx = [signed_residue(1, x % q, q) if x % q else 0 for x in xs]
    for x, X in zip(sx, Xs):
        if abs(x) > X:
            raise DomainError(f"|x| = {abs(x)} exceeds its bound {X}")
    if (8 * k) ** k * math.prod(Xs) > T * q ** (k - 1):
        raise DomainError("condition (8k)^k prod X_j <= T q^(k-1) fails")
    R = linear_problem_R(Xs, T)
    if min(R) < 1:
        raise DomainError(f"some R_j < 1: {R}")
    if math.prod(R) < 2:
        raise DomainError(f"prod R_j = {math.prod(R)} < 2")
    ranges = [int(math.floor(r)) for r in R]
    size = math.prod(2 * r + 1 for r in ranges)
    if size > capacity:
        raise CapacityError(f"{size} lattice sums exceed the capacity {capacity}")
    grids = np.meshgrid(*[np.arange(-r, r + 1, dtype=np.int64) for r in ranges], indexing="ij")
    coeffs = np.stack([g.ravel() for g in grids], axis=1)
    sums = coeffs @ np.array(sx, dtype=np.int64)
    order = np.argsort(sums, kind="stable")
    ss = sums[order]
    gaps = np.diff(ss)
    i = int(np.argmin(gaps))
    m = coeffs[order[i + 1]] - coeffs[order[i]]
    value = int(ss[i + 1] - ss[i])
    case = "I" if value == 0 else "II"
    if case == "II" and not 0 < value <= T:
        raise AssertionError(f"pigeonhole produced gap {value} > T = {T}")
    if any(abs(int(mj)) > 2 * r for mj, r in zip(m, R)):
        raise AssertionError("coefficient exceeds 2 R_j")
    return DirichletOutcome(tuple(int(v) for v in m), value, case, R)


def repulsion_C(Xs: Sequence[float], t: float) -> tuple[float, ...]:
    """``C_j = 2 X_j^{-1} (4k prod X / t)^{1/(k-1)}``, i.e. ``2 R_j`` with ``T = t``."""
    return tuple(2 * r for r in linear_problem_R(Xs, t))


def repulsion_dependent(
    a: int, q: int, xs: Sequence[int], Xs: Sequence[float], M: int, t: float, require_member: bool = True
) -> RepulsionDepResult:
    """Find ``m`` with ``|m_j| <= C_j`` and check ``|a sum m_j x_j| >= q/(4 M t)``.

    ``require_member=False`` skips the membership precondition on ``a``, which
    is how negative controls are run.
    """
    k = len(xs)
    if require_member and not membership_ZM(a, q, M, t):
        raise DomainError(f"{a} is not in Z_M(t) for q={q}, M={M}, t={t}")
    for x, X in zip(xs, Xs):
        if not 1 <= x <= X:
            raise DomainError(f"need 1 <= x_j <= X_j, got {x} > {X}")
    C = repulsion_C(Xs, t)
    if min(C) < 4:
        raise DomainError(f"C_j must be >= 4, got {C}")
    if (8 * k) ** k * math.prod(Xs) > t * q ** (k - 1):
        raise DomainError("condition (8k)^k prod X_j <= t q^(k-1) fails")
    cert = test_independence(xs, C, q)
    if not cert.independent:
        raise DomainError(f"elements are not C-independent: relation {cert.relation}")
    out = dirichlet_box(xs, Xs, t, q)
    comb = sum(m * x for m, x in zip(out.m, xs))
    r = (a * comb) % q
    r = r - q if 2 * r > q else r
    thr = q / (4 * M * t)
    return RepulsionDepResult(abs(r) >= thr, out.m, comb, r, thr)


def triple_uniqueness(
    xyz: Sequence[int],
    coeffs: Sequence[int],
    coeffs2: Sequence[int],
    bounds: Sequence[float],
    bounds2: Sequence[float],
    t: float,
    M: int,
    q: int,
) -> bool:
    """Two bounded primitive relations on the same triple must agree.

    Relations are read modulo ``q`` and compared up to an overall sign, since
    ``-(alpha, beta, gamma)`` satisfies every hypothesis whenever
    ``(alpha, beta, gamma)`` does.  ``N = q / t^2``.
    """
    x, y, z = xyz
    for c, b in ((coeffs, bounds), (coeffs2, bounds2)):
        if len(c) != 3 or len(b) != 3:
            raise DomainError("need coefficient and bound triples")
        if (c[0] * x + c[1] * y + c[2] * z) % q:
            raise DomainError(f"{tuple(c)} is not a relation")
        if math.gcd(math.gcd(c[0], c[1]), c[2]) != 1:
            raise DomainError(f"{tuple(c)} is not primitive")
        if any(abs(ci) > bi for ci, bi in zip(c, b)):
            raise DomainError(f"{tuple(c)} exceeds its bounds {tuple(b)}")
    cn, cn2 = max(bounds), max(bounds2)
    if 16 * cn * cn2 > t:
        raise DomainError("16 |C| |C'| <= t fails")
    N = q / (t * t)
    if N**1.5 > math.sqrt(q) / (32 * M * M * cn * cn2):
        raise DomainError("N^(3/2) <= sqrt(q) / (32 M^2 |C| |C'|) fails")
    c1, c2 = tuple(coeffs), tuple(coeffs2)
    return c1 == c2 or c1 == tuple(-v for v in c2)


def _prefix_of(ds: Sequence[int], a: int, q: int) -> bool:
    """Is ``ds`` an initial segment of one of the two expansions of ``a/q``?"""
    full = raw_digits(a % q, q)
    alt = full[:-1] + [full[-1] - 1, 1] if full else []
    n = len(ds)
    return list(ds) == full[:n] or list(ds) == alt[:n]


def distance_bounds_check(a: int, b: int, q: int, X: ContinuantPair, Y: ContinuantPair, M_tilde: int, l: int) -> DistanceReport:
    """Evaluate the three wedge-distance inequalities for prefixes sharing
    ``r_1..r_{l-1}``, marking those whose hypotheses fail as NOT-APPLICABLE."""
    d = wedge_d(X, Y)
    x, y = X.x, Y.x
    shared = l >= 1 and len(X.digits) >= l and len(Y.digits) >= l and X.digits[: l - 1] == Y.digits[: l - 1]
    pref = _prefix_of(X.digits, a, q) and _prefix_of(Y.digits, b, q)
    dist = Fraction(abs(a - b), q)

    def crit(u, pair):
        if pair.x >= q:
            return False
        return M_tilde * pair.x * abs(signed_residue(u, pair.x % q, q) if pair.x % q else 0) <= q

    if shared and pref and crit(a, X) and crit(b, Y):
        lhs = abs(dist - Fraction(abs(d), x * y))
        rhs = Fraction(1, M_tilde * x * x) + Fraction(1, M_tilde * y * y)
        c1 = BoundCheck("HOLDS" if lhs <= rhs else "FAILS", lhs, rhs)
    else:
        c1 = BoundCheck("NOT-APPLICABLE", reason="needs critical prefixes of a and b sharing r_1..r_{l-1}")
    long_enough = len(X.digits) >= l + 1 and len(Y.digits) >= l + 1
    if shared and pref and long_enough:
        rl, rl2 = X.digits[l - 1], Y.digits[l - 1]
        if rl != rl2:
            rhs = Fraction(x * y * abs(a - b), 16 * (rl + rl2) * q)
            c2 = BoundCheck("HOLDS" if abs(d) >= rhs else "FAILS", Fraction(abs(d)), rhs)
        else:
            c2 = BoundCheck("NOT-APPLICABLE", reason="r_l = r'_l")
        big, small = max(rl, rl2), min(rl, rl2)
        if big >= small + 2:
            rhs = Fraction(8 * x * y * small * abs(a - b), q)
            c3 = BoundCheck("HOLDS" if abs(d) <= rhs else "FAILS", Fraction(abs(d)), rhs)
        else:
            c3 = BoundCheck("NOT-APPLICABLE", reason="branch digits differ by less than 2")
    else:
        c2 = c3 = BoundCheck("NOT-APPLICABLE", reason="needs s, s' >= l + 1 and a shared prefix")
    return DistanceReport(d, c1, c2, c3)


def convergent_pairs(a: int, q: int) -> list[ContinuantPair]:
    """``(q_nu, p_nu)`` for ``nu = 1..s`` as continuant pairs."""
    ds = raw_digits(a % q, q)
    return [ContinuantPair.from_digits(ds[:n]) for n in range(1, len(ds) + 1)]


def k2_window(q: int, M: int, C: float = 1.0) -> tuple[float, float]:
    """Largest ``N`` allowed by ``N^{3/2} <= sqrt(q) / (2 (M+2)^2 C)`` and the
    matching ``t = sqrt(q / N)``."""
    N = (math.sqrt(q) / (2 * (M + 2) ** 2 * C)) ** (2 / 3)
    return N, math.sqrt(q / N)


def harvest(
    qs: Iterable[int],
    M: int,
    t_rule,
    require_inverse: bool = True,
) -> list[Instance]:
    """Critical denominators ``x`` in ``(t, q/t)`` of members of each ``J_{u/v}``.

    ``t_rule(q)`` returns ``t``.  With ``require_inverse`` only ``a`` with
    ``a^{-1}`` also in ``Z_M(t)`` are kept.
    """
    out = []
    for q in qs:
        t = float(t_rule(q))
        if t > math.sqrt(q):
            continue
        mask = membership_mask(q, M, t)
        for node in boundary_QMbar(M, t):
            first, last = interval_J(node, M, q)
            for a in range(max(1, first), min(q - 1, last) + 1):
                if not mask[a] or math.gcd(a, q) != 1:
                    continue
                if require_inverse and not mask[pow(a, -1, q)]:
                    continue
                for pair in convergent_pairs(a, q):
                    if t < pair.x < q / t:
                        out.append(Instance(q, M, t, a, pair.digits, pair.x, pair.x_hat, node.digits.digits))
    return out


def default_k2_harvest(C: float = 1.0) -> list[Instance]:
    """The corpus behind the acceptance check: primes with a non-degenerate
    ``cond:k=2`` window (``N >= 1``) up to 5000, for ``M = 2`` and ``M = 3``."""
    inst = []
    for M, q_lo in ((2, 1025), (3, 2501)):
        inst += harvest(primerange(q_lo, 5001), M, lambda q, M=M: k2_window(q, M, C)[1])
    return inst


def write_corpus(instances: Iterable[Instance], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ins in instances:
            d = asdict(ins)
            d["digits"] = list(d["digits"])
            d["node"] = list(d["node"])
            fh.write(json.dumps(d, sort_keys=True) + "\n")


def read_corpus(path) -> list[Instance]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            d = json.loads(line)
            d["digits"] = tuple(d["digits"])
            d["node"] = tuple(d.get("node", ()))
            out.append(Instance(**d))
    return out
