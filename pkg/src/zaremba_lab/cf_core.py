"""Exact continued-fraction arithmetic for rationals in [0, 1).

A rational ``a/q`` is written ``[0; c_1, ..., c_s]`` with ``c_j >= 1`` and,
in canonical form, ``c_s >= 2``.  All arithmetic uses Python integers, so
continuants of any length are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

from .errors import DomainError, ValidationError

__all__ = [
    "DigitSeq",
    "Rational",
    "ConvergentTable",
    "raw_digits",
    "expand",
    "evaluate",
    "continuant",
    "convergents",
    "max_quotient",
    "sum_quotients",
    "canonicalize",
    "inverse_digits",
    "modular_inverse",
]


@dataclass(frozen=True)
class DigitSeq:
    """Canonical partial quotients ``c_1, ..., c_s`` of a number in [0, 1)."""

    digits: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        ds = tuple(int(c) for c in self.digits)
        object.__setattr__(self, "digits", ds)
        if any(c < 1 for c in ds):
            raise ValidationError(f"partial quotients must be >= 1, got {ds}")
        if ds and ds[-1] == 1:
            raise ValidationError(f"last partial quotient must be >= 2, got {ds}")

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __getitem__(self, i):
        return self.digits[i]

    def __str__(self) -> str:
        return "[0;" + ",".join(map(str, self.digits)) + "]"


@dataclass(frozen=True)
class Rational:
    """A fraction ``num/den`` with ``0 <= num < den``, not necessarily reduced."""

    num: int
    den: int
    reduced: bool = field(init=False)

    def __post_init__(self) -> None:
        if self.den <= 0:
            raise DomainError(f"denominator must be positive, got {self.den}")
        if not 0 <= self.num < self.den:
            raise DomainError(f"need 0 <= num < den, got {self.num}/{self.den}")
        object.__setattr__(self, "reduced", gcd(self.num, self.den) == 1)

    def as_reduced(self) -> "Rational":
        g = gcd(self.num, self.den)
        return Rational(self.num // g, self.den // g)

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"


@dataclass(frozen=True)
class ConvergentTable:
    """Numerators ``p_0..p_s`` and denominators ``q_0..q_s`` of the convergents.

    Indexing follows ``p_0 = 0, q_0 = 1`` (the empty expansion) so that
    ``p[nu]/q[nu]`` is the truncation after ``nu`` digits.
    """

    p: tuple[int, ...]
    q: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.q)

    def check(self) -> bool:
        """Verify the determinant identity and monotonicity of ``q``."""
        for nu in range(1, len(self.q)):
            if self.p[nu] * self.q[nu - 1] - self.p[nu - 1] * self.q[nu] != (-1) ** (nu - 1):
                return False
        return all(self.q[nu] > self.q[nu - 1] for nu in range(2, len(self.q)))


def _check_modulus(a: int, q: int) -> None:
    if q <= 0:
        raise DomainError(f"modulus must be positive, got q={q}")
    if not 0 <= a < q:
        raise DomainError(f"need 0 <= a < q, got a={a}, q={q}")


def raw_digits(a: int, q: int) -> list[int]:
    """Euclid's algorithm on ``a/q`` (no validation, no reduction needed)."""
    out = []
    while a:
        c, r = divmod(q, a)
        out.append(c)
        q, a = a, r
    return out


def expand(a: int, q: int) -> DigitSeq:
    """Canonical expansion of ``a/q``; a reducible fraction is reduced first.

    >>> expand(5, 7).digits
    (1, 2, 2)
    """
    _check_modulus(a, q)
    # Euclid's algorithm never produces a trailing 1 unless q = 1 * a,
    # which cannot happen with a < q; gcd cancels automatically.
    return DigitSeq(tuple(raw_digits(a, q)))


def continuant(digits: Iterable[int]) -> int:
    """The continuant ``K(c_1, ..., c_n)`` with ``K() = 1``."""
    k, km = 1, 0
    for c in digits:
        if c < 1:
            raise ValidationError(f"continuant entries must be >= 1, got {c}")
        k, km = c * k + km, k
    return k


def convergents(d: DigitSeq) -> ConvergentTable:
    p, q = [0], [1]
    pm, qm = 1, 0
    for c in d.digits:
        pn, qn = c * p[-1] + pm, c * q[-1] + qm
        pm, qm = p[-1], q[-1]
        p.append(pn)
        q.append(qn)
    return ConvergentTable(tuple(p), tuple(q))


def evaluate(d: DigitSeq | Sequence[int]) -> Rational:
    """Inverse of :func:`expand`: the reduced fraction with digits ``d``."""
    if not isinstance(d, DigitSeq):
        d = DigitSeq(tuple(d))
    table = convergents(d)
    return Rational(table.p[-1], table.q[-1])


def max_quotient(d: DigitSeq) -> int:
    """``M(a)``, the largest partial quotient."""
    if len(d) == 0:
        raise DomainError("M(a) is undefined for the empty expansion (a = 0)")
    return max(d.digits)


def sum_quotients(d: DigitSeq) -> int:
    """``S(a)``, the sum of the partial quotients."""
    if len(d) == 0:
        raise DomainError("S(a) is undefined for the empty expansion (a = 0)")
    return sum(d.digits)


def canonicalize(digits: Sequence[int]) -> DigitSeq:
    """Absorb a trailing 1: ``[..., c, 1] -> [..., c + 1]``.

    A lone ``[1]`` stands for 1/1, which is not in [0, 1); it is rejected.
    """
    ds = list(digits)
    if ds and ds[-1] == 1:
        if len(ds) == 1:
            raise ValidationError("[0;1] equals 1 and has no canonical form in [0, 1)")
        ds.pop()
        ds[-1] += 1
    return DigitSeq(tuple(ds))


def inverse_digits(d: DigitSeq) -> DigitSeq:
    """Digits of ``a^{-1}/q`` obtained by reversing the digits of ``a/q``.

    With ``s`` digits, ``p_s q_{s-1} - p_{s-1} q_s = (-1)^{s-1}`` gives
    ``a * q_{s-1} = (-1)^{s-1} (mod q)``.  The reversal ``[0; c_s, ..., c_1]``
    equals ``q_{s-1}/q``, so it is the inverse when ``s`` is odd.  For even
    ``s`` the inverse is ``1 - q_{s-1}/q = [0; 1, c_s - 1, c_{s-1}, ..., c_1]``.
    """
    s = len(d)
    if s == 0:
        raise DomainError("a = 0 has no inverse")
    rev = list(reversed(d.digits))
    if s % 2 == 1:
        return canonicalize(rev)
    return canonicalize([1, rev[0] - 1] + rev[1:])


def modular_inverse(a: int, q: int) -> int:
    """``a^{-1} mod q`` in ``[1, q)``; requires ``gcd(a, q) = 1``."""
    if q < 2:
        raise DomainError(f"modulus must be >= 2, got {q}")
    if gcd(a, q) != 1:
        raise DomainError(f"{a} is not invertible modulo {q}")
    return pow(a, -1, q)
