"""Continued fractions with bounded partial quotients: search, Cantor-type
interval sets, lattice discrepancy and desk-scale verification."""

from .cf_core import (
    ConvergentTable,
    DigitSeq,
    Rational,
    continuant,
    convergents,
    evaluate,
    expand,
    inverse_digits,
    max_quotient,
    sum_quotients,
)
from .errors import CapacityError, DomainError, FitError, ValidationError

__version__ = "0.1.0"

__all__ = [
    "ConvergentTable",
    "DigitSeq",
    "Rational",
    "continuant",
    "convergents",
    "evaluate",
    "expand",
    "inverse_digits",
    "max_quotient",
    "sum_quotients",
    "CapacityError",
    "DomainError",
    "FitError",
    "ValidationError",
]
