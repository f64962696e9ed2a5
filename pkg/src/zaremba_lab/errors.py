"""Exception hierarchy shared by every module."""


class ZarembaLabError(Exception):
    """Base class for all library errors."""


class DomainError(ZarembaLabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(ZarembaLabError, ValueError):
    """A structured value violates its invariants (e.g. non-canonical digits)."""


class CapacityError(ZarembaLabError, RuntimeError):
    """An exhaustive search would exceed the configured work budget."""


class FitError(ZarembaLabError, RuntimeError):
    """A regression could not be performed on the supplied samples."""
