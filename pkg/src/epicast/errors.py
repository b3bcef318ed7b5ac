"""Exception hierarchy shared across epicast."""

from __future__ import annotations


class EpicastError(Exception):
    """Base class for every error raised by epicast."""


# ingestion


class IngestError(EpicastError, ValueError):
    pass


class MalformedHeader(IngestError):
    pass


class RaggedRow(IngestError):
    pass


class NonNumericCount(IngestError):
    pass


class UnknownCountry(IngestError, LookupError):
    pass


class AllZero(IngestError):
    pass


# numerics


class NumericsError(EpicastError, ArithmeticError):
    pass


class NotPositiveDefinite(NumericsError):
    def __init__(self, pivot: int, value: float | None = None):
        self.pivot = pivot
        self.value = value
        msg = f"matrix is not positive-definite (pivot {pivot}"
        if value is not None:
            msg += f", value {value:.6g}"
        super().__init__(msg + ")")


class SingularSystem(NotPositiveDefinite):
    pass


class DimensionMismatch(EpicastError, ValueError):
    pass


# models / evaluation


class ModelError(EpicastError, ValueError):
    pass


class DegenerateInput(ModelError):
    pass


class PreconditionError(ModelError):
    pass


class TooShort(EpicastError, ValueError):
    pass


class EmptyInput(EpicastError, ValueError):
    pass
