"""Exception hierarchy.

Data problems derive from :class:`DataError`, solver breakdowns from
:class:`NumericalError`. The CLI maps the two families to distinct exit codes.
"""
from __future__ import annotations


class SchainError(Exception):
    """Base class for every error raised by the package."""


class DataError(SchainError, ValueError):
    """Malformed or inconsistent input data."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class MalformedRecord(DataError):
    pass


class UnknownType(DataError):
    pass


class DuplicateId(DataError):
    pass


class DanglingEndpoint(DataError):
    pass


class UnknownLinkType(DataError):
    pass


class AttributeRowMismatch(DataError):
    pass


class NonFiniteValue(DataError):
    pass


class UnknownObject(DataError):
    pass


class SelfPair(DataError):
    pass


class ContradictoryConstraint(DataError):
    pass


class WrongObjectType(DataError):
    pass


class NoSuchLinkType(DataError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(message)


class AsymmetricPath(DataError):
    pass


class TargetTypeMismatch(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class InfeasibleWeights(DataError):
    pass


class TooFewObjects(DataError):
    pass


class PartialLabeling(DataError):
    pass


class LabelSetMismatch(DataError):
    pass


class SingleCluster(DataError):
    pass


class NumericalError(SchainError, ArithmeticError):
    """A solver broke one of its own invariants or could not proceed."""


class CountOverflow(NumericalError):
    pass


class EigenSolverError(NumericalError):
    pass


class DinkelbachInvariantError(NumericalError):
    pass


class WeightStepError(NumericalError):
    pass
