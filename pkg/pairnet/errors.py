"""Exception hierarchy shared by every pairnet module."""

from __future__ import annotations

from typing import Optional


class PairnetError(Exception):
    """Base class for all library errors."""


class InstanceError(PairnetError):
    """A weight matrix is structurally unusable."""


class NonSquare(InstanceError):
    pass


class OddNodeCount(InstanceError):
    pass


class Asymmetric(InstanceError):
    def __init__(self, u: int, v: int):
        super().__init__(f"weights[{u}][{v}] != weights[{v}][{u}]")
        self.u = u
        self.v = v


class NonZeroDiagonal(InstanceError):
    def __init__(self, u: int):
        super().__init__(f"weights[{u}][{u}] is not zero")
        self.u = u
        self.v = u


class NegativeWeight(InstanceError):
    def __init__(self, u: int, v: int):
        super().__init__(f"weights[{u}][{v}] is negative")
        self.u = u
        self.v = v


class InconsistentEntry(InstanceError):
    def __init__(self, u: int, v: int, given, shortest):
        super().__init__(
            f"entry ({u},{v})={given} exceeds shortest defined path {shortest}"
        )
        self.u = u
        self.v = v


class ParseError(PairnetError):
    """A file could not be read; carries the location of the problem."""

    def __init__(
        self,
        path,
        reason: str,
        field: Optional[str] = None,
        line: Optional[int] = None,
    ):
        where = str(path)
        if line is not None:
            where += f":{line}"
        if field:
            where += f" [{field}]"
        super().__init__(f"{where}: {reason}")
        self.path = path
        self.reason = reason
        self.field = field
        self.line = line


class SolverError(PairnetError):
    pass


class EmptyNodeSet(SolverError):
    pass


class BadK(SolverError):
    pass


class OddSet(SolverError):
    pass


class StartNotInTree(SolverError):
    pass


class TooLarge(SolverError):
    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.size = size
        self.cap = cap


class InvalidPlan(PairnetError):
    pass


class UnsupportedExperiment(PairnetError):
    pass


class BadCover(PairnetError):
    pass


class BadLambda(PairnetError):
    pass


class BadFormula(PairnetError):
    pass


class StructuralCheckFailed(PairnetError):
    pass


class AssignmentDoesNotSatisfy(PairnetError):
    pass


class AssignmentNotOneInThree(PairnetError):
    pass
