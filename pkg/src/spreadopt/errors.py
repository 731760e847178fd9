"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 2 for bad input,
3 for enumeration budgets, 4 for violated internal invariants.
"""

from __future__ import annotations


class SpreadError(Exception):
    exit_code = 2


class ParseError(SpreadError):
    pass


class SelfLoopError(ParseError):
    pass


class DisconnectedError(SpreadError):
    pass


class UnknownNodeError(SpreadError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return Exception.__str__(self)


class EmptyTargetError(SpreadError):
    pass


class StepCapExceeded(SpreadError):
    """A simulated walk ran past the step cap; ``partial`` holds what finished."""

    exit_code = 4

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class TooLargeError(SpreadError):
    exit_code = 3


class BudgetExceededError(SpreadError):
    exit_code = 3

    def __init__(self, message: str, count: int | None = None):
        super().__init__(message)
        self.count = count


class DegenerateRankError(SpreadError):
    pass


class EmptySeedFamilyError(SpreadError):
    pass


class ConstructionFailed(SpreadError):
    def __init__(self, message: str, obstruction=None):
        super().__init__(message)
        self.obstruction = obstruction


class NoValidPairsError(SpreadError):
    pass


class RankNotOneError(SpreadError):
    pass


class InvariantError(SpreadError):
    exit_code = 4


class NoCoverError(SpreadError):
    """No vertex cover exists at the requested cardinality cap."""
