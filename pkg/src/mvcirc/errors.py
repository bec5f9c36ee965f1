"""Exception types and the three-valued answer used by cap-bounded searches."""

from __future__ import annotations

import enum


class MvcircError(Exception):
    """Base class for all package errors."""


class UnknownOp(MvcircError):
    pass


class UnboundVariable(MvcircError):
    pass


class ElementOutOfRange(MvcircError):
    pass


class CapExceeded(MvcircError):
    """A closure or enumeration grew past its configured cap."""

    def __init__(self, count: int, what: str = "closure"):
        super().__init__(f"{what} exceeded cap at {count} entries")
        self.count = count


class SizeNot2(MvcircError):
    pass


class NotACongruence(MvcircError):
    pass


class LatticeMismatch(MvcircError):
    pass


class UntypedLattice(MvcircError):
    pass


class ParseError(MvcircError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = ""
        if line is not None:
            loc = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(message + loc)
        self.line = line
        self.column = column


class ForwardReference(ParseError):
    pass


class ArityMismatch(MvcircError):
    pass


class UnboundInput(MvcircError):
    pass


class BudgetExceeded(MvcircError):
    def __init__(self, needed: int, budget: int):
        super().__init__(f"would need {needed} evaluations, budget is {budget}")
        self.needed = needed
        self.budget = budget


class NotDlLike(MvcircError):
    pass


class NotMalcev(MvcircError):
    pass


class NotAffine(MvcircError):
    pass


class NotSupernilpotent(MvcircError):
    pass


class LinearityCheckFailed(MvcircError):
    def __init__(self, diagnostic: str):
        super().__init__(diagnostic)
        self.diagnostic = diagnostic


class InvalidWitness(MvcircError):
    pass


class UnrecognizedShape(MvcircError):
    pass


class NotPermutationWarning(UserWarning):
    """The translation x -> d(x, y, a) is not a permutation for some y."""


class Tri(enum.Enum):
    """Three-valued answer: cap-bounded searches may come back undecided."""

    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    def __bool__(self) -> bool:  # pragma: no cover - guard against accidental truthiness
        raise TypeError("Tri is three-valued; compare against Tri.YES/NO/UNKNOWN explicitly")

    @property
    def is_yes(self) -> bool:
        return self is Tri.YES

    @property
    def is_no(self) -> bool:
        return self is Tri.NO

    @property
    def is_unknown(self) -> bool:
        return self is Tri.UNKNOWN
