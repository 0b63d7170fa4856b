"""Shared exception types for the dukego package."""

from __future__ import annotations


class DukegoError(Exception):
    """Base class for all dukego errors."""


class ContractViolation(DukegoError):
    """An operation was called outside its stated precondition."""


class RuleViolation(DukegoError):
    """A move was rejected; the message names the violated rule."""


class PositionError(DukegoError):
    """A position fails its structural invariants."""


class BoundsError(PositionError):
    """A square lies outside the board."""


class OverlapError(PositionError):
    """Two pieces occupy the same square."""


class DpnError(DukegoError):
    """Syntax error in position notation text.

    ``column`` is the 1-based character offset of the offending token
    (the notation is a single line).
    """

    def __init__(self, message: str, column: int) -> None:
        super().__init__(f"{message} (column {column})")
        self.column = column


class DiagramError(DukegoError):
    """Syntax or structural error in a strategy diagram file."""

    def __init__(self, message: str, row: int | None = None, col: int | None = None) -> None:
        where = ""
        if row is not None:
            where = f" (cell {row},{col})" if col is not None else f" (row {row})"
        super().__init__(message + where)
        self.row = row
        self.col = col


class TacticFailure(DukegoError):
    """A tactic episode's contract no longer holds for this position."""


class StrategyFailure(DukegoError):
    """A table strategy cannot satisfy its coverage requirement in one move."""


class SolveCapExceeded(DukegoError):
    """The requested state space exceeds the configured cap."""

    def __init__(self, message: str, total_states: int, cap: int) -> None:
        super().__init__(message)
        self.total_states = total_states
        self.cap = cap


class CacheFormatError(DukegoError):
    """A solver cache file is corrupt or has an unsupported version."""


class UnsupportedBoardError(DukegoError):
    """No strategy is available for this board under the given reduction."""


class FairnessConsistencyError(DukegoError):
    """A solved board claims the second mover wins, which cannot happen."""
