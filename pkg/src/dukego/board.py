"""Board geometry, game state, move legality and terminal detection for Dukego.

The Duke player (D) moves a single piece one square orthogonally per turn and
wins on reaching any edge square.  The stone player (G) drops blocking stones
and wins by immobilizing the Duke, or, in the bounded-inventory variant, by
keeping the Duke away from the edge forever.

Conventions: rows are counted 1..rows from the north edge, columns 1..cols
from the west edge.  All values here are immutable; operations are pure
functions returning new positions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterator, NamedTuple, Union

from .errors import BoundsError, ContractViolation, OverlapError, PositionError, RuleViolation


class Player(enum.Enum):
    """The two sides: the Duke mover and the stone player."""

    DUKE = "D"
    GO = "G"

    @property
    def opponent(self) -> "Player":
        return Player.GO if self is Player.DUKE else Player.DUKE


class Direction(enum.Enum):
    """Orthogonal step directions, with row/col deltas."""

    N = (-1, 0)
    S = (1, 0)
    E = (0, 1)
    W = (0, -1)

    @property
    def dr(self) -> int:
        return self.value[0]

    @property
    def dc(self) -> int:
        return self.value[1]

    @property
    def opposite(self) -> "Direction":
        return _OPPOSITE[self]


_OPPOSITE = {
    Direction.N: Direction.S,
    Direction.S: Direction.N,
    Direction.E: Direction.W,
    Direction.W: Direction.E,
}


class Square(NamedTuple):
    row: int
    col: int

    def step(self, direction: Direction) -> "Square":
        return Square(self.row + direction.dr, self.col + direction.dc)


class Dims(NamedTuple):
    rows: int
    cols: int

    def contains(self, sq: Square) -> bool:
        return 1 <= sq.row <= self.rows and 1 <= sq.col <= self.cols

    def is_edge(self, sq: Square) -> bool:
        return sq.row in (1, self.rows) or sq.col in (1, self.cols)

    def squares(self) -> Iterator[Square]:
        """All squares in row-major order."""
        for r in range(1, self.rows + 1):
            for c in range(1, self.cols + 1):
                yield Square(r, c)

    def index(self, sq: Square) -> int:
        """Row-major 0-based index of a square."""
        return (sq.row - 1) * self.cols + (sq.col - 1)

    def square(self, idx: int) -> Square:
        r, c = divmod(idx, self.cols)
        return Square(r + 1, c + 1)


class _Unlimited:
    """Sentinel for an effectively unlimited black-stone supply.

    Concretely this stands for rows*cols - 1 stones, enough to cover every
    square except the Duke's, so the supply can never run out in play.
    """

    _instance: "_Unlimited | None" = None

    def __new__(cls) -> "_Unlimited":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNLIMITED"


UNLIMITED = _Unlimited()


class Inventory(NamedTuple):
    """Stones still in hand.  White stones are always a bounded count."""

    whites_in_hand: int
    blacks_in_hand: Union[int, _Unlimited]


class TerminalStatus(enum.Enum):
    ONGOING = "ongoing"
    D_WIN = "d-win"
    G_WIN_IMMOBILIZED = "g-win-immobilized"


@dataclass(frozen=True)
class DukeStep:
    direction: Direction


@dataclass(frozen=True)
class PlaceBlack:
    to: Square


@dataclass(frozen=True)
class PlaceWhite:
    to: Square


@dataclass(frozen=True)
class RelocateWhite:
    src: Square
    to: Square


@dataclass(frozen=True)
class Pass:
    pass


Move = Union[DukeStep, PlaceBlack, PlaceWhite, RelocateWhite, Pass]


@dataclass(frozen=True)
class Position:
    """Full game state: board, pieces, side to move and remaining stones."""

    dims: Dims
    duke: Square
    blacks: frozenset[Square]
    whites: frozenset[Square]
    to_move: Player
    inventory: Inventory

    def __post_init__(self) -> None:
        dims = self.dims
        if dims.rows < 1 or dims.cols < 1:
            raise PositionError(f"invalid dims {dims.rows}x{dims.cols}")
        if not dims.contains(self.duke):
            raise BoundsError(f"duke off board at {self.duke}")
        for sq in self.blacks:
            if not dims.contains(sq):
                raise BoundsError(f"black stone off board at {sq}")
        for sq in self.whites:
            if not dims.contains(sq):
                raise BoundsError(f"white stone off board at {sq}")
        if self.duke in self.blacks or self.duke in self.whites:
            raise OverlapError(f"stone on the duke's square {self.duke}")
        clash = self.blacks & self.whites
        if clash:
            raise OverlapError(f"black and white stones share {min(clash)}")
        if self.inventory.whites_in_hand < 0:
            raise PositionError("negative white hand")
        blacks_hand = self.inventory.blacks_in_hand
        if isinstance(blacks_hand, int) and blacks_hand < 0:
            raise PositionError("negative black hand")
        if blacks_hand is UNLIMITED and self.white_budget != 0:
            raise PositionError("unlimited blacks are only valid with no white stones")

    @property
    def is_bounded(self) -> bool:
        """True for the bounded-inventory variant (relocation and pass exist)."""
        return self.inventory.blacks_in_hand is not UNLIMITED

    @property
    def white_budget(self) -> int:
        return self.inventory.whites_in_hand + len(self.whites)

    @property
    def black_budget(self) -> Union[int, _Unlimited]:
        hand = self.inventory.blacks_in_hand
        if hand is UNLIMITED:
            return UNLIMITED
        return hand + len(self.blacks)

    @property
    def occupied(self) -> frozenset[Square]:
        return self.blacks | self.whites

    def is_empty(self, sq: Square) -> bool:
        return sq != self.duke and sq not in self.blacks and sq not in self.whites


def duke_start(dims: Dims) -> Square:
    """Starting square: the southernmost and easternmost of the central squares."""
    if dims.rows < 1 or dims.cols < 1:
        raise ContractViolation(f"invalid dims {dims}")
    return Square(dims.rows // 2 + 1, dims.cols // 2 + 1)


def initial_position(
    dims: Dims,
    whites: int = 0,
    blacks: Union[int, _Unlimited] = UNLIMITED,
    first: Player = Player.GO,
) -> Position:
    """The start-of-game position with all stones in hand."""
    return Position(
        dims=dims,
        duke=duke_start(dims),
        blacks=frozenset(),
        whites=frozenset(),
        to_move=first,
        inventory=Inventory(whites_in_hand=whites, blacks_in_hand=blacks),
    )


def terminal_status(p: Position) -> TerminalStatus:
    if p.dims.is_edge(p.duke):
        return TerminalStatus.D_WIN
    if p.to_move is Player.DUKE and not duke_steps(p):
        return TerminalStatus.G_WIN_IMMOBILIZED
    return TerminalStatus.ONGOING


def duke_steps(p: Position) -> list[DukeStep]:
    """Duke steps to in-bounds empty squares, in N,S,E,W order."""
    out = []
    for d in Direction:
        tgt = p.duke.step(d)
        if p.dims.contains(tgt) and tgt not in p.blacks and tgt not in p.whites:
            out.append(DukeStep(d))
    return out


def legal_moves(p: Position) -> list[Move]:
    """All legal moves for the side to move, in deterministic order.

    Duke: steps in N,S,E,W order.  Stone player, bounded variant: white
    placements, black placements, relocations, pass; targets row-major.
    Standard variant: black placement on every empty square.
    """
    if terminal_status(p) is not TerminalStatus.ONGOING:
        raise ContractViolation("legal_moves called on a terminal position")
    if p.to_move is Player.DUKE:
        return list(duke_steps(p))
    empties = [sq for sq in p.dims.squares() if p.is_empty(sq)]
    if not p.is_bounded:
        return [PlaceBlack(sq) for sq in empties]
    moves: list[Move] = []
    if p.inventory.whites_in_hand > 0:
        moves.extend(PlaceWhite(sq) for sq in empties)
    blacks_hand = p.inventory.blacks_in_hand
    if isinstance(blacks_hand, int) and blacks_hand > 0:
        moves.extend(PlaceBlack(sq) for sq in empties)
    for src in sorted(p.whites):
        moves.extend(RelocateWhite(src, tgt) for tgt in empties)
    moves.append(Pass())
    return moves


def apply_move(p: Position, mv: Move) -> Position:
    """Apply a move, returning the new position; the input is unchanged.

    Raises RuleViolation with the violated rule when the move is illegal.
    """
    if isinstance(mv, DukeStep):
        if p.to_move is not Player.DUKE:
            raise RuleViolation("duke steps are only legal on the duke's turn")
        tgt = p.duke.step(mv.direction)
        if not p.dims.contains(tgt):
            raise RuleViolation(f"duke step {mv.direction.name} leaves the board")
        if tgt in p.blacks or tgt in p.whites:
            raise RuleViolation(f"duke step {mv.direction.name} onto an occupied square")
        return replace(p, duke=tgt, to_move=Player.GO)

    if p.to_move is not Player.GO:
        raise RuleViolation("stone moves are only legal on the stone player's turn")
    if p.dims.is_edge(p.duke):
        raise RuleViolation("the game is already over")

    if isinstance(mv, PlaceBlack):
        hand = p.inventory.blacks_in_hand
        if isinstance(hand, int) and hand <= 0:
            raise RuleViolation("no black stones left in hand")
        _require_empty(p, mv.to, "black stone placement")
        new_hand = hand if hand is UNLIMITED else hand - 1
        return replace(
            p,
            blacks=p.blacks | {mv.to},
            to_move=Player.DUKE,
            inventory=p.inventory._replace(blacks_in_hand=new_hand),
        )

    if isinstance(mv, PlaceWhite):
        if not p.is_bounded:
            raise RuleViolation("white stones do not exist in the standard game")
        if p.inventory.whites_in_hand <= 0:
            raise RuleViolation("no white stones left in hand")
        _require_empty(p, mv.to, "white stone placement")
        return replace(
            p,
            whites=p.whites | {mv.to},
            to_move=Player.DUKE,
            inventory=p.inventory._replace(whites_in_hand=p.inventory.whites_in_hand - 1),
        )

    if isinstance(mv, RelocateWhite):
        if not p.is_bounded:
            raise RuleViolation("relocation exists only in the bounded variant")
        if mv.src not in p.whites:
            raise RuleViolation(f"no white stone to move at {mv.src}")
        _require_empty(p, mv.to, "white stone relocation")
        return replace(p, whites=(p.whites - {mv.src}) | {mv.to}, to_move=Player.DUKE)

    if isinstance(mv, Pass):
        if not p.is_bounded:
            raise RuleViolation("passing exists only in the bounded variant")
        return replace(p, to_move=Player.DUKE)

    raise RuleViolation(f"unknown move {mv!r}")


def _require_empty(p: Position, sq: Square, what: str) -> None:
    if not p.dims.contains(sq):
        raise RuleViolation(f"{what} off the board at {sq}")
    if sq == p.duke:
        raise RuleViolation(f"{what} onto the duke's square")
    if sq in p.blacks or sq in p.whites:
        raise RuleViolation(f"{what} onto an occupied square {sq}")


class BoardTransform:
    """One element of the board's symmetry group.

    Applied as: optional transpose first (square boards only), then row and
    column flips in the resulting frame.
    """

    def __init__(self, dims: Dims, transpose: bool, flip_rows: bool, flip_cols: bool) -> None:
        self.dims = dims
        self.transpose = transpose
        self.flip_rows = flip_rows
        self.flip_cols = flip_cols

    @property
    def name(self) -> str:
        parts = []
        if self.transpose:
            parts.append("t")
        if self.flip_rows:
            parts.append("fr")
        if self.flip_cols:
            parts.append("fc")
        return "+".join(parts) or "id"

    def apply_square(self, sq: Square) -> Square:
        r, c = sq
        if self.transpose:
            r, c = c, r
        if self.flip_rows:
            r = self.dims.rows + 1 - r
        if self.flip_cols:
            c = self.dims.cols + 1 - c
        return Square(r, c)

    def apply_direction(self, d: Direction) -> Direction:
        dr, dc = d.dr, d.dc
        if self.transpose:
            dr, dc = dc, dr
        if self.flip_rows:
            dr = -dr
        if self.flip_cols:
            dc = -dc
        return next(x for x in Direction if (x.dr, x.dc) == (dr, dc))

    def apply_position(self, p: Position) -> Position:
        return replace(
            p,
            duke=self.apply_square(p.duke),
            blacks=frozenset(self.apply_square(s) for s in p.blacks),
            whites=frozenset(self.apply_square(s) for s in p.whites),
        )

    def inverse(self) -> "BoardTransform":
        if not self.transpose:
            return self
        # transpose-then-flip inverts to flip-swapped-then-transpose, which on
        # square boards equals transpose-then-swapped-flips
        return BoardTransform(self.dims, True, self.flip_cols, self.flip_rows)


def symmetry_group(dims: Dims) -> list[BoardTransform]:
    """The board's symmetry group: 4 elements, 8 when the board is square."""
    out = []
    transposes = (False, True) if dims.rows == dims.cols else (False,)
    for t in transposes:
        for fr in (False, True):
            for fc in (False, True):
                out.append(BoardTransform(dims, t, fr, fc))
    return out


def _orbit_key(p: Position) -> tuple:
    return (p.duke, tuple(sorted(p.blacks)), tuple(sorted(p.whites)))


def canonicalize(p: Position) -> Position:
    """The lexicographically least position over the board's symmetry group."""
    best = p
    best_key = _orbit_key(p)
    for tr in symmetry_group(p.dims):
        cand = tr.apply_position(p)
        key = _orbit_key(cand)
        if key < best_key:
            best, best_key = cand, key
    return best
