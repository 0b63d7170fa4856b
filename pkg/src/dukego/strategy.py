"""Stone-player strategies: table-driven play, reductions, extraction, replay.

Three interchangeable stone players live here, all exposing ``start()`` and
``choose(position, token)``:

* ``TablePlayer`` reads a strategy diagram set, keeping the strategic
  squares of the Duke's current cell covered with one stone move per turn.
* ``MapPlayer`` plays a solver-extracted move map.
* ``ReductionPlayer`` shrinks an oversized board onto a base strategy after
  the Duke's first move (ignoring the line behind him), translating
  coordinates through the trim.

``extract_g_strategy`` builds a MapPlayer's map from a solved space;
``verify_g_strategy`` replays any of the players against every Duke line
and reports a verdict with a counterexample trace on failure.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .board import (
    Dims,
    Direction,
    Move,
    Pass,
    Player,
    PlaceBlack,
    PlaceWhite,
    Position,
    RelocateWhite,
    Square,
    TerminalStatus,
    apply_move,
    duke_start,
    duke_steps,
    terminal_status,
)
from .diagrams import DiagramSet
from .errors import ContractViolation, RuleViolation, StrategyFailure, UnsupportedBoardError
from .notation import format_dpn, format_move, parse_dpn, parse_move
from .solver import Label, SolveResult

logger = logging.getLogger(__name__)


class GPlayer(Protocol):
    """A deterministic stone player with an explicit, hashable state token."""

    def start(self) -> object: ...

    def choose(self, p: Position, token: object) -> tuple[Move, object]: ...


# -- table-driven play ---------------------------------------------------------


@dataclass(frozen=True)
class TableState:
    """Progress of table play: the active diagram and the letters covered."""

    active_diagram: int
    assignment: frozenset[tuple[str, Square]] = frozenset()
    opening_done: bool = False


def g_table_move(ds: DiagramSet, ts: TableState, p: Position) -> tuple[Move, TableState]:
    """One stone-player move read off the active diagram.

    The Duke's cell (after following any transition marked on it) names the
    strategic squares that must be covered, plus the tactical edge square on
    a ``+`` cell.  At most one may be uncovered; it is filled by placing the
    required colour, relocating a free white stone when the hand is empty,
    or failing loudly when no single move can cover it.
    """
    if p.to_move is not Player.GO:
        raise ContractViolation("g_table_move called on the duke's turn")
    if not p.is_bounded:
        raise ContractViolation("table strategies play the bounded variant")

    if (
        not ts.opening_done
        and ds.stipulated_first_move is not None
        and not p.blacks
        and not p.whites
    ):
        letter, colour = ds.stipulated_first_move
        diagram = ds.diagram(ds.start_diagram)
        sq = diagram.strategic_squares()[letter]
        mv: Move = PlaceBlack(sq) if colour == "b" else PlaceWhite(sq)
        new = TableState(
            active_diagram=ds.start_diagram,
            assignment=frozenset({(letter, sq)}),
            opening_done=True,
        )
        return mv, new

    diagram = ds.diagram(ts.active_diagram)
    hops = 0
    cell = diagram.cell(p.duke)
    while cell.transition is not None and cell.transition != diagram.id:
        diagram = ds.diagram(cell.transition)
        cell = diagram.cell(p.duke)
        hops += 1
        if hops > len(ds.diagrams):
            raise StrategyFailure("transition cycle between diagrams")
    if not cell.labeled:
        raise StrategyFailure(f"duke on unlabeled cell {p.duke} of diagram {diagram.id}")

    strategic = diagram.strategic_squares()
    shaded = {
        letter for letter, sq in strategic.items() if diagram.cell(sq).black_required
    }
    required: list[tuple[Square, bool]] = []
    for letter in sorted(cell.cover_letters):
        upper = letter.upper()
        required.append((strategic[upper], upper in shaded))
    if cell.tactical:
        required.append((_tactical_square(p), False))

    occupied = p.blacks | p.whites
    uncovered = [(sq, needs_black) for sq, needs_black in required if sq not in occupied]
    if len(uncovered) > 1:
        raise StrategyFailure(
            f"{len(uncovered)} uncovered requirements at {p.duke}: "
            + ", ".join(str(sq) for sq, _ in uncovered)
        )

    if uncovered:
        mv = _covering_move(p, uncovered[0], {sq for sq, _ in required})
    else:
        mv = Pass()
    after = apply_move(p, mv)
    assignment = frozenset(
        (letter, sq)
        for letter, sq in strategic.items()
        if sq in after.blacks or sq in after.whites
    )
    return mv, TableState(
        active_diagram=diagram.id,
        assignment=assignment,
        opening_done=True,
    )


def _tactical_square(p: Position) -> Square:
    near = []
    for d in Direction:
        tgt = p.duke.step(d)
        if p.dims.contains(tgt) and p.dims.is_edge(tgt):
            near.append(tgt)
    if len(near) != 1:
        raise StrategyFailure(
            f"tactical square ambiguous or missing for duke at {p.duke}"
        )
    return near[0]


def _covering_move(
    p: Position, need: tuple[Square, bool], required_squares: set[Square]
) -> Move:
    sq, needs_black = need
    blacks_hand = p.inventory.blacks_in_hand
    if needs_black:
        if isinstance(blacks_hand, int) and blacks_hand > 0:
            return PlaceBlack(sq)
        raise StrategyFailure(f"square {sq} needs a black stone but none remain")
    if p.inventory.whites_in_hand > 0:
        return PlaceWhite(sq)
    free = sorted(w for w in p.whites if w not in required_squares)
    if free:
        return RelocateWhite(free[0], sq)
    if isinstance(blacks_hand, int) and blacks_hand > 0:
        return PlaceBlack(sq)
    raise StrategyFailure(f"no stone available to cover {sq}")


def rotation_guard(ds: DiagramSet, p: Position) -> Move | None:
    """The 180-degree pretence after a northward first Duke move.

    When the Duke's first move went north and the only stone on board is the
    stipulated white first stone, the stone player may rotate her frame of
    reference instead of solving the north side separately: she moves the
    stone to the rotated image of its square (or passes when it is the fixed
    point).  Returns None when the trick does not apply.
    """
    if p.to_move is not Player.GO or ds.stipulated_first_move is None:
        return None
    if ds.stipulated_first_move[1] != "w":
        return None
    start = duke_start(p.dims)
    if p.duke != start.step(Direction.N):
        return None
    if p.blacks or len(p.whites) != 1:
        return None
    diagram = ds.diagram(ds.start_diagram)
    letter = ds.stipulated_first_move[0]
    sq = diagram.strategic_squares()[letter]
    if p.whites != frozenset({sq}):
        return None
    image = Square(p.dims.rows + 1 - sq.row, p.dims.cols + 1 - sq.col)
    if image == sq:
        return Pass()
    return RelocateWhite(sq, image)


class TablePlayer:
    """Plays a diagram set, handling the stipulated opening and rotation.

    The token is (TableState, frame) where frame is one of the board's
    half-turn frames: after a rotation the player reads the diagrams through
    the 180-degree map.
    """

    def __init__(self, ds: DiagramSet) -> None:
        self.ds = ds

    def start(self) -> tuple[TableState, bool]:
        return (TableState(active_diagram=self.ds.start_diagram), False)

    def choose(self, p: Position, token: tuple[TableState, bool]) -> tuple[Move, object]:
        ts, rotated = token
        guard = None if rotated else rotation_guard(self.ds, p)
        if guard is not None:
            return guard, (ts, True)
        view = _rot180_position(p) if rotated else p
        mv, ts2 = g_table_move(self.ds, ts, view)
        return (_rot180_move(p.dims, mv) if rotated else mv), (ts2, rotated)


def _rot180_square(dims: Dims, sq: Square) -> Square:
    return Square(dims.rows + 1 - sq.row, dims.cols + 1 - sq.col)


def _rot180_position(p: Position) -> Position:
    from dataclasses import replace

    return replace(
        p,
        duke=_rot180_square(p.dims, p.duke),
        blacks=frozenset(_rot180_square(p.dims, s) for s in p.blacks),
        whites=frozenset(_rot180_square(p.dims, s) for s in p.whites),
    )


def _rot180_move(dims: Dims, mv: Move) -> Move:
    if isinstance(mv, PlaceBlack):
        return PlaceBlack(_rot180_square(dims, mv.to))
    if isinstance(mv, PlaceWhite):
        return PlaceWhite(_rot180_square(dims, mv.to))
    if isinstance(mv, RelocateWhite):
        return RelocateWhite(_rot180_square(dims, mv.src), _rot180_square(dims, mv.to))
    return mv


# -- extracted strategy maps ---------------------------------------------------


@dataclass
class StrategyMap:
    """A total move map over the stone player's reachable winning region."""

    dims: Dims
    white_budget: int
    black_budget: int
    moves: dict[int, Move] = field(default_factory=dict)

    def dump(self) -> str:
        """Sorted (position, move) lines; loadable by StrategyMap.load."""
        from .indexer import StateIndexer

        ix = StateIndexer(self.dims, self.white_budget, self.black_budget)
        lines = []
        for idx in sorted(self.moves):
            lines.append(f"{format_dpn(ix.position(idx))}\t{format_move(self.moves[idx])}")
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str) -> "StrategyMap":
        from .indexer import StateIndexer

        moves: dict[int, Move] = {}
        ix = None
        out = None
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            dpn, mv_text = line.split("\t")
            p = parse_dpn(dpn)
            if ix is None:
                blacks_total = p.black_budget
                if not isinstance(blacks_total, int):
                    raise ContractViolation("strategy maps cover bounded spaces only")
                out = cls(p.dims, p.white_budget, blacks_total)
                ix = StateIndexer(p.dims, p.white_budget, blacks_total)
            moves[ix.index(p)] = parse_move(mv_text)
        if out is None:
            raise ContractViolation("empty strategy map")
        out.moves = moves
        return out


class MapPlayer:
    """Plays an extracted strategy map; stateless."""

    def __init__(self, smap: StrategyMap) -> None:
        self.smap = smap
        from .indexer import StateIndexer

        self.ix = StateIndexer(smap.dims, smap.white_budget, smap.black_budget)

    def start(self) -> object:
        return None

    def choose(self, p: Position, token: object) -> tuple[Move, object]:
        idx = self.ix.index(p)
        mv = self.smap.moves.get(idx)
        if mv is None:
            raise StrategyFailure(f"no mapping for {format_dpn(p)}")
        return mv, None


def extract_g_strategy(res: SolveResult, start: Position) -> StrategyMap:
    """A winning stone-player map from a solved space, closed under Duke play.

    From every reachable stone-player state the move with the lowest
    successor state index that stays outside the Duke's attractor is chosen;
    the map then covers all Duke replies transitively.
    """
    ix = res.indexer
    idx0 = ix.index(start)
    if res.label(start) == Label.D_WIN:
        raise ContractViolation("start position is a duke win; nothing to extract")
    wt, bt = ix.whites, ix.blacks
    s_w, s_b = wt.size, bt.size
    labels_d = res.labels[0]
    smap = StrategyMap(ix.dims, ix.white_budget, ix.black_budget)
    seen = (np.zeros((ix.mn, s_w, s_b), dtype=bool), np.zeros((ix.mn, s_w, s_b), dtype=bool))
    nbr = _neighbours(ix.dims)

    duke0, wr0, br0, turn0 = ix.components(idx0)
    stack = [(duke0, wr0, br0, turn0)]
    seen[turn0][duke0, wr0, br0] = True
    while stack:
        duke, wr, br, turn = stack.pop()
        if turn == 0:
            # duke to move: cover every step
            for tgt in nbr[duke]:
                if tgt < 0 or wt.member[tgt, wr] or bt.member[tgt, br]:
                    continue
                if ix.dims.is_edge(ix.dims.square(int(tgt))):
                    raise AssertionError("extraction entered a lost state")
                if not seen[1][tgt, wr, br]:
                    seen[1][tgt, wr, br] = True
                    stack.append((int(tgt), wr, br, 1))
            continue
        if ix.dims.is_edge(ix.dims.square(duke)):
            raise AssertionError("extraction entered a terminal duke win")
        mv, wr2, br2 = _choose_g_move(ix, labels_d, duke, wr, br)
        smap.moves[((duke * s_w + wr) * s_b + br) * 2 + 1] = mv
        if not seen[0][duke, wr2, br2]:
            seen[0][duke, wr2, br2] = True
            stack.append((duke, int(wr2), int(br2), 0))
    logger.info(
        "extracted %dx%d w=%d b=%d strategy: %d stone-player states",
        ix.dims.rows, ix.dims.cols, ix.white_budget, ix.black_budget, len(smap.moves),
    )
    return smap


def _neighbours(dims: Dims) -> np.ndarray:
    mn = dims.rows * dims.cols
    out = np.full((mn, 4), -1, dtype=np.int32)
    for i in range(mn):
        sq = dims.square(i)
        for j, d in enumerate(Direction):
            t = sq.step(d)
            if dims.contains(t):
                out[i, j] = dims.index(t)
    return out


def _choose_g_move(ix, labels_d, duke: int, wr: int, br: int):
    """Lowest-successor-index stone move staying outside the attractor."""
    wt, bt = ix.whites, ix.blacks
    empties = ~wt.member[:, wr] & ~bt.member[:, br]
    empties[duke] = False
    emp = np.flatnonzero(empties)

    cand_wr = [np.array([wr], dtype=np.int64)]
    cand_br = [np.array([br], dtype=np.int64)]
    builders = [("pass", None, None)]
    k_w = int(wt.sizes[wr])
    k_b = int(bt.sizes[br])
    if k_w < ix.white_budget and emp.size:
        cand_wr.append(wt.add[emp, wr].astype(np.int64))
        cand_br.append(np.full(emp.size, br, dtype=np.int64))
        builders.extend(("pw", int(q), None) for q in emp)
    if k_b < ix.black_budget and emp.size:
        cand_wr.append(np.full(emp.size, wr, dtype=np.int64))
        cand_br.append(bt.add[emp, br].astype(np.int64))
        builders.extend(("pb", int(q), None) for q in emp)
    if k_w and emp.size:
        sources = wt.unrank(wr)
        for j, src in enumerate(sources):
            base = int(wt.sub[wr, j])
            cand_wr.append(wt.add[emp, base].astype(np.int64))
            cand_br.append(np.full(emp.size, br, dtype=np.int64))
            builders.extend(("rw", int(q), src) for q in emp)
    wr_all = np.concatenate(cand_wr)
    br_all = np.concatenate(cand_br)
    ok = labels_d[duke, wr_all, br_all] != Label.D_WIN
    if not ok.any():
        raise AssertionError("no safe stone move; extraction start was mislabelled")
    keys = wr_all * ix.blacks.size + br_all
    keys[~ok] = np.iinfo(np.int64).max
    best = int(np.argmin(keys))
    kind, q, src = builders[best]
    if kind == "pass":
        mv: Move = Pass()
    elif kind == "pw":
        mv = PlaceWhite(ix.dims.square(q))
    elif kind == "pb":
        mv = PlaceBlack(ix.dims.square(q))
    else:
        mv = RelocateWhite(ix.dims.square(src), ix.dims.square(q))
    return mv, int(wr_all[best]), int(br_all[best])


# -- board reduction -----------------------------------------------------------


@dataclass(frozen=True)
class _Frame:
    """Affine map from real squares onto a base board."""

    dims: Dims
    base: Dims
    row_off: int
    col_off: int
    flip_rows: bool
    flip_cols: bool

    def to_base(self, sq: Square) -> Square:
        r = self.dims.rows - sq.row + 1 if self.flip_rows else sq.row
        c = self.dims.cols - sq.col + 1 if self.flip_cols else sq.col
        return Square(r - self.row_off, c - self.col_off)

    def from_base(self, sq: Square) -> Square:
        r = sq.row + self.row_off
        c = sq.col + self.col_off
        if self.flip_rows:
            r = self.dims.rows - r + 1
        if self.flip_cols:
            c = self.dims.cols - c + 1
        return Square(r, c)

    def contains(self, sq: Square) -> bool:
        b = self.to_base(sq)
        return 1 <= b.row <= self.base.rows and 1 <= b.col <= self.base.cols


class ReductionPlayer:
    """Adopts a base strategy on the sub-board left after the Duke commits.

    On a board larger than every base, the stone player passes until the
    Duke's first step, then ignores the line behind him (repeatedly, if one
    trim is not enough), and plays the matching base strategy on the rest.
    The base registry maps sub-board dims to stone players for them.
    """

    def __init__(self, dims: Dims, bases: dict[Dims, GPlayer]) -> None:
        self.dims = dims
        self.bases = bases

    def start(self) -> object:
        return ("await", None, None)

    def choose(self, p: Position, token: object) -> tuple[Move, object]:
        phase, frame, inner = token
        if phase == "await":
            if p.duke == duke_start(p.dims):
                if not p.is_bounded:
                    raise ContractViolation("reduction openings need the pass move")
                return Pass(), token
            frame, base_player = self._commit(p)
            inner = base_player.start()
            token = ("play", (frame, base_player), inner)
            phase = "play"
        frame_pair = token[1]
        frame, base_player = frame_pair
        view = self._project(p, frame)
        mv, inner2 = base_player.choose(view, token[2])
        return self._lift(mv, frame), ("play", frame_pair, inner2)

    def _commit(self, p: Position) -> tuple[_Frame, GPlayer]:
        start = duke_start(self.dims)
        delta = (p.duke.row - start.row, p.duke.col - start.col)
        directions = {(1, 0): Direction.S, (-1, 0): Direction.N, (0, 1): Direction.E, (0, -1): Direction.W}
        d = directions.get(delta)
        if d is None:
            raise UnsupportedBoardError(
                f"reduction expects the duke one step from {start}, found {p.duke}"
            )
        rows, cols = self.dims.rows, self.dims.cols
        row_off, col_off = 0, 0
        flip_rows = d is Direction.N
        flip_cols = d is Direction.W
        while True:
            # in flip-first coordinates the trimmed line is always line 1
            if d in (Direction.S, Direction.N):
                rows -= 1
                row_off += 1
            else:
                cols -= 1
                col_off += 1
            if rows < 1 or cols < 1:
                raise UnsupportedBoardError(
                    f"no base strategy reachable by trimming {self.dims.rows}x{self.dims.cols}"
                )
            base_dims = Dims(rows, cols)
            frame = _Frame(self.dims, base_dims, row_off, col_off, flip_rows, flip_cols)
            if base_dims in self.bases and frame.to_base(duke_start(self.dims).step(d)) == duke_start(base_dims):
                return frame, self.bases[base_dims]

    def _project(self, p: Position, frame: _Frame) -> Position:
        for s in p.blacks | p.whites:
            if not frame.contains(s):
                raise StrategyFailure(f"stone {s} outside the reduced board")
        if not frame.contains(p.duke):
            raise StrategyFailure(f"duke {p.duke} outside the reduced board")
        return Position(
            dims=frame.base,
            duke=frame.to_base(p.duke),
            blacks=frozenset(frame.to_base(s) for s in p.blacks),
            whites=frozenset(frame.to_base(s) for s in p.whites),
            to_move=p.to_move,
            inventory=p.inventory,
        )

    def _lift(self, mv: Move, frame: _Frame) -> Move:
        if isinstance(mv, PlaceBlack):
            return PlaceBlack(frame.from_base(mv.to))
        if isinstance(mv, PlaceWhite):
            return PlaceWhite(frame.from_base(mv.to))
        if isinstance(mv, RelocateWhite):
            return RelocateWhite(frame.from_base(mv.src), frame.from_base(mv.to))
        return mv


def reduction_move(p: Position, base: ReductionPlayer, token: object) -> tuple[Move, object]:
    """One reduction-strategy move; thin wrapper over the player's state."""
    return base.choose(p, token)


# -- exhaustive verification ---------------------------------------------------


@dataclass
class Verdict:
    g_wins: bool
    states: int
    counterexample: list[str] | None = None

    def __bool__(self) -> bool:
        return self.g_wins


def verify_g_strategy(
    player: GPlayer,
    start: Position,
    *,
    max_states: int = 20_000_000,
) -> Verdict:
    """Replay the stone player against every Duke line from ``start``.

    The strategy wins when no reachable state puts the Duke on an edge and
    the player always produces a legal move; revisited states close cycles,
    which are wins for the stone player.  On failure the verdict carries the
    line that breaks the strategy.
    """
    seen: set = set()
    parents: dict = {}
    root = (format_dpn(start), player.start())
    stack = [(start, root[1], root)]
    seen.add(root)
    states = 0

    def trace(key) -> list[str]:
        path = []
        while key is not None:
            prev = parents.get(key)
            if prev is None:
                path.append(key[0])
                break
            parent_key, mv = prev
            path.append(f"{key[0]}  (after {format_move(mv)})")
            key = parent_key
        return list(reversed(path))

    while stack:
        p, token, key = stack.pop()
        states += 1
        if states > max_states:
            raise ContractViolation(f"verification exceeded {max_states} states")
        status = terminal_status(p)
        if status is TerminalStatus.D_WIN:
            return Verdict(False, states, trace(key))
        if status is TerminalStatus.G_WIN_IMMOBILIZED:
            continue
        if p.to_move is Player.GO:
            try:
                mv, token2 = player.choose(p, token)
                succ = apply_move(p, mv)
            except (StrategyFailure, RuleViolation) as exc:
                return Verdict(False, states, trace(key) + [f"strategy failure: {exc}"])
            nxt = (format_dpn(succ), token2)
            if nxt not in seen:
                seen.add(nxt)
                parents[nxt] = (key, mv)
                stack.append((succ, token2, nxt))
            continue
        for mv in duke_steps(p):
            succ = apply_move(p, mv)
            nxt = (format_dpn(succ), token)
            if nxt not in seen:
                seen.add(nxt)
                parents[nxt] = (key, mv)
                stack.append((succ, token, nxt))
    return Verdict(True, states, None)
