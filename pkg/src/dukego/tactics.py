"""Named Duke-side tactics, opening rules and the composite Duke policy.

Three families of forced wins drive the Duke's play:

* Imminent Win: the Duke sits one line from an edge and the two lines
  nearest that edge hold at most one stone.  The blocker directly between
  Duke and edge must be renewed every single turn, so the stone player can
  never spare a move to bar the Duke's run along the line.
* Corner Win: the Duke sits two lines from one edge and three from an
  adjacent edge with the corner region clear; two scripted steps convert it
  into an Imminent Win on one of the two edges.
* Fantastic Imminent Win: with at most two wandering stones (plus at most
  one blocking stone) in play, the Duke picks a direction, pretends the next
  line over is the edge, and repeats; each fantasy win descends one line
  until the edge is real.

``duke_policy`` composes these with solver lookups and a greedy fallback
into a total policy for any ongoing Duke-to-move position.  Episodes carry
the one piece of memory the tactics need (the committed run direction) in a
small token owned by the caller.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .board import (
    Dims,
    Direction,
    DukeStep,
    Move,
    Player,
    Position,
    Square,
    TerminalStatus,
    apply_move,
    duke_start,
    legal_moves,
    symmetry_group,
    terminal_status,
)
from .errors import ContractViolation, TacticFailure
from .solver import Label, SolveResult, best_move

# tie-break order used throughout the tactics
_EDGE_ORDER = (Direction.S, Direction.E, Direction.N, Direction.W)


class TacticKind(enum.Enum):
    IMMINENT_WIN = "ImminentWin"
    CORNER_WIN = "CornerWin"
    FANTASTIC = "Fantastic"


@dataclass(frozen=True)
class TacticReport:
    """Which tactic applies, and how the board is oriented for it.

    ``orientation`` is the edge letter for an Imminent Win ("S"), the
    primary-then-secondary edge letters for a Corner Win ("SE" = two lines
    from south, three from east), or the descent direction for a Fantastic
    episode.  ``running_direction`` is the committed run along the line,
    once known.  ``fantasy_line`` is the row or column index currently
    treated as the edge by a Fantastic episode.
    """

    kind: TacticKind
    orientation: str
    running_direction: Direction | None = None
    fantasy_line: int | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "orientation": self.orientation,
            "direction": self.running_direction.name if self.running_direction else None,
        }


class _EdgeFrame:
    """Coordinate helpers for one edge of the board."""

    def __init__(self, dims: Dims, edge: Direction) -> None:
        self.dims = dims
        self.edge = edge
        self.toward = edge

    def dist(self, sq: Square) -> int:
        if self.edge is Direction.S:
            return self.dims.rows - sq.row
        if self.edge is Direction.N:
            return sq.row - 1
        if self.edge is Direction.E:
            return self.dims.cols - sq.col
        return sq.col - 1

    def along(self, sq: Square) -> int:
        """Coordinate along the edge (column for N/S, row for E/W)."""
        return sq.col if self.edge in (Direction.N, Direction.S) else sq.row

    @property
    def positive_run(self) -> Direction:
        """Deterministic default run direction along this edge's lines."""
        return Direction.E if self.edge in (Direction.N, Direction.S) else Direction.S

    @property
    def negative_run(self) -> Direction:
        return Direction.W if self.edge in (Direction.N, Direction.S) else Direction.N


def _stones(p: Position) -> Iterable[Square]:
    return p.blacks | p.whites


def detect_imminent_win(p: Position) -> TacticReport | None:
    """Duke one line from an edge, at most one stone in the two nearest lines.

    Holds for either side to move.  The run direction is filled in when the
    zone already pins it down (a single stone not directly in the Duke's
    path); otherwise it is committed on the first running move.
    """
    for edge in _EDGE_ORDER:
        frame = _EdgeFrame(p.dims, edge)
        if frame.dist(p.duke) != 1:
            continue
        zone = [s for s in _stones(p) if frame.dist(s) <= 1]
        if len(zone) > 1:
            continue
        running = None
        if zone and frame.along(zone[0]) != frame.along(p.duke):
            away = frame.along(zone[0]) < frame.along(p.duke)
            running = frame.positive_run if away else frame.negative_run
        return TacticReport(TacticKind.IMMINENT_WIN, edge.name, running_direction=running)
    return None


def imminent_win_move(p: Position, report: TacticReport) -> Move:
    """Next Duke move of an Imminent Win episode.

    Steps onto the edge when the square toward it is open, else runs along
    the line in the committed direction (committing one now if needed,
    away from the unique stone that is not directly in the path).
    """
    frame = _EdgeFrame(p.dims, Direction[report.orientation])
    if frame.dist(p.duke) != 1:
        raise TacticFailure("duke is no longer one line from the edge")
    win_sq = p.duke.step(frame.toward)
    if p.is_empty(win_sq):
        return DukeStep(frame.toward)
    run = report.running_direction
    if run is None:
        loose = [
            s
            for s in _stones(p)
            if frame.dist(s) <= 1 and frame.along(s) != frame.along(p.duke)
        ]
        if len(loose) > 1:
            raise TacticFailure("several stones block the running line")
        if loose:
            away = frame.along(loose[0]) < frame.along(p.duke)
            run = frame.positive_run if away else frame.negative_run
        else:
            run = frame.positive_run
    tgt = p.duke.step(run)
    if not p.dims.contains(tgt) or not p.is_empty(tgt):
        raise TacticFailure(f"running square {tgt} is not open")
    return DukeStep(run)


_CORNER_ORIENTATIONS = (
    (Direction.S, Direction.E),
    (Direction.S, Direction.W),
    (Direction.N, Direction.E),
    (Direction.N, Direction.W),
    (Direction.E, Direction.S),
    (Direction.E, Direction.N),
    (Direction.W, Direction.S),
    (Direction.W, Direction.N),
)


def detect_corner_win(p: Position) -> TacticReport | None:
    """Duke at the (2,3) offset from a corner with the corner region clear.

    The region is the two lines nearest each of the corner's edges plus the
    square adjacent to the Duke toward the far edge.  Needs at least a 5x5
    board.  Holds for either side to move.
    """
    if min(p.dims.rows, p.dims.cols) < 5:
        return None
    stones = list(_stones(p))
    for primary, secondary in _CORNER_ORIENTATIONS:
        pf = _EdgeFrame(p.dims, primary)
        sf = _EdgeFrame(p.dims, secondary)
        if pf.dist(p.duke) != 2 or sf.dist(p.duke) != 3:
            continue
        if any(pf.dist(s) <= 1 or sf.dist(s) <= 1 for s in stones):
            continue
        if not p.is_empty(p.duke.step(sf.toward)):
            continue
        return TacticReport(TacticKind.CORNER_WIN, primary.name + secondary.name)
    return None


def corner_win_move(p: Position, report: TacticReport) -> Move:
    """Next Duke move of a Corner Win episode (two scripted steps).

    From the corner spot: step toward the near edge if open (an Imminent Win
    there), else toward the far edge.  One square later: step toward the far
    edge if open, else back toward the near edge; either way the Duke lands
    in an Imminent Win.
    """
    primary = Direction[report.orientation[0]]
    secondary = Direction[report.orientation[1]]
    pf = _EdgeFrame(p.dims, primary)
    sf = _EdgeFrame(p.dims, secondary)
    pd, sd = pf.dist(p.duke), sf.dist(p.duke)
    if (pd, sd) == (2, 3):
        if p.is_empty(p.duke.step(pf.toward)):
            return DukeStep(pf.toward)
        tgt = p.duke.step(sf.toward)
        if not p.is_empty(tgt):
            raise TacticFailure("both scripted squares are blocked")
        return DukeStep(sf.toward)
    if (pd, sd) == (2, 2):
        if p.is_empty(p.duke.step(sf.toward)):
            return DukeStep(sf.toward)
        tgt = p.duke.step(pf.toward)
        if not p.is_empty(tgt):
            raise TacticFailure("both scripted squares are blocked")
        return DukeStep(pf.toward)
    raise TacticFailure("duke is outside the corner script")


def fantastic_direction(p: Position) -> Direction:
    """Descent direction for the Fantastic Imminent Win.

    Only meaningful with at most two wandering stones and at most one
    blocking stone in the game.  With the black stone on the board, pick the
    first direction whose open half-board beyond the Duke excludes it;
    otherwise the first direction whose band (the Duke's line plus the next
    line over) holds at most one stone.
    """
    if not p.is_bounded:
        raise ContractViolation("fantastic play needs the bounded variant")
    blacks_total = p.black_budget
    if p.white_budget > 2 or not isinstance(blacks_total, int) or blacks_total > 1:
        raise ContractViolation("fantastic play needs budgets of at most 2W+1B")
    if p.blacks:
        (black,) = p.blacks
        for d in _EDGE_ORDER:
            if not _strictly_ahead(p.duke, black, d):
                return d
        raise AssertionError("unreachable: a stone cannot be ahead in all directions")
    for d in _EDGE_ORDER:
        if _band_count(p, d) <= 1:
            return d
    raise AssertionError("unreachable: two stones cannot crowd all four bands")


def _strictly_ahead(duke: Square, sq: Square, d: Direction) -> bool:
    if d is Direction.S:
        return sq.row > duke.row
    if d is Direction.N:
        return sq.row < duke.row
    if d is Direction.E:
        return sq.col > duke.col
    return sq.col < duke.col


def _band_count(p: Position, d: Direction) -> int:
    rows = {p.duke.row, p.duke.row + d.dr}
    cols = {p.duke.col, p.duke.col + d.dc}
    n = 0
    for s in _stones(p):
        if d.dr != 0 and s.row in rows:
            n += 1
        elif d.dc != 0 and s.col in cols:
            n += 1
    return n


def _fantastic_line(p: Position, d: Direction) -> int:
    return p.duke.row + d.dr if d.dr != 0 else p.duke.col + d.dc


def _fantastic_move(p: Position, episode: "Episode | None") -> tuple[Move, "Episode"]:
    """One move of a Fantastic episode; commits and carries the directions."""
    d = episode.direction if episode else None
    run = episode.running if episode else None
    if d is not None and p.blacks:
        (black,) = p.blacks
        if _strictly_ahead(p.duke, black, d):
            d = None  # the blocking stone landed ahead: rotate once
    if d is None:
        d = fantastic_direction(p)
        run = None
    frame = _EdgeFrame(p.dims, d)
    tgt = p.duke.step(d)
    if p.dims.contains(tgt) and p.is_empty(tgt):
        # descend one line; the run restarts on the new line
        ep = Episode(TacticKind.FANTASTIC, d.name, direction=d, running=None)
        return DukeStep(d), ep
    if run is None:
        band_rows = {p.duke.row, p.duke.row + d.dr}
        band_cols = {p.duke.col, p.duke.col + d.dc}
        in_band = [
            s
            for s in _stones(p)
            if (d.dr != 0 and s.row in band_rows) or (d.dc != 0 and s.col in band_cols)
        ]
        loose = [s for s in in_band if frame.along(s) != frame.along(p.duke)]
        black_loose = [s for s in loose if s in p.blacks]
        steer = black_loose or loose
        if len(steer) > 1 and len(set(frame.along(s) < frame.along(p.duke) for s in steer)) > 1:
            raise TacticFailure("stones pin both running directions")
        if steer:
            away = frame.along(steer[0]) < frame.along(p.duke)
            run = frame.positive_run if away else frame.negative_run
        else:
            run = frame.positive_run
    rtg = p.duke.step(run)
    if not p.dims.contains(rtg) or not p.is_empty(rtg):
        raise TacticFailure(f"fantastic run square {rtg} is not open")
    ep = Episode(TacticKind.FANTASTIC, d.name, direction=d, running=run)
    return DukeStep(run), ep


@dataclass(frozen=True)
class Episode:
    """Caller-owned memory for a running tactic.

    ``direction`` is the Imminent Win run or the Fantastic descent;
    ``running`` is the Fantastic run along the current line.  ``kind`` may
    also be the string "solver": after a tactic episode breaks down the
    policy stays with solver play, whose win distances strictly decrease,
    rather than oscillating back into tactic stages.
    """

    kind: TacticKind | str
    orientation: str
    direction: Direction | None = None
    running: Direction | None = None

    def as_report(self) -> TacticReport:
        if not isinstance(self.kind, TacticKind):
            raise ContractViolation("a solver-locked episode has no tactic report")
        if self.kind is TacticKind.FANTASTIC:
            return TacticReport(self.kind, self.orientation, running_direction=self.running)
        return TacticReport(self.kind, self.orientation, running_direction=self.direction)


SOLVER_LOCK = Episode(kind="solver", orientation="")


@dataclass(frozen=True)
class PolicyDecision:
    move: Move
    episode: Episode | None
    rationale: str
    report: TacticReport | None = None


def decide(
    p: Position,
    episode: Episode | None = None,
    solve: SolveResult | None = None,
) -> PolicyDecision:
    """Pick the Duke's move for an ongoing Duke-to-move position.

    Stage order: edge step, Imminent Win, Corner Win, opening rules,
    Fantastic Imminent Win, solver lookup, greedy march to the nearest
    reachable edge.  Always returns a legal move.
    """
    if p.to_move is not Player.DUKE:
        raise ContractViolation("duke policy called with the stone player to move")
    if terminal_status(p) is not TerminalStatus.ONGOING:
        raise ContractViolation("duke policy called on a terminal position")

    for d in _EDGE_ORDER:
        tgt = p.duke.step(d)
        if p.dims.contains(tgt) and p.is_empty(tgt) and p.dims.is_edge(tgt):
            return PolicyDecision(DukeStep(d), None, "EdgeStep")

    locked = episode is not None and episode.kind == "solver"
    if not locked:
        mv_ep = _try_imminent(p, episode)
        if mv_ep:
            return mv_ep
        mv_ep = _try_corner(p, episode)
        if mv_ep:
            return mv_ep
        if episode is None:
            mv_ep = _try_opening(p)
            if mv_ep:
                return mv_ep
        blacks_total = p.black_budget
        if (
            p.is_bounded
            and p.white_budget <= 2
            and isinstance(blacks_total, int)
            and blacks_total <= 1
        ):
            try:
                ep_in = episode if episode and episode.kind is TacticKind.FANTASTIC else None
                mv, ep = _fantastic_move(p, ep_in)
                final = TacticReport(
                    TacticKind.FANTASTIC,
                    ep.direction.name,
                    running_direction=ep.running,
                    fantasy_line=_fantastic_line(p, ep.direction),
                )
                return PolicyDecision(mv, ep, f"Fantastic({ep.direction.name})", report=final)
            except TacticFailure:
                pass
    if solve is not None and _in_space(solve, p):
        mv = best_move(solve, p)
        lab = solve.label(p)
        dist = solve.distance(p)
        tag = "D-win" if lab == Label.D_WIN else ("draw" if lab == Label.DRAW else "G-win")
        extra = f",dist={dist}" if dist is not None else ""
        return PolicyDecision(mv, SOLVER_LOCK, f"Solver({tag}{extra})")
    return PolicyDecision(_greedy_move(p), episode if locked else None, "Greedy")


def duke_policy(
    p: Position,
    episode: Episode | None = None,
    solve: SolveResult | None = None,
) -> Move:
    """The move alone; see ``decide`` for the move plus episode token."""
    return decide(p, episode=episode, solve=solve).move


def _try_imminent(p: Position, episode: Episode | None) -> PolicyDecision | None:
    candidates: list[TacticReport] = []
    if episode and episode.kind is TacticKind.IMMINENT_WIN:
        frame = _EdgeFrame(p.dims, Direction[episode.orientation])
        if frame.dist(p.duke) == 1:
            candidates.append(episode.as_report())
    fresh = detect_imminent_win(p)
    if fresh and (not candidates or fresh.orientation != candidates[0].orientation):
        candidates.append(fresh)
    for report in candidates:
        try:
            mv = imminent_win_move(p, report)
        except TacticFailure:
            continue
        committed = report.running_direction
        if committed is None and isinstance(mv, DukeStep):
            frame = _EdgeFrame(p.dims, Direction[report.orientation])
            if mv.direction is not frame.toward:
                committed = mv.direction
        ep = Episode(TacticKind.IMMINENT_WIN, report.orientation, direction=committed)
        final = TacticReport(
            TacticKind.IMMINENT_WIN, report.orientation, running_direction=committed
        )
        return PolicyDecision(mv, ep, f"ImminentWin({report.orientation})", report=final)
    return None


def _try_corner(p: Position, episode: Episode | None) -> PolicyDecision | None:
    report = None
    if episode and episode.kind is TacticKind.CORNER_WIN:
        report = episode.as_report()
    if report is None:
        report = detect_corner_win(p)
    if report is None:
        return None
    try:
        mv = corner_win_move(p, report)
    except TacticFailure:
        return None
    ep = Episode(TacticKind.CORNER_WIN, report.orientation)
    return PolicyDecision(mv, ep, f"CornerWin({report.orientation})", report=report)


def _try_opening(p: Position) -> PolicyDecision | None:
    """The scripted first moves: empty board, or the odd-square reply."""
    if p.duke != duke_start(p.dims):
        return None
    stones = p.blacks | p.whites
    if not stones:
        dists = [( _EdgeFrame(p.dims, d).dist(p.duke), i, d) for i, d in enumerate(_EDGE_ORDER)]
        _, _, d = min(dists)
        tgt = p.duke.step(d)
        if not p.dims.contains(tgt) or not p.is_empty(tgt):
            return None
        rationale, report = _opening_rationale(p, d)
        return PolicyDecision(DukeStep(d), None, rationale, report=report)
    if (
        len(p.blacks) == 1
        and not p.whites
        and p.dims.rows == p.dims.cols
        and p.dims.rows % 2 == 1
    ):
        # the single-stone reply assumes a permanent stone; a wandering one
        # is the Fantastic stage's business
        (stone,) = p.blacks
        for tr in symmetry_group(p.dims):
            s = tr.apply_square(stone)
            if s.row < p.duke.row and s.col <= p.duke.col:
                d = tr.inverse().apply_direction(Direction.S)
                tgt = p.duke.step(d)
                if p.dims.contains(tgt) and p.is_empty(tgt):
                    rationale, report = _opening_rationale(p, d)
                    return PolicyDecision(DukeStep(d), None, rationale, report=report)
                return None
    return None


def _opening_rationale(p: Position, d: Direction) -> tuple[str, TacticReport | None]:
    after = apply_move(p, DukeStep(d))
    rep = detect_imminent_win(after) or detect_corner_win(after)
    if rep:
        return f"{rep.kind.value}({rep.orientation})", rep
    return "Opening", None


def _in_space(res: SolveResult, p: Position) -> bool:
    ix = res.indexer
    return (
        p.is_bounded
        and p.dims == ix.dims
        and p.white_budget == ix.white_budget
        and p.black_budget == ix.black_budget
    )


def _greedy_move(p: Position) -> Move:
    """Step along a shortest stone-free path to any edge; any step if none."""
    dims = p.dims
    dist = {}
    queue = deque()
    for sq in dims.squares():
        if dims.is_edge(sq) and p.is_empty(sq):
            dist[sq] = 0
            queue.append(sq)
    while queue:
        sq = queue.popleft()
        for d in _EDGE_ORDER:
            nb = sq.step(d)
            if dims.contains(nb) and nb not in dist and (p.is_empty(nb) or nb == p.duke):
                dist[nb] = dist[sq] + 1
                queue.append(nb)
    best = None
    for d in _EDGE_ORDER:
        tgt = p.duke.step(d)
        if not dims.contains(tgt) or not p.is_empty(tgt):
            continue
        score = dist.get(tgt)
        if score is not None and (best is None or score < best[0]):
            best = (score, d)
    if best:
        return DukeStep(best[1])
    for d in _EDGE_ORDER:
        tgt = p.duke.step(d)
        if dims.contains(tgt) and p.is_empty(tgt):
            return DukeStep(d)
    raise ContractViolation("no legal duke step; position should be terminal")


# -- exhaustive tactic verification -------------------------------------------


def flagged_state_mask(ix) -> np.ndarray:
    """(mn, S_w, S_b) mask of states where either detector fires.

    Pure arithmetic mirror of detect_imminent_win/detect_corner_win over a
    whole indexed space (detectors ignore the side to move).  Equivalence
    with the detectors themselves is pinned by exhaustive tests on small
    boards.
    """
    dims = ix.dims
    mn = ix.mn
    wt, bt = ix.whites, ix.blacks

    def zone_mask(squares: Iterable[Square]) -> tuple[np.uint64, np.uint64]:
        mask = 0
        for sq in squares:
            mask |= 1 << dims.index(sq)
        return np.uint64(mask & 0xFFFFFFFFFFFFFFFF), np.uint64(mask >> 64)

    def zone_counts(tables, lo, hi):
        return (
            np.bitwise_count(tables.bits_lo[: tables.size] & lo)
            + np.bitwise_count(tables.bits_hi[: tables.size] & hi)
        ).astype(np.int8)

    out = np.zeros((mn, wt.size, bt.size), dtype=bool)
    for edge in _EDGE_ORDER:
        frame = _EdgeFrame(dims, edge)
        zone = [sq for sq in dims.squares() if frame.dist(sq) <= 1]
        lo, hi = zone_mask(zone)
        cw = zone_counts(wt, lo, hi)
        cb = zone_counts(bt, lo, hi)
        few = (cw[:, None] + cb[None, :]) <= 1
        dukes = [dims.index(sq) for sq in dims.squares() if frame.dist(sq) == 1]
        out[dukes] |= few[None, :, :]
    if min(dims.rows, dims.cols) >= 5:
        for primary, secondary in _CORNER_ORIENTATIONS:
            pf = _EdgeFrame(dims, primary)
            sf = _EdgeFrame(dims, secondary)
            spot = next(
                (sq for sq in dims.squares() if pf.dist(sq) == 2 and sf.dist(sq) == 3),
                None,
            )
            if spot is None:
                continue
            region = [
                sq for sq in dims.squares() if pf.dist(sq) <= 1 or sf.dist(sq) <= 1
            ]
            region.append(spot.step(sf.toward))
            lo, hi = zone_mask(region)
            empty_w = zone_counts(wt, lo, hi) == 0
            empty_b = zone_counts(bt, lo, hi) == 0
            out[dims.index(spot)] |= empty_w[:, None] & empty_b[None, :]
    return out


def check_tactics_against_solver(res: SolveResult) -> dict[str, int]:
    """Every flagged state is a Duke win, and tactic moves stay wins.

    Exhaustive over the solved space: label check on all flagged states for
    both sides to move, plus a policy-move check on every flagged
    Duke-to-move state.  Raises AssertionError on any violation.
    """
    ix = res.indexer
    flagged = flagged_state_mask(ix)
    valid = ix.valid_mask()
    flagged &= valid
    n_flagged = int(flagged.sum())
    for turn in (0, 1):
        labels = res.labels[turn]
        bad = flagged & (labels != Label.D_WIN)
        assert not bad.any(), (
            f"{int(bad.sum())} flagged states are not Duke wins "
            f"(turn={'D' if turn == 0 else 'G'})"
        )

    s_w, s_b = ix.whites.size, ix.blacks.size
    checked = 0
    for duke, wr, br in zip(*np.nonzero(flagged)):
        idx = ((int(duke) * s_w + int(wr)) * s_b + int(br)) * 2  # Duke to move
        p = ix.position(idx)
        if terminal_status(p) is not TerminalStatus.ONGOING:
            continue
        mv = duke_policy(p, solve=res)
        succ = apply_move(p, mv)
        assert res.label(succ) == Label.D_WIN, f"policy left the attractor from {p}"
        checked += 1
    return {"flagged": n_flagged, "policy_checked": checked}


def replay_policy_exhaustive(
    res: SolveResult,
    starts: Iterable[Position],
    ply_cap: int,
) -> int:
    """Worst-case plies for the Duke policy to win against every reply.

    Explores all stone-player replies from each start with the policy
    answering for the Duke, sharing results across starts.  Raises
    AssertionError if any line leaves the Duke's attractor, exceeds the ply
    cap, or revisits a position with the same episode (a forced cycle).
    Returns the longest forced line seen, in plies.
    """
    ix = res.indexer
    memo: dict[tuple, int] = {}
    on_stack: set[tuple] = set()

    def plies_to_win(p: Position, episode: Episode | None) -> int:
        status = terminal_status(p)
        if status is TerminalStatus.D_WIN:
            return 0
        assert status is TerminalStatus.ONGOING, f"policy lost by immobilization: {p}"
        key = (ix.index(p), episode)
        if key in memo:
            return memo[key]
        assert key not in on_stack, f"policy cycles at {p}"
        on_stack.add(key)
        if p.to_move is Player.DUKE:
            decision = decide(p, episode=episode, solve=res)
            succ = apply_move(p, decision.move)
            assert res.label(succ) == Label.D_WIN, f"policy left the attractor from {p}"
            n = 1 + plies_to_win(succ, decision.episode)
        else:
            n = 1 + max(
                plies_to_win(apply_move(p, mv), episode) for mv in legal_moves(p)
            )
        on_stack.discard(key)
        assert n <= ply_cap, f"no win within {ply_cap} plies from {p}"
        memo[key] = n
        return n

    worst = 0
    for start in starts:
        assert res.label(start) == Label.D_WIN, f"start {start} is not a Duke win"
        worst = max(worst, plies_to_win(start, None))
    return worst
