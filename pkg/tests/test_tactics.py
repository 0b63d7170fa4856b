"""Tactic detectors, scripted moves, the Duke policy, and solver agreement."""

from __future__ import annotations

import random

import pytest

from dukego.board import (
    Dims,
    Direction,
    DukeStep,
    Inventory,
    Player,
    Position,
    Square,
    TerminalStatus,
    apply_move,
    initial_position,
    legal_moves,
    symmetry_group,
    terminal_status,
)
from dukego.errors import ContractViolation, TacticFailure
from dukego.tactics import (
    TacticKind,
    check_tactics_against_solver,
    corner_win_move,
    decide,
    detect_corner_win,
    detect_imminent_win,
    duke_policy,
    fantastic_direction,
    flagged_state_mask,
    imminent_win_move,
    replay_policy_exhaustive,
)

from conftest import random_position


def pos(dims, duke, blacks=(), whites=(), to_move=Player.GO, wh=3, bh=0):
    w_on = [Square(*s) for s in whites]
    b_on = [Square(*s) for s in blacks]
    return Position(
        dims=Dims(*dims),
        duke=Square(*duke),
        blacks=frozenset(b_on),
        whites=frozenset(w_on),
        to_move=to_move,
        inventory=Inventory(whites_in_hand=wh - len(w_on), blacks_in_hand=bh - len(b_on)),
    )


class TestImminentWin:
    def test_empty_board_south(self):
        p = pos((6, 9), (5, 4))
        rep = detect_imminent_win(p)
        assert rep is not None
        assert rep.kind is TacticKind.IMMINENT_WIN
        assert rep.orientation == "S"

    def test_two_zone_stones_kill_it(self):
        p = pos((6, 9), (5, 4), whites=[(6, 4), (5, 2)])
        assert detect_imminent_win(p) is None

    def test_single_zone_stone_ok(self):
        p = pos((6, 9), (5, 4), whites=[(6, 4)])
        rep = detect_imminent_win(p)
        assert rep is not None and rep.orientation == "S"

    def test_win_step_when_open(self):
        p = pos((6, 9), (5, 4), to_move=Player.DUKE)
        rep = detect_imminent_win(p)
        assert imminent_win_move(p, rep) == DukeStep(Direction.S)

    def test_runs_east_away_from_west_stone(self):
        p = pos((6, 9), (5, 4), whites=[(6, 4), (5, 2)], to_move=Player.DUKE)
        rep = detect_imminent_win(pos((6, 9), (5, 4), whites=[(5, 2)]))
        assert rep.running_direction is Direction.E
        assert imminent_win_move(p, rep) == DukeStep(Direction.E)

    def test_runs_west_away_from_east_stone(self):
        p = pos((6, 9), (5, 4), whites=[(6, 4), (5, 7)], to_move=Player.DUKE)
        rep = detect_imminent_win(pos((6, 9), (5, 4), whites=[(5, 7)]))
        assert rep.running_direction is Direction.W
        assert imminent_win_move(p, rep) == DukeStep(Direction.W)

    def test_failure_when_boxed(self):
        p = pos((6, 9), (5, 4), whites=[(6, 4), (5, 3), (5, 5)], to_move=Player.DUKE)
        rep = detect_imminent_win(pos((6, 9), (5, 4), whites=[(6, 4)]))
        with pytest.raises(TacticFailure):
            imminent_win_move(p, rep)


class TestCornerWin:
    def test_6x8_start(self):
        p = pos((6, 8), (4, 5))
        rep = detect_corner_win(p)
        assert rep is not None
        assert rep.kind is TacticKind.CORNER_WIN
        assert rep.orientation == "SE"

    def test_stone_in_south_band_kills_it(self):
        assert detect_corner_win(pos((6, 8), (4, 5), whites=[(5, 2)])) is None

    def test_stone_in_east_band_kills_it(self):
        assert detect_corner_win(pos((6, 8), (4, 5), whites=[(2, 7)])) is None

    def test_small_boards_never_flag(self):
        assert detect_corner_win(pos((4, 7), (2, 4))) is None

    def test_script_step_south_when_open(self):
        p = pos((6, 8), (4, 5), to_move=Player.DUKE)
        rep = detect_corner_win(p)
        assert corner_win_move(p, rep) == DukeStep(Direction.S)

    def test_script_step_east_when_blocked(self):
        p = pos((6, 8), (4, 5), whites=[(5, 5)], to_move=Player.DUKE)
        rep = detect_corner_win(pos((6, 8), (4, 5)))
        assert corner_win_move(p, rep) == DukeStep(Direction.E)

    def test_script_from_square_one(self):
        p = pos((6, 8), (4, 6), whites=[(5, 5), (4, 7)], to_move=Player.DUKE)
        rep = detect_corner_win(pos((6, 8), (4, 5)))
        assert corner_win_move(p, rep) == DukeStep(Direction.S)
        assert apply_move(p, DukeStep(Direction.S)).duke == Square(5, 6)


class TestFantasticDirection:
    def test_empty_board_default(self):
        p = pos((9, 9), (5, 5), wh=2, bh=0)
        assert fantastic_direction(p) is Direction.S

    def test_two_whites_crowd_south_and_east(self):
        p = pos((9, 9), (5, 5), whites=[(6, 5), (5, 6)], wh=2, bh=0)
        assert fantastic_direction(p) is Direction.N

    def test_black_to_the_north_means_south(self):
        p = pos((9, 9), (5, 5), blacks=[(3, 5)], wh=2, bh=1)
        assert fantastic_direction(p) is Direction.S

    def test_black_in_duke_row_excluded_by_half_board(self):
        p = pos((9, 9), (5, 5), blacks=[(5, 8)], wh=2, bh=1)
        assert fantastic_direction(p) is Direction.S

    def test_budget_contract(self):
        p = pos((9, 9), (5, 5), wh=3, bh=0)
        with pytest.raises(ContractViolation):
            fantastic_direction(p)


class TestDukePolicy:
    def test_6x9_opening_is_south(self):
        p = initial_position(Dims(6, 9), first=Player.DUKE)
        d = decide(p)
        assert d.move == DukeStep(Direction.S)
        assert d.rationale == "ImminentWin(S)"

    def test_8x8_opening_is_south(self):
        p = initial_position(Dims(8, 8), whites=3, blacks=0, first=Player.DUKE)
        d = decide(p)
        assert d.move == DukeStep(Direction.S)
        assert d.rationale == "CornerWin(SE)"

    def test_7x7_reply_to_northwest_stone(self):
        p = pos((7, 7), (4, 4), blacks=[(3, 3)], to_move=Player.DUKE, wh=0, bh=3)
        assert duke_policy(p) == DukeStep(Direction.S)

    def test_7x7_reply_steps_away_from_the_stone(self):
        base = pos((7, 7), (4, 4), blacks=[(3, 3)], to_move=Player.DUKE, wh=0, bh=3)
        for tr in symmetry_group(Dims(7, 7)):
            mapped = tr.apply_position(base)
            mv = duke_policy(mapped)
            assert isinstance(mv, DukeStep), tr.name
            (stone,) = mapped.blacks
            ahead = {
                Direction.S: stone.row > mapped.duke.row,
                Direction.N: stone.row < mapped.duke.row,
                Direction.E: stone.col > mapped.duke.col,
                Direction.W: stone.col < mapped.duke.col,
            }[mv.direction]
            assert not ahead, tr.name

    def test_policy_move_always_legal(self):
        rng = random.Random(5)
        for _ in range(400):
            p = random_position(rng, Dims(rng.randint(3, 6), rng.randint(3, 7)), 3, 1, Player.DUKE)
            if terminal_status(p) is not TerminalStatus.ONGOING:
                continue
            mv = duke_policy(p)
            assert mv in legal_moves(p)

    def test_detectors_commute_with_symmetries(self):
        rng = random.Random(9)
        for _ in range(300):
            p = random_position(rng, Dims(6, 8), 3, 0, Player.GO)
            imm = detect_imminent_win(p) is not None
            cor = detect_corner_win(p) is not None
            for tr in symmetry_group(p.dims):
                q = tr.apply_position(p)
                assert (detect_imminent_win(q) is not None) == imm
                assert (detect_corner_win(q) is not None) == cor


class TestSolverAgreement:
    def test_flag_mask_matches_detectors_exhaustively(self, solve_store):
        for key in [(4, 6, 3, 0), (5, 5, 3, 0)]:
            res = solve_store(*key)
            ix = res.indexer
            mask = flagged_state_mask(ix)
            for duke in range(ix.mn):
                for wr in range(ix.whites.size):
                    if not ix.is_valid_components(duke, wr, 0):
                        continue
                    idx = ((duke * ix.whites.size + wr) * ix.blacks.size + 0) * 2
                    p = ix.position(idx)
                    hit = detect_imminent_win(p) or detect_corner_win(p)
                    assert mask[duke, wr, 0] == (hit is not None), p

    def test_flagged_states_are_wins_small_boards(self, solve_store):
        for key in [(4, 6, 3, 0), (5, 5, 3, 0), (5, 6, 3, 0)]:
            res = solve_store(*key)
            stats = check_tactics_against_solver(res)
            assert stats["flagged"] > 0

    def test_policy_wins_from_flagged_positions(self, solve_store):
        # exhaustive adversarial replay on a small space
        res = solve_store(4, 5, 3, 0)
        ix = res.indexer
        flagged = flagged_state_mask(ix) & ix.valid_mask()
        starts = []
        import numpy as np

        for duke, wr, br in zip(*np.nonzero(flagged)):
            for turn in (0, 1):
                idx = ((int(duke) * ix.whites.size + int(wr)) * ix.blacks.size + int(br)) * 2 + turn
                p = ix.position(idx)
                if terminal_status(p) is TerminalStatus.ONGOING:
                    starts.append(p)
        worst = replay_policy_exhaustive(res, starts, ply_cap=2 * max(4, 5))
        assert worst <= 2 * max(4, 5)


class TestFantasticClaim:
    @pytest.mark.parametrize("dims", [(5, 5), (5, 6), (6, 6)])
    def test_policy_wins_with_two_whites(self, dims, solve_store):
        res = solve_store(dims[0], dims[1], 2, 0)
        for first in (Player.DUKE, Player.GO):
            start = initial_position(Dims(*dims), whites=2, blacks=0, first=first)
            replay_policy_exhaustive(res, [start], ply_cap=4 * dims[0] * dims[1])

    def test_policy_wins_with_two_whites_one_black_5x5(self, solve_store):
        res = solve_store(5, 5, 2, 1)
        for first in (Player.DUKE, Player.GO):
            start = initial_position(Dims(5, 5), whites=2, blacks=1, first=first)
            replay_policy_exhaustive(res, [start], ply_cap=4 * 25)
