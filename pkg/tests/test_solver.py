"""Bounded solver: labels, distances, caches, and the exhaustive property suite.

The local-consistency oracle below re-derives every state's label from its
successors using only the rules module (legal_moves/apply_move), a route
fully independent of the solver's vectorized kernels.
"""

from __future__ import annotations

import random

import numpy as np
import pytest

from dukego.board import (
    Dims,
    Player,
    Position,
    TerminalStatus,
    apply_move,
    initial_position,
    legal_moves,
    symmetry_group,
    terminal_status,
)
from dukego.errors import CacheFormatError, ContractViolation, SolveCapExceeded
from dukego.solver import (
    Label,
    best_move,
    fairness_entry,
    load_cache,
    query_label,
    save_cache,
    solve_bounded,
)

from conftest import random_position


def iter_valid_states(res):
    """(position, label, dist) over every valid state of a solved space."""
    ix = res.indexer
    for duke in range(ix.mn):
        for wr in range(ix.whites.size):
            for br in range(ix.blacks.size):
                if not ix.is_valid_components(duke, wr, br):
                    continue
                for turn in (0, 1):
                    idx = ((duke * ix.whites.size + wr) * ix.blacks.size + br) * 2 + turn
                    p = ix.position(idx)
                    yield p, Label(res.labels[turn][duke, wr, br]), int(res.dist[turn][duke, wr, br])


def check_local_consistency(res) -> int:
    """Assert every valid state's label agrees with its successors. Returns count."""
    n = 0
    for p, lab, dist in iter_valid_states(res):
        n += 1
        status = terminal_status(p)
        if status is TerminalStatus.D_WIN:
            assert lab == Label.D_WIN and dist == 0
            continue
        if status is TerminalStatus.G_WIN_IMMOBILIZED:
            assert lab == Label.G_WIN_IMMOBILIZED
            continue
        succ = [res.label(apply_move(p, mv)) for mv in legal_moves(p)]
        assert succ, "ongoing state without moves"
        if p.to_move is Player.DUKE:
            expect = Label.D_WIN if any(s == Label.D_WIN for s in succ) else Label.DRAW
        else:
            expect = Label.D_WIN if all(s == Label.D_WIN for s in succ) else Label.DRAW
        assert lab == expect, f"{p} labelled {lab}, successors say {expect}"
    return n


@pytest.fixture(scope="module")
def r55w3(solve_store):
    return solve_store(5, 5, 3, 0)


@pytest.fixture(scope="module")
def r45w2b1(solve_store):
    return solve_store(4, 5, 2, 1)


class TestSolveBounded:
    def test_5x5_start_is_duke_win_with_g_to_move(self, r55w3):
        p = initial_position(Dims(5, 5), whites=3, blacks=0, first=Player.GO)
        assert query_label(r55w3, p) == Label.D_WIN

    def test_8x8_w3_is_fair(self, solve_store):
        res = solve_store(8, 8, 3, 0)
        d_first = initial_position(Dims(8, 8), whites=3, blacks=0, first=Player.DUKE)
        g_first = initial_position(Dims(8, 8), whites=3, blacks=0, first=Player.GO)
        assert query_label(res, d_first) == Label.D_WIN
        assert query_label(res, g_first) != Label.D_WIN

    def test_6x6_w2b1_duke_wins_g_first(self, solve_store):
        res = solve_store(6, 6, 2, 1)
        p = initial_position(Dims(6, 6), whites=2, blacks=1, first=Player.GO)
        assert query_label(res, p) == Label.D_WIN

    def test_cap_refusal_carries_estimate(self):
        with pytest.raises(SolveCapExceeded) as exc:
            solve_bounded(Dims(9, 9), 3, 0, state_cap=1000)
        assert exc.value.cap == 1000
        assert exc.value.total_states > 14_000_000

    def test_bad_budgets_rejected(self):
        with pytest.raises(ContractViolation):
            solve_bounded(Dims(4, 4), -1, 0)


class TestQueryAndBestMove:
    def test_terminal_edge_state(self, r55w3):
        from dukego.board import Inventory, Square

        p = Position(Dims(5, 5), Square(1, 3), frozenset(), frozenset(), Player.GO, Inventory(3, 0))
        assert query_label(r55w3, p) == Label.D_WIN
        assert r55w3.distance(p) == 0

    def test_one_step_from_edge(self, r55w3):
        from dukego.board import Inventory, Square

        p = Position(Dims(5, 5), Square(2, 3), frozenset(), frozenset(), Player.DUKE, Inventory(3, 0))
        assert r55w3.distance(p) == 1
        mv = best_move(r55w3, p)
        q = apply_move(p, mv)
        assert terminal_status(q) is TerminalStatus.D_WIN

    def test_g_prefers_draw_preserving_move(self, solve_store):
        res = solve_store(7, 8, 3, 0)
        p = initial_position(Dims(7, 8), whites=3, blacks=0, first=Player.GO)
        assert query_label(res, p) == Label.DRAW
        mv = best_move(res, p)
        assert query_label(res, apply_move(p, mv)) != Label.D_WIN

    def test_out_of_space_position_rejected(self, r55w3):
        p = initial_position(Dims(5, 5), whites=2, blacks=0, first=Player.GO)
        with pytest.raises(ContractViolation):
            query_label(r55w3, p)


class TestFairnessEntry:
    def test_small_d_boards(self, solve_store):
        assert fairness_entry(Dims(5, 5), 3, 0, result=solve_store(5, 5, 3, 0)) == "D"
        assert fairness_entry(Dims(6, 7), 3, 0, result=solve_store(6, 7, 3, 0)) == "D"

    def test_fair_board(self, solve_store):
        assert fairness_entry(Dims(7, 8), 3, 0, result=solve_store(7, 8, 3, 0)) == "fair"


class TestCache:
    def test_round_trip_bit_exact(self, r55w3, tmp_path):
        path = tmp_path / "5x5w3.dgc"
        save_cache(r55w3, path)
        back = load_cache(path)
        for turn in (0, 1):
            assert np.array_equal(back.labels[turn], r55w3.labels[turn])
            assert np.array_equal(back.dist[turn], r55w3.dist[turn])

    def test_truncated_file_refused(self, r55w3, tmp_path):
        path = tmp_path / "x.dgc"
        save_cache(r55w3, path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) // 2])
        with pytest.raises(CacheFormatError, match="checksum|truncated"):
            load_cache(path)

    def test_wrong_version_refused(self, r55w3, tmp_path):
        path = tmp_path / "x.dgc"
        save_cache(r55w3, path)
        data = bytearray(path.read_bytes())
        data[7] = 0  # version word
        import hashlib

        body = bytes(data[:-8])
        path.write_bytes(body + hashlib.blake2b(body, digest_size=8).digest())
        with pytest.raises(CacheFormatError, match="version"):
            load_cache(path)


class TestPropertySuite:
    def test_local_consistency_5x5_w3(self, r55w3):
        assert check_local_consistency(r55w3) > 100_000

    def test_local_consistency_4x5_w2_b1(self, r45w2b1):
        assert check_local_consistency(r45w2b1) > 50_000

    def test_distance_decreases_along_best_moves(self, r55w3, r45w2b1):
        for res in (r55w3, r45w2b1):
            for p, lab, dist in iter_valid_states(res):
                if lab != Label.D_WIN or terminal_status(p) is not TerminalStatus.ONGOING:
                    continue
                succ = apply_move(p, best_move(res, p))
                sdist = res.distance(succ)
                assert sdist == dist - 1, (p, dist, sdist)

    def test_symmetry_invariance_samples(self, solve_store):
        res = solve_store(6, 6, 2, 1)
        rng = random.Random(11)
        for _ in range(300):
            p = random_position(rng, Dims(6, 6), 2, 1, rng.choice(list(Player)))
            lab = res.label(p)
            for tr in symmetry_group(Dims(6, 6)):
                assert res.label(tr.apply_position(p)) == lab

    def test_first_mover_advantage(self, solve_store):
        for key in [(5, 5, 3, 0), (4, 5, 2, 1), (6, 6, 2, 1), (7, 8, 3, 0)]:
            res = solve_store(*key)
            dims = Dims(key[0], key[1])
            start_d = initial_position(dims, whites=key[2], blacks=key[3], first=Player.DUKE)
            start_g = initial_position(dims, whites=key[2], blacks=key[3], first=Player.GO)
            # if a side wins moving second it also wins moving first
            if res.label(start_g) == Label.D_WIN:
                assert res.label(start_d) == Label.D_WIN
            if res.label(start_d) != Label.D_WIN:
                assert res.label(start_g) != Label.D_WIN

    def test_monotonicity_extra_stone_never_turns_g_win_into_d_win(self, solve_store):
        for key in [(5, 5, 3, 0), (6, 6, 2, 1)]:
            res = solve_store(*key)
            ix = res.indexer
            wt, bt = ix.whites, ix.blacks
            valid = ix.valid_mask()
            for turn in (0, 1):
                lab = res.labels[turn]
                g_win = (lab != Label.D_WIN) & valid
                d_win = (lab == Label.D_WIN) & valid
                if key[2] > 0:
                    # adding one white to any non-D-win state stays non-D-win
                    padded = np.concatenate(
                        [d_win, np.zeros((ix.mn, 1, bt.size), dtype=bool)], axis=1
                    )
                    for k in range(key[2]):
                        base, upto = wt.offsets[k], wt.offsets[k + 1]
                        reachable_d_win = padded[:, wt.sup[k], :].any(axis=2)
                        bad = g_win[:, base:upto, :] & reachable_d_win
                        assert not bad.any()
                if key[3] > 0:
                    padded = np.concatenate(
                        [d_win, np.zeros((ix.mn, wt.size, 1), dtype=bool)], axis=2
                    )
                    for k in range(key[3]):
                        base, upto = bt.offsets[k], bt.offsets[k + 1]
                        reachable_d_win = padded[:, :, bt.sup[k]].any(axis=3)
                        bad = g_win[:, :, base:upto] & reachable_d_win
                        assert not bad.any()

    def test_deterministic_rerun(self):
        a = solve_bounded(Dims(4, 4), 2, 0)
        b = solve_bounded(Dims(4, 4), 2, 0)
        for turn in (0, 1):
            assert np.array_equal(a.labels[turn], b.labels[turn])
            assert np.array_equal(a.dist[turn], b.dist[turn])
