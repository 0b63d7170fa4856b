"""DPN and move text round-trips."""

from __future__ import annotations

import pytest
from hypothesis import given, settings

from dukego.board import (
    UNLIMITED,
    Dims,
    Direction,
    DukeStep,
    Pass,
    PlaceBlack,
    PlaceWhite,
    Player,
    RelocateWhite,
    Square,
    initial_position,
)
from dukego.errors import BoundsError, DpnError, OverlapError
from dukego.notation import (
    format_dpn,
    format_move,
    move_from_json,
    move_to_json,
    parse_dpn,
    parse_move,
)

from conftest import positions


def test_start_of_8x8_bounded():
    p = initial_position(Dims(8, 8), whites=3, blacks=0, first=Player.GO)
    assert format_dpn(p) == "8x8 D5,5 B[] W[] G w3 b0"


def test_parse_standard_start():
    p = parse_dpn("6x9 D4,5 B[] W[] G w0 binf")
    assert p == initial_position(Dims(6, 9), first=Player.GO)
    assert p.inventory.blacks_in_hand is UNLIMITED


def test_stone_lists():
    text = "5x6 D3,3 B[1,2;4,4] W[2,5] D w1 b0"
    p = parse_dpn(text)
    assert p.blacks == frozenset({Square(1, 2), Square(4, 4)})
    assert p.whites == frozenset({Square(2, 5)})
    assert format_dpn(p) == text


@given(positions())
@settings(max_examples=200, deadline=None)
def test_round_trip(p):
    assert parse_dpn(format_dpn(p)) == p


def test_syntax_errors_carry_column():
    with pytest.raises(DpnError) as exc:
        parse_dpn("5x5 D3,3 B[] W[] X w0 b0")
    assert exc.value.column == 18
    with pytest.raises(DpnError):
        parse_dpn("5x5 D3,3 B[1;2] W[] G w0 b0")
    with pytest.raises(DpnError):
        parse_dpn("nonsense")


def test_structural_errors_are_distinct_from_syntax():
    with pytest.raises(BoundsError):
        parse_dpn("5x5 D9,9 B[] W[] G w0 b0")
    with pytest.raises(OverlapError):
        parse_dpn("5x5 D3,3 B[2,2] W[2,2] G w0 b0")


class TestMoveText:
    @pytest.mark.parametrize(
        "mv,text",
        [
            (DukeStep(Direction.N), "N"),
            (PlaceBlack(Square(3, 4)), "B3,4"),
            (PlaceWhite(Square(1, 9)), "W1,9"),
            (RelocateWhite(Square(2, 2), Square(5, 1)), "W2,2>5,1"),
            (Pass(), "pass"),
        ],
    )
    def test_round_trip(self, mv, text):
        assert format_move(mv) == text
        assert parse_move(text) == mv
        assert move_from_json(move_to_json(mv)) == mv

    def test_bad_text(self):
        with pytest.raises(ValueError):
            parse_move("Q3,4")
