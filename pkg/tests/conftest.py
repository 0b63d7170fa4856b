"""Shared fixtures: random-position strategies and a session-wide solve store."""

from __future__ import annotations

import random

import pytest
from hypothesis import strategies as st

from dukego.board import (
    UNLIMITED,
    Dims,
    Inventory,
    Player,
    Position,
    Square,
)


@st.composite
def positions(draw, max_rows: int = 6, max_cols: int = 7, bounded_only: bool = False):
    """A random structurally valid position."""
    rows = draw(st.integers(1, max_rows))
    cols = draw(st.integers(1, max_cols))
    dims = Dims(rows, cols)
    squares = [Square(r, c) for r in range(1, rows + 1) for c in range(1, cols + 1)]
    duke = draw(st.sampled_from(squares))
    rest = [s for s in squares if s != duke]
    n_stones = draw(st.integers(0, min(len(rest), 6)))
    stones = draw(st.permutations(rest)) if rest else []
    stones = stones[:n_stones]
    bounded = True if bounded_only else draw(st.booleans())
    if bounded:
        n_white = draw(st.integers(0, n_stones))
        whites = frozenset(stones[:n_white])
        blacks = frozenset(stones[n_white:])
        inv = Inventory(
            whites_in_hand=draw(st.integers(0, 3)),
            blacks_in_hand=draw(st.integers(0, 3)),
        )
    else:
        whites = frozenset()
        blacks = frozenset(stones)
        inv = Inventory(whites_in_hand=0, blacks_in_hand=UNLIMITED)
    to_move = draw(st.sampled_from([Player.DUKE, Player.GO]))
    return Position(dims=dims, duke=duke, blacks=blacks, whites=whites, to_move=to_move, inventory=inv)


def random_position(rng: random.Random, dims: Dims, whites: int, blacks: int, to_move: Player) -> Position:
    """A random valid bounded-variant position with the given budgets."""
    squares = list(dims.squares())
    duke = rng.choice(squares)
    rest = [s for s in squares if s != duke]
    rng.shuffle(rest)
    n_w = rng.randint(0, whites)
    n_b = rng.randint(0, min(blacks, len(rest) - n_w))
    on_board = rest[: n_w + n_b]
    return Position(
        dims=dims,
        duke=duke,
        blacks=frozenset(on_board[n_w:]),
        whites=frozenset(on_board[:n_w]),
        to_move=to_move,
        inventory=Inventory(whites_in_hand=whites - n_w, blacks_in_hand=blacks - n_b),
    )


@pytest.fixture(scope="session")
def solve_store():
    """Memoized solve_bounded results shared across the whole test session."""
    from dukego.solver import solve_bounded

    cache = {}

    def get(rows: int, cols: int, whites: int, blacks: int):
        key = (rows, cols, whites, blacks)
        if key not in cache:
            cache[key] = solve_bounded(Dims(rows, cols), whites, blacks)
        return cache[key]

    return get
