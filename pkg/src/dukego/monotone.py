"""Exact solver for the standard (black-stone-only) game.

Every stone-player turn adds a permanent stone, so the game graph is acyclic
and plain AND-OR search with memoization decides the winner.  Memo keys are
canonicalized over the board's symmetry group.  Duke nodes try an immediate
edge step, then the tactic policy's suggestion; stone nodes try squares near
the Duke first, which finds refutations of loose play quickly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .board import (
    UNLIMITED,
    Dims,
    Direction,
    Inventory,
    Player,
    Position,
    Square,
    symmetry_group,
)
from .errors import ContractViolation
from .tactics import DukeStep, duke_policy

logger = logging.getLogger(__name__)

_STEP_ORDER = (Direction.N, Direction.S, Direction.E, Direction.W)


@dataclass
class MonotoneProof:
    """Outcome of an AND-OR proof; winner is None when the ply cap pruned it."""

    root: Position
    winner: Player | None
    nodes: int = 0
    max_depth: int = 0
    memo: dict = field(default_factory=dict, repr=False)


def solve_monotone(
    dims: Dims,
    first_mover: Player,
    ply_cap: int | None = None,
) -> MonotoneProof:
    """Prove the winner of the standard game from the start position.

    The default ply cap, twice the square count, exceeds the longest
    possible game, so it only bites when set lower explicitly.
    """
    if dims.rows < 1 or dims.cols < 1:
        raise ContractViolation(f"invalid dims {dims}")
    cap = 2 * dims.rows * dims.cols if ply_cap is None else ply_cap
    solver = _Search(dims, cap)
    start = Position(
        dims=dims,
        duke=Square(dims.rows // 2 + 1, dims.cols // 2 + 1),
        blacks=frozenset(),
        whites=frozenset(),
        to_move=first_mover,
        inventory=Inventory(0, UNLIMITED),
    )
    winner = solver.search(start.duke, start.blacks, first_mover, 0)
    logger.info(
        "monotone %sx%s first=%s: winner=%s nodes=%d depth=%d memo=%d",
        dims.rows, dims.cols, first_mover.value,
        winner.value if winner else "unknown",
        solver.nodes, solver.max_depth, len(solver.memo),
    )
    return MonotoneProof(
        root=start,
        winner=winner,
        nodes=solver.nodes,
        max_depth=solver.max_depth,
        memo=solver.memo,
    )


class _Search:
    def __init__(self, dims: Dims, ply_cap: int) -> None:
        self.dims = dims
        self.cap = ply_cap
        self.memo: dict[tuple, Player] = {}
        self.nodes = 0
        self.max_depth = 0
        self.transforms = symmetry_group(dims)

    def _canonical(self, duke: Square, blacks: frozenset[Square], mover: Player) -> tuple:
        best = None
        for tr in self.transforms:
            key = (tr.apply_square(duke), tuple(sorted(tr.apply_square(s) for s in blacks)))
            if best is None or key < best:
                best = key
        return (*best, mover)

    def _steps(self, duke: Square, blacks: frozenset[Square]) -> list[Square]:
        out = []
        for d in _STEP_ORDER:
            tgt = duke.step(d)
            if self.dims.contains(tgt) and tgt not in blacks:
                out.append(tgt)
        return out

    def search(self, duke: Square, blacks: frozenset[Square], mover: Player, depth: int) -> Player | None:
        self.nodes += 1
        self.max_depth = max(self.max_depth, depth)
        if self.dims.is_edge(duke):
            return Player.DUKE
        steps = self._steps(duke, blacks)
        if mover is Player.DUKE and not steps:
            return Player.GO
        if depth >= self.cap:
            return None
        key = self._canonical(duke, blacks, mover)
        hit = self.memo.get(key)
        if hit is not None:
            return hit

        unknown = False
        if mover is Player.DUKE:
            winner = Player.GO
            for tgt in self._ordered_steps(duke, blacks, steps):
                sub = self.search(tgt, blacks, Player.GO, depth + 1)
                if sub is Player.DUKE:
                    winner = Player.DUKE
                    break
                if sub is None:
                    unknown = True
            else:
                winner = None if unknown else Player.GO
        else:
            winner = Player.DUKE
            for sq in self._placements(duke, blacks):
                sub = self.search(duke, blacks | {sq}, Player.DUKE, depth + 1)
                if sub is Player.GO:
                    winner = Player.GO
                    break
                if sub is None:
                    unknown = True
            else:
                winner = None if unknown else Player.DUKE

        if winner is not None:
            self.memo[key] = winner
        return winner

    def _ordered_steps(self, duke: Square, blacks: frozenset[Square], steps: list[Square]) -> list[Square]:
        """Edge squares first, then the tactic policy's pick, then the rest."""
        edges = [s for s in steps if self.dims.is_edge(s)]
        if edges:
            return edges + [s for s in steps if s not in edges]
        p = Position(
            dims=self.dims,
            duke=duke,
            blacks=blacks,
            whites=frozenset(),
            to_move=Player.DUKE,
            inventory=Inventory(0, UNLIMITED),
        )
        hint = duke_policy(p)
        assert isinstance(hint, DukeStep)
        first = duke.step(hint.direction)
        return [first] + [s for s in steps if s != first]

    def _placements(self, duke: Square, blacks: frozenset[Square]) -> list[Square]:
        empties = [
            sq
            for sq in self.dims.squares()
            if sq != duke and sq not in blacks
        ]
        empties.sort(key=lambda s: (abs(s.row - duke.row) + abs(s.col - duke.col), s))
        return empties
