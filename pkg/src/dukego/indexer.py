"""Dense state indexing for bounded-inventory Dukego spaces.

A state is (duke square, white-stone set, black-stone set, side to move).
Stone sets of size up to the budget are ranked over all board squares via
colexicographic subset ranking, size classes first.  The index space
deliberately includes combinations that collide with the duke or each other;
those indices are marked invalid rather than squeezed out, which keeps
ranking and neighbour lookups branch-light.

Index layout::

    index = ((duke * S_w + wrank) * S_b + brank) * 2 + turn     # turn: 0=D, 1=G

The ``SubsetTables`` helper also precomputes the gather tables the solver's
fixed-point kernels need (membership masks, one-stone additions/removals,
superset lists).  Tables carry one sentinel rank (== size of the rank space)
pointing at padding cells so gathers never need masking.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .board import Dims, Inventory, Player, Position, Square
from .errors import ContractViolation


class SubsetTables:
    """Ranking tables for subsets of size <= cap over n squares."""

    def __init__(self, n: int, cap: int) -> None:
        self.n = n
        self.cap = cap
        self.offsets = [0]
        for k in range(cap + 1):
            self.offsets.append(self.offsets[-1] + math.comb(n, k))
        self.size = self.offsets[-1]          # number of ranks
        self.small = self.offsets[cap]        # ranks with size < cap
        self.sentinel = self.size

        # sets_by_size[k]: (C(n,k), k) squares of each size-k set, rank order
        self.sets_by_size: list[np.ndarray] = []
        rank_by_mask: dict[int, int] = {}
        masks_by_rank: list[int] = []
        for k in range(cap + 1):
            combos = list(itertools.combinations(range(n), k))
            combos.sort(key=lambda t: t[::-1])  # colex order
            arr = np.array(combos, dtype=np.int16).reshape(len(combos), k)
            self.sets_by_size.append(arr)
            base = self.offsets[k]
            for i, combo in enumerate(combos):
                mask = 0
                for q in combo:
                    mask |= 1 << q
                rank_by_mask[mask] = base + i
                masks_by_rank.append(mask)
        self._rank_by_mask = rank_by_mask
        self._mask_by_rank = masks_by_rank

        # member[q, r]: square q is in set r; sentinel column stays False
        self.member = np.zeros((n, self.size + 1), dtype=bool)
        for k in range(1, cap + 1):
            sets_k = self.sets_by_size[k]
            base = self.offsets[k]
            ranks = np.arange(base, base + len(sets_k))
            for j in range(k):
                self.member[sets_k[:, j], ranks] = True

        # sub[r, j]: rank of set r minus its j-th square; sentinel padded
        self.sub = np.full((self.size + 1, max(cap, 1)), self.sentinel, dtype=np.int32)
        for k in range(1, cap + 1):
            sets_k = self.sets_by_size[k]
            base = self.offsets[k]
            for i in range(len(sets_k)):
                mask = masks_by_rank[base + i]
                for j in range(k):
                    self.sub[base + i, j] = rank_by_mask[mask & ~(1 << int(sets_k[i, j]))]

        # add[q, r]: rank of set r (size < cap) plus square q; sentinel if q in r
        self.add = np.full((n, self.small + 1), self.sentinel, dtype=np.int32)
        for r in range(self.small):
            mask = masks_by_rank[r]
            for q in range(n):
                bit = 1 << q
                if not mask & bit:
                    self.add[q, r] = rank_by_mask[mask | bit]

        # sup[k]: for each size-k set (k < cap) the ranks of all one-square
        # supersets; rows padded with the sentinel at member columns
        self.sup: list[np.ndarray] = []
        for k in range(cap):
            base = self.offsets[k]
            count = self.offsets[k + 1] - base
            self.sup.append(self.add[:, base : base + count].T.copy())

        # 128-bit occupancy masks as two words, for disjointness tests
        lo = np.zeros(self.size + 1, dtype=np.uint64)
        hi = np.zeros(self.size + 1, dtype=np.uint64)
        for r, mask in enumerate(masks_by_rank):
            lo[r] = mask & 0xFFFFFFFFFFFFFFFF
            hi[r] = mask >> 64
        self.bits_lo = lo
        self.bits_hi = hi

        sizes = np.zeros(self.size + 1, dtype=np.int8)
        for k in range(cap + 1):
            sizes[self.offsets[k] : self.offsets[k + 1]] = k
        self.sizes = sizes

    def rank(self, squares: frozenset[int] | tuple[int, ...]) -> int:
        mask = 0
        for q in squares:
            mask |= 1 << q
        try:
            return self._rank_by_mask[mask]
        except KeyError:
            raise ContractViolation(
                f"set of {len(tuple(squares))} squares exceeds cap {self.cap}"
            ) from None

    def unrank(self, r: int) -> tuple[int, ...]:
        mask = self._mask_by_rank[r]
        out = []
        q = 0
        while mask:
            if mask & 1:
                out.append(q)
            mask >>= 1
            q += 1
        return tuple(out)


@lru_cache(maxsize=32)
def subset_tables(n: int, cap: int) -> SubsetTables:
    return SubsetTables(n, cap)


@dataclass(frozen=True)
class StateIndexer:
    """Bijection-with-waste between bounded-variant positions and [0, total)."""

    dims: Dims
    white_budget: int
    black_budget: int

    def __post_init__(self) -> None:
        if self.white_budget < 0 or self.black_budget < 0:
            raise ContractViolation("budgets must be nonnegative")

    @property
    def mn(self) -> int:
        return self.dims.rows * self.dims.cols

    @property
    def whites(self) -> SubsetTables:
        return subset_tables(self.mn, self.white_budget)

    @property
    def blacks(self) -> SubsetTables:
        return subset_tables(self.mn, self.black_budget)

    @property
    def total_states(self) -> int:
        return self.mn * self.whites.size * self.blacks.size * 2

    def square_index(self, sq: Square) -> int:
        return self.dims.index(sq)

    def index(self, p: Position) -> int:
        self._check_in_space(p)
        duke = self.dims.index(p.duke)
        wr = self.whites.rank(tuple(self.dims.index(s) for s in p.whites))
        br = self.blacks.rank(tuple(self.dims.index(s) for s in p.blacks))
        turn = 0 if p.to_move is Player.DUKE else 1
        return ((duke * self.whites.size + wr) * self.blacks.size + br) * 2 + turn

    def components(self, idx: int) -> tuple[int, int, int, int]:
        """(duke, wrank, brank, turn) of a flat index."""
        idx, turn = divmod(idx, 2)
        idx, br = divmod(idx, self.blacks.size)
        duke, wr = divmod(idx, self.whites.size)
        return duke, wr, br, turn

    def position(self, idx: int) -> Position:
        duke, wr, br, turn = self.components(idx)
        if not self.is_valid_components(duke, wr, br):
            raise ContractViolation(f"index {idx} marks an invalid state")
        w_squares = frozenset(self.dims.square(q) for q in self.whites.unrank(wr))
        b_squares = frozenset(self.dims.square(q) for q in self.blacks.unrank(br))
        return Position(
            dims=self.dims,
            duke=self.dims.square(duke),
            blacks=b_squares,
            whites=w_squares,
            to_move=Player.DUKE if turn == 0 else Player.GO,
            inventory=Inventory(
                whites_in_hand=self.white_budget - len(w_squares),
                blacks_in_hand=self.black_budget - len(b_squares),
            ),
        )

    def is_valid_components(self, duke: int, wr: int, br: int) -> bool:
        wt, bt = self.whites, self.blacks
        if wt.member[duke, wr] or bt.member[duke, br]:
            return False
        return not (
            (wt.bits_lo[wr] & bt.bits_lo[br]) or (wt.bits_hi[wr] & bt.bits_hi[br])
        )

    def valid_mask(self) -> np.ndarray:
        """(mn, S_w, S_b) boolean mask of structurally valid states."""
        wt, bt = self.whites, self.blacks
        disjoint = (
            (wt.bits_lo[: wt.size, None] & bt.bits_lo[None, : bt.size]) == 0
        ) & ((wt.bits_hi[: wt.size, None] & bt.bits_hi[None, : bt.size]) == 0)
        duke_free = (
            ~wt.member[:, : wt.size, None] & ~bt.member[:, None, : bt.size]
        )
        return duke_free & disjoint[None, :, :]

    def _check_in_space(self, p: Position) -> None:
        if p.dims != self.dims:
            raise ContractViolation(f"position dims {p.dims} differ from {self.dims}")
        if not p.is_bounded:
            raise ContractViolation("unbounded positions are outside indexed spaces")
        if p.white_budget != self.white_budget or p.black_budget != self.black_budget:
            raise ContractViolation(
                f"budgets w={p.white_budget} b={p.black_budget} differ from "
                f"w={self.white_budget} b={self.black_budget}"
            )


def estimate_states(dims: Dims, white_budget: int, black_budget: int) -> int:
    """Total index-space size for a bounded space, without building tables."""
    mn = dims.rows * dims.cols
    s_w = sum(math.comb(mn, k) for k in range(white_budget + 1))
    s_b = sum(math.comb(mn, k) for k in range(black_budget + 1))
    return mn * s_w * s_b * 2
