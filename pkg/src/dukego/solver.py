"""Exact solution of bounded-inventory Dukego spaces.

``solve_bounded`` computes the Duke's attractor: the set of states from which
the Duke can force reaching an edge square.  The computation is a synchronous
boolean fixed point over the whole indexed state space, one ply per sweep:

* a Duke-turn state joins the attractor when some legal step leads into it
  (or straight onto an edge square);
* a stone-turn state joins when every reply (placements, relocations and the
  pass) stays inside it.

Sweeping one ply at a time makes the iteration number at which a state first
joins exactly its distance-to-win in plies, with the Duke minimizing and the
stone player maximizing.  States never labelled are draws, which count as
wins for the stone player; Duke-turn states with no step at all are her
immobilization wins.  All kernels are plain vectorized array ops, so results
are bit-identical regardless of thread count.

The stone player's "for all replies" quantifier is evaluated without
enumerating moves: for every stone set one below budget we precompute
``H[X] = AND over squares v of F[X + v]`` (entries that collide with the duke
or another stone are structurally invalid and pinned True, so they drop out
of the conjunction).  Placements then test ``H[W]``, and relocating any stone
u tests ``H[W - u]``, which re-adds u's square as one of the v terms.
"""

from __future__ import annotations

import hashlib
import logging
import struct
import time
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Literal

import numpy as np

from .board import (
    Dims,
    Direction,
    Move,
    Player,
    Position,
    TerminalStatus,
    apply_move,
    duke_start,
    legal_moves,
    terminal_status,
)
from .errors import (
    CacheFormatError,
    ContractViolation,
    FairnessConsistencyError,
    SolveCapExceeded,
)
from .indexer import StateIndexer, estimate_states

logger = logging.getLogger(__name__)

DEFAULT_STATE_CAP = 300_000_000
NO_DISTANCE = 0xFFFF
_CHUNK_BUDGET_BYTES = 192 * 1024 * 1024


class Label(IntEnum):
    """Per-state outcome. DRAW and G_WIN_IMMOBILIZED both mean G wins."""

    DRAW = 0
    D_WIN = 1
    G_WIN_IMMOBILIZED = 2
    INVALID = 3


@dataclass
class SolveResult:
    """Solved labels and win distances for one bounded space.

    ``labels[turn]`` and ``dist[turn]`` are (mn, S_w, S_b) arrays with
    turn 0 = Duke to move, turn 1 = stone player to move.  Distances are
    plies to a forced Duke win and only meaningful on D_WIN states.
    """

    indexer: StateIndexer
    labels: tuple[np.ndarray, np.ndarray]
    dist: tuple[np.ndarray, np.ndarray]
    plies: int = 0
    solve_seconds: float = 0.0
    _flat_cache: dict = field(default_factory=dict, repr=False)

    def label(self, p: Position) -> Label:
        duke, wr, br, turn = self.indexer.components(self.indexer.index(p))
        return Label(self.labels[turn][duke, wr, br])

    def distance(self, p: Position) -> int | None:
        duke, wr, br, turn = self.indexer.components(self.indexer.index(p))
        d = int(self.dist[turn][duke, wr, br])
        return None if d == NO_DISTANCE else d

    def flat_labels(self) -> np.ndarray:
        """Labels as a (total_states,) uint8 array in index order."""
        return np.stack(self.labels, axis=-1).reshape(-1)

    def flat_dist(self) -> np.ndarray:
        return np.stack(self.dist, axis=-1).reshape(-1)

    def counts(self) -> dict[str, int]:
        flat = self.flat_labels()
        return {
            "total": int(flat.size),
            "d_win": int((flat == Label.D_WIN).sum()),
            "draw": int((flat == Label.DRAW).sum()),
            "g_win_immobilized": int((flat == Label.G_WIN_IMMOBILIZED).sum()),
            "invalid": int((flat == Label.INVALID).sum()),
        }


def _neighbour_table(dims: Dims) -> np.ndarray:
    """(mn, 4) square index per direction, -1 off board; N,S,E,W order."""
    mn = dims.rows * dims.cols
    out = np.full((mn, 4), -1, dtype=np.int32)
    for idx in range(mn):
        sq = dims.square(idx)
        for d_i, d in enumerate(Direction):
            tgt = sq.step(d)
            if dims.contains(tgt):
                out[idx, d_i] = dims.index(tgt)
    return out


def _edge_mask(dims: Dims) -> np.ndarray:
    return np.array([dims.is_edge(dims.square(i)) for i in range(dims.rows * dims.cols)])


def _duke_chunks(mn: int, per_duke_bytes: int):
    step = max(1, min(mn, _CHUNK_BUDGET_BYTES // max(per_duke_bytes, 1)))
    for start in range(0, mn, step):
        yield slice(start, min(start + step, mn))


def solve_bounded(
    dims: Dims,
    white_budget: int,
    black_budget: int,
    *,
    state_cap: int = DEFAULT_STATE_CAP,
    max_plies: int = 4096,
) -> SolveResult:
    """Solve the bounded variant with the given stone budgets.

    Refuses spaces whose index space exceeds ``state_cap``.
    """
    if white_budget < 0 or black_budget < 0:
        raise ContractViolation("budgets must be nonnegative")
    total = estimate_states(dims, white_budget, black_budget)
    if total > state_cap:
        raise SolveCapExceeded(
            f"{dims.rows}x{dims.cols} w={white_budget} b={black_budget} needs "
            f"{total:,} states, above the cap of {state_cap:,}",
            total_states=total,
            cap=state_cap,
        )

    t0 = time.monotonic()
    ix = StateIndexer(dims, white_budget, black_budget)
    wt, bt = ix.whites, ix.blacks
    mn = ix.mn
    s_w, s_b = wt.size, bt.size

    edge = _edge_mask(dims)
    nbr = _neighbour_table(dims)
    valid = ix.valid_mask()

    # truth arrays with one sentinel rank per stone axis, pinned True
    f_d = np.zeros((mn, s_w + 1, s_b + 1), dtype=bool)
    f_g = np.zeros_like(f_d)
    f_d[edge] = True
    f_g[edge] = True
    f_d[:, :s_w, :s_b] |= ~valid
    f_g[:, :s_w, :s_b] |= ~valid
    f_d[:, s_w, :] = True
    f_d[:, :, s_b] = True
    f_g[:, s_w, :] = True
    f_g[:, :, s_b] = True

    dist_d = np.full(f_d.shape, NO_DISTANCE, dtype=np.uint16)
    dist_g = np.full(f_d.shape, NO_DISTANCE, dtype=np.uint16)
    dist_d[f_d] = 0
    dist_g[f_g] = 0

    interior = np.flatnonzero(~edge)
    member_w = wt.member
    member_b = bt.member

    ply = 0
    while ply < max_plies:
        ply += 1

        # H_w[duke, X, brank]: every one-white addition to X stays won
        h_w = None
        if white_budget > 0:
            h_w = np.empty((mn, wt.small, s_b + 1), dtype=bool)
            for k in range(white_budget):
                base, upto = wt.offsets[k], wt.offsets[k + 1]
                sup = wt.sup[k]
                per_duke = sup.size * (s_b + 1)
                for dk in _duke_chunks(mn, per_duke):
                    h_w[dk, base:upto, :] = f_d[dk][:, sup, :].all(axis=2)

        h_b = None
        if black_budget > 0:
            h_b = np.empty((mn, s_w + 1, bt.small), dtype=bool)
            for k in range(black_budget):
                base, upto = bt.offsets[k], bt.offsets[k + 1]
                sup = bt.sup[k]
                per_duke = (s_w + 1) * sup.size
                for dk in _duke_chunks(mn, per_duke):
                    h_b[dk, :, base:upto] = f_d[dk][:, :, sup].all(axis=3)

        # stone player's turn: pass, placements, relocations must all stay won
        new_g = f_d.copy()
        if h_w is not None:
            new_g[:, : wt.small, :] &= h_w
        if h_b is not None:
            new_g[:, :, : bt.small] &= h_b
        if white_budget > 0:
            for k in range(1, white_budget + 1):
                base, upto = wt.offsets[k], wt.offsets[k + 1]
                drop = wt.sub[base:upto, :k]
                per_duke = drop.size * (s_b + 1)
                for dk in _duke_chunks(mn, per_duke):
                    new_g[dk, base:upto, :] &= h_w[dk][:, drop, :].all(axis=2)
        new_g |= f_g

        # duke's turn: some step onto an empty square wins now or stays won
        new_d = f_d.copy()
        per_duke = (s_w + 1) * (s_b + 1) * 4
        for dk in _duke_chunks(mn, per_duke):
            acc = np.zeros_like(f_d[dk])
            for d_i in range(4):
                tgt = nbr[dk, d_i]
                ok = tgt >= 0
                safe = np.where(ok, tgt, 0)
                term = ~member_w[safe][:, :, None] & ~member_b[safe][:, None, :]
                term &= f_g[safe] | edge[safe][:, None, None]
                term &= ok[:, None, None]
                acc |= term
            new_d[dk] |= acc

        flips_d = new_d & ~f_d
        flips_g = new_g & ~f_g
        n_d = int(flips_d.sum())
        n_g = int(flips_g.sum())
        if n_d:
            dist_d[flips_d] = ply
        if n_g:
            dist_g[flips_g] = ply
        f_d, f_g = new_d, new_g
        logger.debug(
            "solve %sx%s w=%d b=%d ply=%d frontier=%d+%d",
            dims.rows, dims.cols, white_budget, black_budget, ply, n_d, n_g,
        )
        if n_d == 0 and n_g == 0:
            break
    else:
        raise ContractViolation(f"no fixed point within {max_plies} plies")

    labels_d = np.zeros((mn, s_w, s_b), dtype=np.uint8)
    labels_g = np.zeros_like(labels_d)
    labels_d[f_d[:, :s_w, :s_b]] = Label.D_WIN
    labels_g[f_g[:, :s_w, :s_b]] = Label.D_WIN

    # duke to move, not on an edge, every step blocked or off board
    blocked = np.ones((mn, s_w, s_b), dtype=bool)
    for d_i in range(4):
        tgt = nbr[:, d_i]
        ok = tgt >= 0
        safe = np.where(ok, tgt, 0)
        free = ~member_w[safe, : s_w, None] & ~member_b[safe, None, : s_b]
        blocked &= ~(free & ok[:, None, None])
    immob = blocked & valid
    immob[edge] = False
    labels_d[immob] = Label.G_WIN_IMMOBILIZED

    labels_d[~valid] = Label.INVALID
    labels_g[~valid] = Label.INVALID

    out_dist_d = dist_d[:, :s_w, :s_b].copy()
    out_dist_g = dist_g[:, :s_w, :s_b].copy()
    out_dist_d[labels_d != Label.D_WIN] = NO_DISTANCE
    out_dist_g[labels_g != Label.D_WIN] = NO_DISTANCE

    elapsed = time.monotonic() - t0
    logger.info(
        "solved %sx%s w=%d b=%d: %s states in %d plies, %.1fs (%.2fM states/s)",
        dims.rows, dims.cols, white_budget, black_budget,
        f"{total:,}", ply, elapsed, total * ply / max(elapsed, 1e-9) / 1e6,
    )
    return SolveResult(
        indexer=ix,
        labels=(labels_d, labels_g),
        dist=(out_dist_d, out_dist_g),
        plies=ply,
        solve_seconds=elapsed,
    )


def query_label(res: SolveResult, p: Position) -> Label:
    """Constant-time label lookup for a position of the solved space."""
    return res.label(p)


def best_move(res: SolveResult, p: Position) -> Move:
    """A move preserving the mover's best achievable outcome.

    The winning Duke minimizes the win distance; the losing stone player
    maximizes it; in drawn states either side keeps the draw.  Ties break
    to the lowest successor state index.
    """
    if terminal_status(p) is not TerminalStatus.ONGOING:
        raise ContractViolation("best_move needs an ongoing position")
    ix = res.indexer
    own_label = res.label(p)
    scored: list[tuple[tuple, int, Move]] = []
    for mv in legal_moves(p):
        succ = apply_move(p, mv)
        idx = ix.index(succ)
        duke, wr, br, turn = ix.components(idx)
        lab = Label(res.labels[turn][duke, wr, br])
        d = int(res.dist[turn][duke, wr, br])
        scored.append(((lab, d), idx, mv))

    if p.to_move is Player.DUKE:
        if own_label == Label.D_WIN:
            wins = [(d, idx, mv) for (lab, d), idx, mv in scored if lab == Label.D_WIN]
            _, _, mv = min(wins)
            return mv
        safe = [(idx, mv) for (lab, _), idx, mv in scored if lab != Label.D_WIN]
        _, mv = min(safe)
        return mv

    if own_label == Label.D_WIN:
        # all replies lose; resist longest
        longest = max(d for (lab, d), _, _ in scored)
        _, mv = min((idx, mv) for (lab, d), idx, mv in scored if d == longest)
        return mv
    safe = [(idx, mv) for (lab, _), idx, mv in scored if lab != Label.D_WIN]
    _, mv = min(safe)
    return mv


def fairness_entry(
    dims: Dims,
    white_budget: int,
    black_budget: int,
    *,
    state_cap: int = DEFAULT_STATE_CAP,
    result: SolveResult | None = None,
) -> Literal["D", "G", "fair"]:
    """Who wins this board: D, G, or the first player to move ("fair")."""
    res = result if result is not None else solve_bounded(
        dims, white_budget, black_budget, state_cap=state_cap
    )
    ix = res.indexer
    duke = dims.index(duke_start(dims))
    empty_w = ix.whites.rank(())
    empty_b = ix.blacks.rank(())
    d_first = Label(res.labels[0][duke, empty_w, empty_b]) == Label.D_WIN
    g_first = Label(res.labels[1][duke, empty_w, empty_b]) == Label.D_WIN
    if d_first and g_first:
        return "D"
    if not d_first and not g_first:
        return "G"
    if d_first and not g_first:
        return "fair"
    raise FairnessConsistencyError(
        f"{dims.rows}x{dims.cols} w={white_budget} b={black_budget}: "
        "the second mover appears to win, which contradicts the game's "
        "first-move monotonicity"
    )


# -- cache files ---------------------------------------------------------------

_MAGIC = b"DUKEGO\0"
_VERSION = 1


def save_cache(res: SolveResult, path: str | Path) -> None:
    """Write a solve result; bit-exact round trip via load_cache."""
    ix = res.indexer
    flat = res.flat_labels()
    dist = res.flat_dist()
    header = _MAGIC + struct.pack(
        "<HHHHHQB",
        _VERSION,
        ix.dims.rows,
        ix.dims.cols,
        ix.white_budget,
        ix.black_budget,
        flat.size,
        1,
    )
    packed = _pack_labels(flat)
    payload = header + packed.tobytes() + dist.astype("<u2").tobytes()
    checksum = hashlib.blake2b(payload, digest_size=8).digest()
    Path(path).write_bytes(payload + checksum)


def load_cache(path: str | Path) -> SolveResult:
    raw = Path(path).read_bytes()
    if len(raw) < len(_MAGIC) + 19 + 8:
        raise CacheFormatError("cache file truncated")
    if raw[: len(_MAGIC)] != _MAGIC:
        raise CacheFormatError("bad magic; not a dukego cache file")
    payload, checksum = raw[:-8], raw[-8:]
    if hashlib.blake2b(payload, digest_size=8).digest() != checksum:
        raise CacheFormatError("checksum mismatch; file corrupt or truncated")
    version, rows, cols, w, b, total, has_dist = struct.unpack(
        "<HHHHHQB", payload[len(_MAGIC) : len(_MAGIC) + 19]
    )
    if version != _VERSION:
        raise CacheFormatError(f"unsupported cache version {version}")
    ix = StateIndexer(Dims(rows, cols), w, b)
    if total != ix.total_states:
        raise CacheFormatError("state count does not match the declared space")
    body = payload[len(_MAGIC) + 19 :]
    n_packed = (total + 3) // 4
    flat = _unpack_labels(np.frombuffer(body[:n_packed], dtype=np.uint8), total)
    if has_dist:
        dist = np.frombuffer(body[n_packed : n_packed + 2 * total], dtype="<u2").astype(np.uint16)
    else:
        dist = np.full(total, NO_DISTANCE, dtype=np.uint16)
    mn, s_w, s_b = ix.mn, ix.whites.size, ix.blacks.size
    labels = flat.reshape(mn, s_w, s_b, 2)
    dists = dist.reshape(mn, s_w, s_b, 2)
    return SolveResult(
        indexer=ix,
        labels=(labels[..., 0].copy(), labels[..., 1].copy()),
        dist=(dists[..., 0].copy(), dists[..., 1].copy()),
    )


def _pack_labels(flat: np.ndarray) -> np.ndarray:
    pad = (-flat.size) % 4
    if pad:
        flat = np.concatenate([flat, np.zeros(pad, dtype=np.uint8)])
    quads = flat.reshape(-1, 4)
    return (
        quads[:, 0] | (quads[:, 1] << 2) | (quads[:, 2] << 4) | (quads[:, 3] << 6)
    ).astype(np.uint8)


def _unpack_labels(packed: np.ndarray, total: int) -> np.ndarray:
    out = np.empty((packed.size, 4), dtype=np.uint8)
    for j in range(4):
        out[:, j] = (packed >> (2 * j)) & 0b11
    return out.reshape(-1)[:total]
