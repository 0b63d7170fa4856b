"""JSON-over-HTTP game service: sessions, engine replies, hints, evaluations.

Sessions live in memory behind a registry lock; each session serializes its
own move handling.  Solver results are loaded from the cache directory (or
solved on demand for small spaces) and shared read-only across sessions.
The engine plays whichever side the human does not, with a policy of
``auto`` (solver when available, tactics or an extracted strategy
otherwise), ``tactic``, ``solver``, or ``reduction``.
"""

from __future__ import annotations

import json
import logging
import secrets
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .board import (
    UNLIMITED,
    Dims,
    Move,
    Player,
    Position,
    TerminalStatus,
    apply_move,
    initial_position,
    legal_moves,
    terminal_status,
)
from .errors import DukegoError, RuleViolation
from .indexer import estimate_states
from .notation import format_dpn, move_from_json, move_to_json, position_to_json
from .solver import Label, SolveResult, best_move, load_cache, save_cache, solve_bounded
from .strategy import GPlayer, MapPlayer, ReductionPlayer, extract_g_strategy
from .tactics import Episode, decide

logger = logging.getLogger(__name__)

AUTO_SOLVE_CAP = 8_000_000
_REDUCTION_BASES = (Dims(7, 8), Dims(6, 9))


class CreateGameRequest(BaseModel):
    rows: int
    cols: int
    whites: int = 0
    blacks: int | Literal["inf"] = "inf"
    firstMover: Literal["D", "G"] = "G"
    humanSide: Literal["D", "G"] = "D"
    policies: dict[str, str] = Field(default_factory=dict)


class MoveRequest(BaseModel):
    move: dict[str, Any]


@dataclass
class HistoryEntry:
    by: Player
    move: Move
    dpn: str
    engine_token: object = None


@dataclass
class GameSession:
    id: str
    config: CreateGameRequest
    position: Position
    history: list[HistoryEntry] = field(default_factory=list)
    engine_token: object = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def human(self) -> Player:
        return Player(self.config.humanSide)

    @property
    def engine(self) -> Player:
        return self.human.opponent


class SolverStore:
    """Lazily solved or disk-loaded results, shared across sessions."""

    def __init__(self, cache_dir: Path | None, auto_cap: int, preloaded: dict | None = None):
        self.cache_dir = cache_dir
        self.auto_cap = auto_cap
        self._lock = threading.Lock()
        self._cache: dict[tuple, SolveResult | None] = dict(preloaded or {})

    def get(self, dims: Dims, whites: int, blacks: int | Any) -> SolveResult | None:
        if not isinstance(blacks, int):
            return None
        key = (dims.rows, dims.cols, whites, blacks)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
            res = None
            path = None
            if self.cache_dir is not None:
                path = Path(self.cache_dir) / f"{dims.rows}x{dims.cols}-w{whites}-b{blacks}.dgc"
                if path.exists():
                    try:
                        res = load_cache(path)
                    except DukegoError as exc:
                        logger.warning("ignoring unreadable cache %s: %s", path, exc)
            if res is None and estimate_states(dims, whites, blacks) <= self.auto_cap:
                res = solve_bounded(dims, whites, blacks)
                if path is not None:
                    path.parent.mkdir(parents=True, exist_ok=True)
                    save_cache(res, path)
            self._cache[key] = res
            return res


class EngineError(Exception):
    pass


@dataclass
class EngineSide:
    """The engine for one side: a policy name resolved into a move source."""

    side: Player
    policy: str
    solver: SolveResult | None
    g_player: GPlayer | None  # for the stone side without a solver

    def move(self, p: Position, token: object) -> tuple[Move, object, str]:
        if self.side is Player.DUKE:
            episode = token if isinstance(token, Episode) else None
            d = decide(p, episode=episode, solve=self.solver)
            return d.move, d.episode, d.rationale
        if self.solver is not None:
            mv = best_move(self.solver, p)
            lab = self.solver.label(p)
            tag = "draw" if lab == Label.DRAW else ("D-win" if lab == Label.D_WIN else "G-win")
            return mv, token, f"Solver({tag})"
        if self.g_player is not None:
            inner = token if token is not None else self.g_player.start()
            mv, inner2 = self.g_player.choose(p, inner)
            return mv, inner2, "Strategy"
        raise EngineError("no move source for the stone player")


def build_engine(
    side: Player,
    policy: str,
    store: SolverStore,
    dims: Dims,
    whites: int,
    blacks: int | Any,
) -> EngineSide:
    solver = None
    g_player: GPlayer | None = None
    if policy not in ("auto", "tactic", "table", "solver", "reduction"):
        raise EngineError(f"unknown engine policy {policy!r}")
    if policy == "table":
        # hand-entered diagram sets are user data; none ship with the engine
        raise EngineError("no diagram set is configured for table play")
    if policy in ("auto", "solver"):
        solver = store.get(dims, whites, blacks)
        if solver is None and policy == "solver":
            raise EngineError(
                f"no solved space for {dims.rows}x{dims.cols} w={whites} b={blacks}"
            )
    if side is Player.GO and solver is None:
        if policy in ("auto", "reduction"):
            g_player = _reduction_player(store, dims, whites, blacks)
        if g_player is None:
            raise EngineError(
                "the stone engine needs a solved space or a reduction for "
                f"{dims.rows}x{dims.cols} w={whites} b={blacks}"
            )
    if side is Player.DUKE and policy == "reduction":
        raise EngineError("reduction strategies play the stone side only")
    return EngineSide(side=side, policy=policy, solver=solver, g_player=g_player)


def _reduction_player(store: SolverStore, dims: Dims, whites: int, blacks: Any) -> GPlayer | None:
    if not isinstance(blacks, int) or whites != 3 or blacks != 0:
        return None
    if dims.rows <= max(b.rows for b in _REDUCTION_BASES) and dims in _REDUCTION_BASES:
        return None
    bases: dict[Dims, GPlayer] = {}
    for base in _REDUCTION_BASES:
        res = store.get(base, 3, 0)
        if res is None:
            return None
        start = initial_position(base, whites=3, blacks=0, first=Player.GO)
        bases[base] = MapPlayer(extract_g_strategy(res, start))
    return ReductionPlayer(dims, bases)


def create_app(
    cache_dir: str | Path | None = None,
    *,
    auto_solve_cap: int = AUTO_SOLVE_CAP,
    cors_origin: str = "*",
    preloaded: dict | None = None,
    snapshot_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="dukego", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin] if cors_origin != "*" else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SolverStore(Path(cache_dir) if cache_dir else None, auto_solve_cap, preloaded)
    sessions: dict[str, GameSession] = {}
    registry_lock = threading.Lock()
    snapshots = Path(snapshot_dir) if snapshot_dir else None

    def snapshot(sess: GameSession) -> None:
        if snapshots is None:
            return
        snapshots.mkdir(parents=True, exist_ok=True)
        data = {
            "id": sess.id,
            "config": sess.config.model_dump(),
            "history": [
                {"by": h.by.value, "move": move_to_json(h.move)} for h in sess.history
            ],
        }
        (snapshots / f"{sess.id}.json").write_text(json.dumps(data, sort_keys=True))

    def restore(game_id: str) -> GameSession | None:
        if snapshots is None:
            return None
        path = snapshots / f"{game_id}.json"
        if not path.exists():
            return None
        data = json.loads(path.read_text())
        cfg = CreateGameRequest(**data["config"])
        blacks = UNLIMITED if cfg.blacks == "inf" else cfg.blacks
        p = initial_position(
            Dims(cfg.rows, cfg.cols), whites=cfg.whites, blacks=blacks, first=Player(cfg.firstMover)
        )
        sess = GameSession(id=data["id"], config=cfg, position=p)
        for entry in data["history"]:
            mv = move_from_json(entry["move"])
            sess.position = apply_move(sess.position, mv)
            sess.history.append(
                HistoryEntry(by=Player(entry["by"]), move=mv, dpn=format_dpn(sess.position))
            )
        return sess

    def get_session(game_id: str) -> GameSession:
        with registry_lock:
            sess = sessions.get(game_id)
            if sess is None:
                sess = restore(game_id)
                if sess is not None:
                    sessions[game_id] = sess
        if sess is None:
            raise HTTPException(404, detail={"code": "unknown_session", "message": game_id})
        return sess

    def engine_for(sess: GameSession) -> EngineSide:
        cfg = sess.config
        side = sess.engine
        policy = cfg.policies.get(side.value, "auto")
        dims = Dims(cfg.rows, cfg.cols)
        blacks = UNLIMITED if cfg.blacks == "inf" else cfg.blacks
        try:
            return build_engine(side, policy, store, dims, cfg.whites, blacks)
        except EngineError as exc:
            raise HTTPException(
                400, detail={"code": "unsupported_engine", "message": str(exc)}
            ) from exc

    def game_state(sess: GameSession, engine_move: tuple[Move, str] | None) -> dict:
        status = terminal_status(sess.position)
        out = {
            "id": sess.id,
            "config": sess.config.model_dump(),
            "position": position_to_json(sess.position),
            "status": status.value,
            "history": [
                {"by": h.by.value, "move": move_to_json(h.move), "dpn": h.dpn}
                for h in sess.history
            ],
            "engineMove": None,
        }
        if engine_move is not None:
            out["engineMove"] = {"move": move_to_json(engine_move[0]), "rationale": engine_move[1]}
        return out

    def play_engine_if_due(sess: GameSession) -> tuple[Move, str] | None:
        if terminal_status(sess.position) is not TerminalStatus.ONGOING:
            return None
        if sess.position.to_move is not sess.engine:
            return None
        eng = engine_for(sess)
        try:
            mv, token, rationale = eng.move(sess.position, sess.engine_token)
        except DukegoError as exc:
            raise HTTPException(
                400, detail={"code": "engine_failure", "message": str(exc)}
            ) from exc
        sess.position = apply_move(sess.position, mv)
        sess.engine_token = token
        sess.history.append(
            HistoryEntry(by=sess.engine, move=mv, dpn=format_dpn(sess.position), engine_token=token)
        )
        return mv, rationale

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/games", status_code=201)
    def create_game(req: CreateGameRequest) -> dict:
        if req.rows < 1 or req.cols < 1 or req.whites < 0:
            raise HTTPException(400, detail={"code": "bad_config", "message": "invalid board or budgets"})
        if isinstance(req.blacks, int) and req.blacks < 0:
            raise HTTPException(400, detail={"code": "bad_config", "message": "negative black budget"})
        blacks = UNLIMITED if req.blacks == "inf" else req.blacks
        try:
            position = initial_position(
                Dims(req.rows, req.cols),
                whites=req.whites,
                blacks=blacks,
                first=Player(req.firstMover),
            )
        except DukegoError as exc:
            raise HTTPException(400, detail={"code": "bad_config", "message": str(exc)}) from exc
        sess = GameSession(id=secrets.token_hex(8), config=req, position=position)
        engine_for(sess)  # validate the engine setup before exposing the session
        engine_move = play_engine_if_due(sess)
        with registry_lock:
            sessions[sess.id] = sess
        snapshot(sess)
        return game_state(sess, engine_move)

    @app.get("/games/{game_id}")
    def get_game(game_id: str) -> dict:
        sess = get_session(game_id)
        with sess.lock:
            return game_state(sess, None)

    @app.post("/games/{game_id}/moves")
    def submit_move(game_id: str, req: MoveRequest) -> dict:
        sess = get_session(game_id)
        with sess.lock:
            if terminal_status(sess.position) is not TerminalStatus.ONGOING:
                raise HTTPException(400, detail={"code": "game_over", "message": "the game has ended"})
            if sess.position.to_move is not sess.human:
                raise HTTPException(400, detail={"code": "wrong_turn", "message": "not the human side's turn"})
            try:
                mv = move_from_json(req.move)
            except (KeyError, ValueError) as exc:
                raise HTTPException(400, detail={"code": "bad_move", "message": str(exc)}) from exc
            try:
                sess.position = apply_move(sess.position, mv)
            except RuleViolation as exc:
                raise HTTPException(400, detail={"code": "illegal_move", "message": str(exc)}) from exc
            sess.history.append(
                HistoryEntry(
                    by=sess.human, move=mv, dpn=format_dpn(sess.position), engine_token=sess.engine_token
                )
            )
            engine_move = play_engine_if_due(sess)
            snapshot(sess)
            return game_state(sess, engine_move)

    @app.post("/games/{game_id}/undo")
    def undo(game_id: str) -> dict:
        sess = get_session(game_id)
        with sess.lock:
            idx = None
            for i in range(len(sess.history) - 1, -1, -1):
                if sess.history[i].by is sess.human:
                    idx = i
                    break
            if idx is None:
                raise HTTPException(400, detail={"code": "nothing_to_undo", "message": "no human move yet"})
            sess.history = sess.history[:idx]
            cfg = sess.config
            blacks = UNLIMITED if cfg.blacks == "inf" else cfg.blacks
            p = initial_position(
                Dims(cfg.rows, cfg.cols), whites=cfg.whites, blacks=blacks, first=Player(cfg.firstMover)
            )
            for entry in sess.history:
                p = apply_move(p, entry.move)
            sess.position = p
            sess.engine_token = sess.history[idx - 1].engine_token if idx > 0 else None
            snapshot(sess)
            return game_state(sess, None)

    @app.get("/games/{game_id}/hint")
    def hint(game_id: str) -> dict:
        sess = get_session(game_id)
        with sess.lock:
            if terminal_status(sess.position) is not TerminalStatus.ONGOING:
                raise HTTPException(400, detail={"code": "game_over", "message": "the game has ended"})
            side = sess.position.to_move
            cfg = sess.config
            dims = Dims(cfg.rows, cfg.cols)
            blacks = UNLIMITED if cfg.blacks == "inf" else cfg.blacks
            solver = store.get(dims, cfg.whites, blacks)
            if side is Player.DUKE:
                d = decide(sess.position, episode=None, solve=solver)
                return {
                    "move": move_to_json(d.move),
                    "rationale": d.rationale,
                    "tactic": d.report.to_json() if d.report else None,
                }
            if solver is not None:
                mv = best_move(solver, sess.position)
                lab = solver.label(sess.position)
                dist = solver.distance(sess.position)
                tag = "draw" if lab == Label.DRAW else ("D-win" if lab == Label.D_WIN else "G-win")
                extra = f",dist={dist}" if dist is not None else ""
                return {"move": move_to_json(mv), "rationale": f"Solver({tag}{extra})"}
            mv = _blocking_heuristic(sess.position)
            return {"move": move_to_json(mv), "rationale": "Block"}

    @app.get("/games/{game_id}/eval")
    def evaluate(game_id: str) -> dict:
        sess = get_session(game_id)
        with sess.lock:
            cfg = sess.config
            dims = Dims(cfg.rows, cfg.cols)
            blacks = UNLIMITED if cfg.blacks == "inf" else cfg.blacks
            solver = store.get(dims, cfg.whites, blacks)
            if solver is None:
                raise HTTPException(
                    409, detail={"code": "unsolved", "message": "unsolved configuration"}
                )
            if terminal_status(sess.position) is not TerminalStatus.ONGOING:
                return {"moves": []}
            out = []
            for mv in legal_moves(sess.position):
                succ = apply_move(sess.position, mv)
                lab = solver.label(succ)
                entry = {
                    "move": move_to_json(mv),
                    "label": {
                        Label.D_WIN: "d-win",
                        Label.DRAW: "draw",
                        Label.G_WIN_IMMOBILIZED: "g-win-immobilized",
                    }[lab],
                }
                dist = solver.distance(succ)
                if dist is not None:
                    entry["distance"] = dist
                out.append(entry)
            return {"moves": out}

    return app


def _blocking_heuristic(p: Position) -> Move:
    """A plain stopgap for stone hints without a solver: block the nearest
    escape, else the first legal move."""
    moves = legal_moves(p)
    dims = p.dims
    duke = p.duke
    dists = {
        "S": dims.rows - duke.row,
        "N": duke.row - 1,
        "E": dims.cols - duke.col,
        "W": duke.col - 1,
    }
    order = sorted(dists, key=dists.get)
    from .board import Direction, PlaceBlack, PlaceWhite

    for name in order:
        tgt = duke.step(Direction[name])
        if dims.contains(tgt) and p.is_empty(tgt):
            for mv in moves:
                if isinstance(mv, (PlaceBlack, PlaceWhite)) and mv.to == tgt:
                    return mv
    return moves[0]
