"""Dukego: rules engine, exact solvers, tactics and strategy toolkit."""

from .board import (
    UNLIMITED,
    BoardTransform,
    Dims,
    Direction,
    DukeStep,
    Inventory,
    Move,
    Pass,
    PlaceBlack,
    PlaceWhite,
    Player,
    Position,
    RelocateWhite,
    Square,
    TerminalStatus,
    apply_move,
    canonicalize,
    duke_start,
    duke_steps,
    initial_position,
    legal_moves,
    symmetry_group,
    terminal_status,
)
from .notation import format_dpn, format_move, parse_dpn, parse_move


def __getattr__(name):
    # heavier modules load on first use so `import dukego` stays light
    lazy = {
        "solve_bounded": "solver",
        "fairness_entry": "solver",
        "best_move": "solver",
        "query_label": "solver",
        "Label": "solver",
        "SolveResult": "solver",
        "save_cache": "solver",
        "load_cache": "solver",
        "solve_monotone": "monotone",
        "duke_policy": "tactics",
        "decide": "tactics",
        "detect_imminent_win": "tactics",
        "detect_corner_win": "tactics",
        "fantastic_direction": "tactics",
        "StateIndexer": "indexer",
        "parse_diagrams": "diagrams",
        "validate_local": "diagrams",
        "extract_g_strategy": "strategy",
        "verify_g_strategy": "strategy",
        "g_table_move": "strategy",
    }
    if name in lazy:
        import importlib

        module = importlib.import_module(f".{lazy[name]}", __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


__all__ = [
    "UNLIMITED",
    "BoardTransform",
    "Dims",
    "Direction",
    "DukeStep",
    "Inventory",
    "Move",
    "Pass",
    "PlaceBlack",
    "PlaceWhite",
    "Player",
    "Position",
    "RelocateWhite",
    "Square",
    "TerminalStatus",
    "apply_move",
    "canonicalize",
    "duke_start",
    "duke_steps",
    "initial_position",
    "legal_moves",
    "symmetry_group",
    "terminal_status",
    "format_dpn",
    "format_move",
    "parse_dpn",
    "parse_move",
]

__version__ = "0.1.0"
