"""Textual position notation (DPN), move text and JSON wire formats.

DPN grammar, one line, fields space-separated::

    <m>x<n> D<r>,<c> B[<r>,<c>;...] W[<r>,<c>;...] <D|G> w<int> b<int|inf>

``w``/``b`` carry the stones still in hand.  Examples::

    8x8 D5,5 B[] W[] G w3 b0
    6x9 D4,5 B[] W[] G w0 binf

Move text: ``N S E W`` for duke steps, ``B<r>,<c>`` / ``W<r>,<c>`` for
placements, ``W<r>,<c>><r>,<c>`` for a relocation, ``pass``.
"""

from __future__ import annotations

import re
from typing import Any, Union

from .board import (
    UNLIMITED,
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
    _Unlimited,
)
from .errors import DpnError


def format_dpn(p: Position) -> str:
    """Render a position as a single DPN line."""
    blacks = ";".join(f"{s.row},{s.col}" for s in sorted(p.blacks))
    whites = ";".join(f"{s.row},{s.col}" for s in sorted(p.whites))
    hand_b = p.inventory.blacks_in_hand
    b_text = "inf" if hand_b is UNLIMITED else str(hand_b)
    return (
        f"{p.dims.rows}x{p.dims.cols} D{p.duke.row},{p.duke.col} "
        f"B[{blacks}] W[{whites}] {p.to_move.value} "
        f"w{p.inventory.whites_in_hand} b{b_text}"
    )


_DPN_FIELDS = re.compile(r"\S+")


def parse_dpn(text: str) -> Position:
    """Parse a DPN line.

    Raises DpnError (with the column) for syntax errors; structural problems
    (out-of-bounds or overlapping pieces) surface as PositionError subclasses.
    """
    fields = [(m.start() + 1, m.group()) for m in _DPN_FIELDS.finditer(text)]
    if len(fields) != 7:
        raise DpnError(f"expected 7 fields, found {len(fields)}", column=1)
    (c_dims, f_dims), (c_duke, f_duke), (c_b, f_b), (c_w, f_w), (c_mv, f_mv), (c_wh, f_wh), (c_bh, f_bh) = fields

    m = re.fullmatch(r"(\d+)x(\d+)", f_dims)
    if not m:
        raise DpnError(f"bad dimensions {f_dims!r}", column=c_dims)
    dims = Dims(int(m.group(1)), int(m.group(2)))

    m = re.fullmatch(r"D(\d+),(\d+)", f_duke)
    if not m:
        raise DpnError(f"bad duke square {f_duke!r}", column=c_duke)
    duke = Square(int(m.group(1)), int(m.group(2)))

    blacks = _parse_stone_list(f_b, "B", c_b)
    whites = _parse_stone_list(f_w, "W", c_w)

    if f_mv not in ("D", "G"):
        raise DpnError(f"bad side to move {f_mv!r}", column=c_mv)
    to_move = Player(f_mv)

    m = re.fullmatch(r"w(\d+)", f_wh)
    if not m:
        raise DpnError(f"bad white hand {f_wh!r}", column=c_wh)
    whites_hand = int(m.group(1))

    m = re.fullmatch(r"b(\d+|inf)", f_bh)
    if not m:
        raise DpnError(f"bad black hand {f_bh!r}", column=c_bh)
    blacks_hand: Union[int, _Unlimited] = UNLIMITED if m.group(1) == "inf" else int(m.group(1))

    return Position(
        dims=dims,
        duke=duke,
        blacks=blacks,
        whites=whites,
        to_move=to_move,
        inventory=Inventory(whites_in_hand=whites_hand, blacks_in_hand=blacks_hand),
    )


def _parse_stone_list(field: str, tag: str, column: int) -> frozenset[Square]:
    m = re.fullmatch(re.escape(tag) + r"\[([^]]*)\]", field)
    if not m:
        raise DpnError(f"bad stone list {field!r}", column=column)
    body = m.group(1)
    if not body:
        return frozenset()
    stones = []
    for part in body.split(";"):
        pm = re.fullmatch(r"(\d+),(\d+)", part)
        if not pm:
            raise DpnError(f"bad square {part!r} in {tag} list", column=column)
        stones.append(Square(int(pm.group(1)), int(pm.group(2))))
    if len(set(stones)) != len(stones):
        raise DpnError(f"duplicate square in {tag} list", column=column)
    return frozenset(stones)


# -- move text ---------------------------------------------------------------

_MOVE_RELOC = re.compile(r"W(\d+),(\d+)>(\d+),(\d+)")
_MOVE_PLACE = re.compile(r"([BW])(\d+),(\d+)")


def format_move(mv: Move) -> str:
    if isinstance(mv, DukeStep):
        return mv.direction.name
    if isinstance(mv, PlaceBlack):
        return f"B{mv.to.row},{mv.to.col}"
    if isinstance(mv, PlaceWhite):
        return f"W{mv.to.row},{mv.to.col}"
    if isinstance(mv, RelocateWhite):
        return f"W{mv.src.row},{mv.src.col}>{mv.to.row},{mv.to.col}"
    if isinstance(mv, Pass):
        return "pass"
    raise ValueError(f"unknown move {mv!r}")


def parse_move(text: str) -> Move:
    text = text.strip()
    if text in ("N", "S", "E", "W"):
        return DukeStep(Direction[text])
    if text == "pass":
        return Pass()
    m = _MOVE_RELOC.fullmatch(text)
    if m:
        a, b, c, d = map(int, m.groups())
        return RelocateWhite(Square(a, b), Square(c, d))
    m = _MOVE_PLACE.fullmatch(text)
    if m:
        sq = Square(int(m.group(2)), int(m.group(3)))
        return PlaceBlack(sq) if m.group(1) == "B" else PlaceWhite(sq)
    raise ValueError(f"bad move text {text!r}")


# -- JSON wire format --------------------------------------------------------


def move_to_json(mv: Move) -> dict[str, Any]:
    if isinstance(mv, DukeStep):
        return {"type": "step", "dir": mv.direction.name}
    if isinstance(mv, PlaceBlack):
        return {"type": "placeBlack", "to": {"row": mv.to.row, "col": mv.to.col}}
    if isinstance(mv, PlaceWhite):
        return {"type": "placeWhite", "to": {"row": mv.to.row, "col": mv.to.col}}
    if isinstance(mv, RelocateWhite):
        return {
            "type": "relocateWhite",
            "from": {"row": mv.src.row, "col": mv.src.col},
            "to": {"row": mv.to.row, "col": mv.to.col},
        }
    if isinstance(mv, Pass):
        return {"type": "pass"}
    raise ValueError(f"unknown move {mv!r}")


def move_from_json(data: dict[str, Any]) -> Move:
    kind = data.get("type")
    if kind == "step":
        return DukeStep(Direction[data["dir"]])
    if kind == "placeBlack":
        return PlaceBlack(_sq(data["to"]))
    if kind == "placeWhite":
        return PlaceWhite(_sq(data["to"]))
    if kind == "relocateWhite":
        return RelocateWhite(_sq(data["from"]), _sq(data["to"]))
    if kind == "pass":
        return Pass()
    raise ValueError(f"unknown move type {kind!r}")


def _sq(data: dict[str, Any]) -> Square:
    return Square(int(data["row"]), int(data["col"]))


def position_to_json(p: Position) -> dict[str, Any]:
    hand_b = p.inventory.blacks_in_hand
    return {
        "dpn": format_dpn(p),
        "rows": p.dims.rows,
        "cols": p.dims.cols,
        "duke": {"row": p.duke.row, "col": p.duke.col},
        "blacks": [{"row": s.row, "col": s.col} for s in sorted(p.blacks)],
        "whites": [{"row": s.row, "col": s.col} for s in sorted(p.whites)],
        "toMove": p.to_move.value,
        "hands": {
            "whites": p.inventory.whites_in_hand,
            "blacks": "inf" if hand_b is UNLIMITED else hand_b,
        },
    }
