"""Positional strategy diagrams: parsing, formatting and local validation.

A diagram maps Duke squares (marked with lowercase cover letters) to the
strategic squares (uppercase letters) the stone player must keep covered
while the Duke stands there.  A ``+`` additionally demands a tactical stone
on the edge square next to the Duke.  ``#`` after an uppercase letter shades
the square: stones placed there must be black.  A trailing ``><id>`` sends
play to another diagram the moment the Duke enters the cell.

Text format, one or more blocks separated by ``---``::

    diagram: 1
    dims: 2x3
    first: Fb
    .   b   Aa+
    ab  B#a .

Cell tokens concatenate, in order: optional uppercase letter, optional
``#``, lowercase cover letters, optional ``+``, optional ``><id>``.  A bare
``.`` is an unlabeled cell.  The first block is the set's start diagram;
``first:`` stipulates the stone player's scripted first placement (letter
then color, ``b`` or ``w``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .board import Dims, Square
from .errors import DiagramError


@dataclass(frozen=True)
class Cell:
    cover_letters: frozenset[str] = frozenset()
    tactical: bool = False
    strategic_letter: str | None = None
    black_required: bool = False
    transition: int | None = None

    @property
    def labeled(self) -> bool:
        return bool(self.cover_letters) or self.tactical

    @property
    def letters_with_plus(self) -> frozenset[str]:
        return self.cover_letters | ({"+"} if self.tactical else frozenset())


@dataclass(frozen=True)
class Diagram:
    id: int
    dims: Dims
    cells: tuple[tuple[Cell, ...], ...]

    def cell(self, sq: Square) -> Cell:
        return self.cells[sq.row - 1][sq.col - 1]

    def strategic_squares(self) -> dict[str, Square]:
        out: dict[str, Square] = {}
        for r, row in enumerate(self.cells, start=1):
            for c, cell in enumerate(row, start=1):
                if cell.strategic_letter:
                    out[cell.strategic_letter] = Square(r, c)
        return out


@dataclass(frozen=True)
class DiagramSet:
    diagrams: tuple[Diagram, ...]
    start_diagram: int
    stipulated_first_move: tuple[str, str] | None = None  # (letter, "b"|"w")

    def diagram(self, diagram_id: int) -> Diagram:
        for d in self.diagrams:
            if d.id == diagram_id:
                return d
        raise DiagramError(f"no diagram with id {diagram_id}")


@dataclass(frozen=True)
class LocalViolation:
    """One failure of the neighbour-letter condition or an ambiguous ``+``."""

    kind: str  # "letters" or "ambiguous-plus"
    at: Square
    neighbour: Square | None = None
    detail: str = ""

    def __str__(self) -> str:
        if self.neighbour is not None:
            return f"{self.kind} at {self.at} vs {self.neighbour}: {self.detail}"
        return f"{self.kind} at {self.at}: {self.detail}"


_TOKEN = re.compile(r"([A-Z])?(#)?([a-z]*)(\+)?(?:>(\d+))?")


def _parse_token(tok: str, row: int, col: int) -> Cell:
    if tok == ".":
        return Cell()
    m = _TOKEN.fullmatch(tok)
    if not m or tok == "":
        raise DiagramError(f"bad cell token {tok!r}", row=row, col=col)
    upper, shade, lowers, plus, trans = m.groups()
    if shade and not upper:
        raise DiagramError(f"shading without a strategic letter in {tok!r}", row=row, col=col)
    return Cell(
        cover_letters=frozenset(lowers),
        tactical=bool(plus),
        strategic_letter=upper,
        black_required=bool(shade),
        transition=int(trans) if trans is not None else None,
    )


def parse_diagrams(text: str) -> DiagramSet:
    """Parse a diagram-set file; raises DiagramError with cell coordinates."""
    blocks = [b.strip() for b in text.split("---")]
    blocks = [b for b in blocks if b]
    if not blocks:
        raise DiagramError("empty diagram text")
    diagrams: list[Diagram] = []
    first_move: tuple[str, str] | None = None
    for block in blocks:
        lines = [ln.strip() for ln in block.splitlines() if ln.strip()]
        diagram_id: int | None = None
        dims: Dims | None = None
        rows: list[tuple[Cell, ...]] = []
        for ln in lines:
            if ln.startswith("diagram:"):
                diagram_id = int(ln.split(":", 1)[1])
                continue
            if ln.startswith("dims:"):
                m = re.fullmatch(r"(\d+)x(\d+)", ln.split(":", 1)[1].strip())
                if not m:
                    raise DiagramError(f"bad dims line {ln!r}")
                dims = Dims(int(m.group(1)), int(m.group(2)))
                continue
            if ln.startswith("first:"):
                m = re.fullmatch(r"([A-Z])([bw])", ln.split(":", 1)[1].strip())
                if not m:
                    raise DiagramError(f"bad first-move line {ln!r}")
                if first_move is not None:
                    raise DiagramError("duplicate first-move stipulation")
                first_move = (m.group(1), m.group(2))
                continue
            if diagram_id is None or dims is None:
                raise DiagramError("cell rows before diagram/dims headers")
            r = len(rows) + 1
            tokens = ln.split()
            if len(tokens) != dims.cols:
                raise DiagramError(
                    f"expected {dims.cols} cells, found {len(tokens)}", row=r
                )
            rows.append(tuple(_parse_token(t, r, c) for c, t in enumerate(tokens, start=1)))
        if diagram_id is None or dims is None:
            raise DiagramError("diagram block without id or dims")
        if len(rows) != dims.rows:
            raise DiagramError(f"expected {dims.rows} rows, found {len(rows)}")
        diagrams.append(Diagram(id=diagram_id, dims=dims, cells=tuple(rows)))

    ids = [d.id for d in diagrams]
    if len(set(ids)) != len(ids):
        raise DiagramError("duplicate diagram ids")
    ds = DiagramSet(
        diagrams=tuple(diagrams),
        start_diagram=diagrams[0].id,
        stipulated_first_move=first_move,
    )
    _validate_structure(ds)
    return ds


def _validate_structure(ds: DiagramSet) -> None:
    ids = {d.id for d in ds.diagrams}
    dims = ds.diagrams[0].dims
    for d in ds.diagrams:
        if d.dims != dims:
            raise DiagramError(f"diagram {d.id} dims differ from the set's {dims}")
        seen_upper: dict[str, Square] = {}
        for r, row in enumerate(d.cells, start=1):
            for c, cell in enumerate(row, start=1):
                if cell.strategic_letter:
                    if cell.strategic_letter in seen_upper:
                        raise DiagramError(
                            f"duplicate strategic letter {cell.strategic_letter}",
                            row=r,
                            col=c,
                        )
                    seen_upper[cell.strategic_letter] = Square(r, c)
                if cell.transition is not None and cell.transition not in ids:
                    raise DiagramError(
                        f"transition to unknown diagram {cell.transition}", row=r, col=c
                    )
        for r, row in enumerate(d.cells, start=1):
            for c, cell in enumerate(row, start=1):
                dangling = cell.cover_letters - {x.lower() for x in seen_upper}
                if dangling:
                    raise DiagramError(
                        f"cover letter {min(dangling)!r} has no strategic square",
                        row=r,
                        col=c,
                    )
    if ds.stipulated_first_move is not None:
        letter = ds.stipulated_first_move[0]
        start = ds.diagram(ds.start_diagram)
        if letter not in start.strategic_squares():
            raise DiagramError(
                f"stipulated first move {letter} is not a strategic square of the start diagram"
            )


def format_diagrams(ds: DiagramSet) -> str:
    """Render a diagram set; parse_diagrams round-trips it."""
    blocks = []
    for i, d in enumerate(ds.diagrams):
        lines = [f"diagram: {d.id}", f"dims: {d.dims.rows}x{d.dims.cols}"]
        if i == 0 and ds.stipulated_first_move:
            lines.append(f"first: {ds.stipulated_first_move[0]}{ds.stipulated_first_move[1]}")
        for row in d.cells:
            lines.append(" ".join(_format_token(c) for c in row))
        blocks.append("\n".join(lines))
    return "\n---\n".join(blocks) + "\n"


def _format_token(cell: Cell) -> str:
    if not cell.labeled and cell.strategic_letter is None and cell.transition is None:
        return "."
    parts = []
    if cell.strategic_letter:
        parts.append(cell.strategic_letter)
        if cell.black_required:
            parts.append("#")
    parts.append("".join(sorted(cell.cover_letters)))
    if cell.tactical:
        parts.append("+")
    if cell.transition is not None:
        parts.append(f">{cell.transition}")
    return "".join(parts)


def validate_local(d: Diagram) -> list[LocalViolation]:
    """Check the one-stone-move condition between adjacent labeled cells.

    Every labeled cell must contain all letters, save at most one, of each
    labeled neighbour (``+`` counts as a letter).  Also flags ``+`` cells
    adjacent to two edges, whose tactical square would be ambiguous.
    """
    out: list[LocalViolation] = []
    for r in range(1, d.dims.rows + 1):
        for c in range(1, d.dims.cols + 1):
            here = Square(r, c)
            cell = d.cell(here)
            if not cell.labeled:
                continue
            mine = cell.letters_with_plus
            for dr, dc in ((0, 1), (1, 0)):
                nb = Square(r + dr, c + dc)
                if not d.dims.contains(nb):
                    continue
                other_cell = d.cell(nb)
                if not other_cell.labeled:
                    continue
                other = other_cell.letters_with_plus
                if len(other - mine) > 1:
                    out.append(
                        LocalViolation(
                            "letters", here, nb,
                            f"{_fmt(other - mine)} missing here",
                        )
                    )
                if len(mine - other) > 1:
                    out.append(
                        LocalViolation(
                            "letters", nb, here,
                            f"{_fmt(mine - other)} missing there",
                        )
                    )
            if cell.tactical:
                near_edges = sum(
                    1
                    for lim, coord in ((1, r), (d.dims.rows, r), (1, c), (d.dims.cols, c))
                    if abs(coord - lim) == 1
                )
                if near_edges != 1:
                    out.append(
                        LocalViolation(
                            "ambiguous-plus", here,
                            detail=f"{near_edges} edges at distance one",
                        )
                    )
    return out


def _fmt(letters: frozenset[str]) -> str:
    return "{" + ",".join(sorted(letters)) + "}"
