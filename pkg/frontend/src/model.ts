// Pure view logic: board projection, interaction reducer, overlays, badges.
// No rules are computed here; every judgement shown comes from the service.

import type {
  Coord,
  EvalEntry,
  GameState,
  GameStatus,
  MoveJson,
  PositionView,
  Side,
} from "./types.js";

export type CellContent = "empty" | "duke" | "black" | "white";

export interface CellModel {
  row: number;
  col: number;
  content: CellContent;
  isEdge: boolean;
  hint: boolean;
  hintGhost: CellContent | null;
  evalLabel: string | null;
  selected: boolean;
}

export interface UiState {
  selection: Coord | null;
  stoneColor: "black" | "white";
}

export const initialUiState: UiState = { selection: null, stoneColor: "black" };

const sameCoord = (a: Coord | null | undefined, b: Coord | null | undefined): boolean =>
  !!a && !!b && a.row === b.row && a.col === b.col;

export function moveTarget(move: MoveJson): Coord | null {
  switch (move.type) {
    case "step":
      return null; // resolved against the duke's square by the caller
    case "placeBlack":
    case "placeWhite":
    case "relocateWhite":
      return move.to;
    case "pass":
      return null;
  }
}

export function stepTarget(position: PositionView, dir: "N" | "S" | "E" | "W"): Coord {
  const deltas = { N: [-1, 0], S: [1, 0], E: [0, 1], W: [0, -1] } as const;
  const [dr, dc] = deltas[dir];
  return { row: position.duke.row + dr, col: position.duke.col + dc };
}

function contentAt(position: PositionView, row: number, col: number): CellContent {
  if (sameCoord(position.duke, { row, col })) return "duke";
  if (position.blacks.some((s) => sameCoord(s, { row, col }))) return "black";
  if (position.whites.some((s) => sameCoord(s, { row, col }))) return "white";
  return "empty";
}

export interface Overlays {
  hint?: MoveJson | null;
  evalEntries?: EvalEntry[] | null;
}

export function boardModel(
  position: PositionView,
  ui: UiState,
  overlays: Overlays = {},
): CellModel[][] {
  const hintMove = overlays.hint ?? null;
  const hintCoord =
    hintMove === null
      ? null
      : hintMove.type === "step"
        ? stepTarget(position, hintMove.dir)
        : moveTarget(hintMove);
  const hintGhost: CellContent | null =
    hintMove === null
      ? null
      : hintMove.type === "step"
        ? "duke"
        : hintMove.type === "placeBlack"
          ? "black"
          : hintMove.type === "placeWhite" || hintMove.type === "relocateWhite"
            ? "white"
            : null;
  const evalByCoord = new Map<string, string>();
  for (const entry of overlays.evalEntries ?? []) {
    const coord =
      entry.move.type === "step" ? stepTarget(position, entry.move.dir) : moveTarget(entry.move);
    if (coord) evalByCoord.set(`${coord.row},${coord.col}`, entry.label);
    if (entry.move.type === "step") {
      const c = stepTarget(position, entry.move.dir);
      evalByCoord.set(`${c.row},${c.col}`, entry.label);
    }
  }
  const grid: CellModel[][] = [];
  for (let row = 1; row <= position.rows; row++) {
    const line: CellModel[] = [];
    for (let col = 1; col <= position.cols; col++) {
      line.push({
        row,
        col,
        content: contentAt(position, row, col),
        isEdge: row === 1 || row === position.rows || col === 1 || col === position.cols,
        hint: sameCoord(hintCoord, { row, col }),
        hintGhost: sameCoord(hintCoord, { row, col }) ? hintGhost : null,
        evalLabel: evalByCoord.get(`${row},${col}`) ?? null,
        selected: sameCoord(ui.selection, { row, col }),
      });
    }
    grid.push(line);
  }
  return grid;
}

export type Interaction =
  | { kind: "move"; move: MoveJson }
  | { kind: "select"; ui: UiState }
  | { kind: "deselect"; ui: UiState }
  | { kind: "none" };

/** Map a cell click to a move or a selection change for the human side. */
export function clickCell(
  position: PositionView,
  humanSide: Side,
  ui: UiState,
  cell: Coord,
): Interaction {
  if (position.toMove !== humanSide) {
    return { kind: "none" };
  }
  const content = contentAt(position, cell.row, cell.col);
  if (humanSide === "D") {
    const dirs = ["N", "S", "E", "W"] as const;
    for (const dir of dirs) {
      if (sameCoord(stepTarget(position, dir), cell) && content === "empty") {
        return { kind: "move", move: { type: "step", dir } };
      }
    }
    return { kind: "none" };
  }
  // stone player
  if (content === "white") {
    if (sameCoord(ui.selection, cell)) {
      return { kind: "deselect", ui: { ...ui, selection: null } };
    }
    return { kind: "select", ui: { ...ui, selection: cell } };
  }
  if (content !== "empty") {
    return { kind: "none" };
  }
  if (ui.selection) {
    return { kind: "move", move: { type: "relocateWhite", from: ui.selection, to: cell } };
  }
  const color = pickStoneColor(position, ui.stoneColor);
  if (color === null) {
    return { kind: "none" };
  }
  return {
    kind: "move",
    move: color === "black" ? { type: "placeBlack", to: cell } : { type: "placeWhite", to: cell },
  };
}

/** The colour actually placeable, honouring hands and the user's preference. */
export function pickStoneColor(
  position: PositionView,
  preferred: "black" | "white",
): "black" | "white" | null {
  const blacks = position.hands.blacks;
  const canBlack = blacks === "inf" || blacks > 0;
  const canWhite = position.hands.whites > 0;
  if (preferred === "black" && canBlack) return "black";
  if (preferred === "white" && canWhite) return "white";
  if (canBlack) return "black";
  if (canWhite) return "white";
  return null;
}

/** The pass button exists only in the wandering-stone variant. */
export function passAvailable(state: GameState): boolean {
  return state.config.blacks !== "inf" && state.config.humanSide === "G";
}

export function rationaleBadge(rationale: string): string {
  const head = rationale.split("(")[0];
  switch (head) {
    case "ImminentWin":
      return "Imminent Win";
    case "CornerWin":
      return "Corner Win";
    case "Fantastic":
      return "Fantastic Imminent Win";
    case "EdgeStep":
      return "Edge step";
    case "Solver":
      return "Solver";
    case "Opening":
      return "Opening";
    case "Strategy":
      return "Strategy table";
    case "Block":
      return "Block";
    case "Greedy":
      return "March";
    default:
      return rationale;
  }
}

export function bannerFor(status: GameStatus, humanSide: Side): string | null {
  switch (status) {
    case "d-win":
      return humanSide === "D" ? "Duke escapes! You win." : "Duke escapes! The engine wins.";
    case "g-win-immobilized":
      return humanSide === "G"
        ? "Duke immobilized. You win."
        : "Duke immobilized. The engine wins.";
    default:
      return null;
  }
}

/** The drawn-fortress callout, shown when every evaluated reply keeps a draw. */
export function fortressBanner(entries: EvalEntry[], toMove: Side): string | null {
  if (toMove === "G" && entries.length > 0 && entries.some((e) => e.label === "draw")) {
    return "Drawn fortress available: the stone player can hold forever.";
  }
  return null;
}

/** Swap rows/cols so the long edge renders horizontally. */
export function normalizeDims(rows: number, cols: number): { rows: number; cols: number } {
  return rows > cols ? { rows: cols, cols: rows } : { rows, cols };
}

export function describeMove(move: MoveJson): string {
  switch (move.type) {
    case "step":
      return `duke ${move.dir}`;
    case "placeBlack":
      return `black ${move.to.row},${move.to.col}`;
    case "placeWhite":
      return `white ${move.to.row},${move.to.col}`;
    case "relocateWhite":
      return `white ${move.from.row},${move.from.col} > ${move.to.row},${move.to.col}`;
    case "pass":
      return "pass";
  }
}
