// Wire types mirroring the game service's JSON schemas.

export type Side = "D" | "G";

export interface Coord {
  row: number;
  col: number;
}

export type MoveJson =
  | { type: "step"; dir: "N" | "S" | "E" | "W" }
  | { type: "placeBlack"; to: Coord }
  | { type: "placeWhite"; to: Coord }
  | { type: "relocateWhite"; from: Coord; to: Coord }
  | { type: "pass" };

export interface PositionView {
  dpn: string;
  rows: number;
  cols: number;
  duke: Coord;
  blacks: Coord[];
  whites: Coord[];
  toMove: Side;
  hands: { whites: number; blacks: number | "inf" };
}

export type GameStatus = "ongoing" | "d-win" | "g-win-immobilized";

export interface EngineMove {
  move: MoveJson;
  rationale: string;
}

export interface HistoryEntry {
  by: Side;
  move: MoveJson;
  dpn: string;
}

export interface GameState {
  id: string;
  config: GameConfig;
  position: PositionView;
  status: GameStatus;
  engineMove: EngineMove | null;
  history: HistoryEntry[];
}

export interface GameConfig {
  rows: number;
  cols: number;
  whites: number;
  blacks: number | "inf";
  firstMover: Side;
  humanSide: Side;
  policies?: Record<string, string>;
}

export interface Hint {
  move: MoveJson;
  rationale: string;
}

export type EvalLabel = "d-win" | "draw" | "g-win-immobilized";

export interface EvalEntry {
  move: MoveJson;
  label: EvalLabel;
  distance?: number;
}

export interface EvalResponse {
  moves: EvalEntry[];
}
