import { describe, expect, it } from "vitest";

import {
  bannerFor,
  boardModel,
  clickCell,
  fortressBanner,
  initialUiState,
  normalizeDims,
  passAvailable,
  pickStoneColor,
  rationaleBadge,
  stepTarget,
} from "../src/model.js";
import type { GameState, PositionView } from "../src/types.js";

const position = (over: Partial<PositionView> = {}): PositionView => ({
  dpn: "5x5 D3,3 B[] W[] D w3 b0",
  rows: 5,
  cols: 5,
  duke: { row: 3, col: 3 },
  blacks: [],
  whites: [],
  toMove: "D",
  hands: { whites: 3, blacks: 0 },
  ...over,
});

const game = (over: Partial<GameState> = {}): GameState => ({
  id: "x",
  config: {
    rows: 5,
    cols: 5,
    whites: 3,
    blacks: 0,
    firstMover: "G",
    humanSide: "D",
  },
  position: position(),
  status: "ongoing",
  engineMove: null,
  history: [],
  ...over,
});

describe("boardModel", () => {
  it("projects pieces and edges", () => {
    const grid = boardModel(
      position({ blacks: [{ row: 1, col: 1 }], whites: [{ row: 2, col: 4 }] }),
      initialUiState,
    );
    expect(grid[2][2].content).toBe("duke");
    expect(grid[0][0].content).toBe("black");
    expect(grid[0][0].isEdge).toBe(true);
    expect(grid[1][3].content).toBe("white");
    expect(grid[2][2].isEdge).toBe(false);
  });

  it("marks the hint target with a ghost piece", () => {
    const grid = boardModel(position(), initialUiState, {
      hint: { type: "step", dir: "S" },
    });
    expect(grid[3][2].hint).toBe(true);
    expect(grid[3][2].hintGhost).toBe("duke");
  });

  it("colours eval targets by label", () => {
    const grid = boardModel(position({ toMove: "G" }), initialUiState, {
      evalEntries: [
        { move: { type: "placeWhite", to: { row: 1, col: 2 } }, label: "d-win" },
        { move: { type: "placeWhite", to: { row: 4, col: 4 } }, label: "draw" },
      ],
    });
    expect(grid[0][1].evalLabel).toBe("d-win");
    expect(grid[3][3].evalLabel).toBe("draw");
    expect(grid[0][0].evalLabel).toBeNull();
  });
});

describe("clickCell for the duke", () => {
  it("maps an adjacent empty cell to a step", () => {
    const action = clickCell(position(), "D", initialUiState, { row: 4, col: 3 });
    expect(action).toEqual({ kind: "move", move: { type: "step", dir: "S" } });
  });

  it("ignores far or occupied cells", () => {
    expect(clickCell(position(), "D", initialUiState, { row: 1, col: 1 }).kind).toBe("none");
    const blocked = position({ blacks: [{ row: 2, col: 3 }] });
    expect(clickCell(blocked, "D", initialUiState, { row: 2, col: 3 }).kind).toBe("none");
  });

  it("refuses to act off turn", () => {
    expect(clickCell(position({ toMove: "G" }), "D", initialUiState, { row: 4, col: 3 }).kind).toBe(
      "none",
    );
  });
});

describe("clickCell for the stone player", () => {
  const gPos = position({
    toMove: "G",
    whites: [{ row: 2, col: 2 }],
    hands: { whites: 1, blacks: 2 },
  });

  it("places the chosen colour on an empty square", () => {
    const action = clickCell(gPos, "G", initialUiState, { row: 5, col: 5 });
    expect(action).toEqual({
      kind: "move",
      move: { type: "placeBlack", to: { row: 5, col: 5 } },
    });
  });

  it("falls back to the available colour when the hand is empty", () => {
    const noBlacks = position({ toMove: "G", hands: { whites: 2, blacks: 0 } });
    const action = clickCell(noBlacks, "G", initialUiState, { row: 5, col: 5 });
    expect(action).toEqual({
      kind: "move",
      move: { type: "placeWhite", to: { row: 5, col: 5 } },
    });
  });

  it("selects a white stone and relocates it", () => {
    const select = clickCell(gPos, "G", initialUiState, { row: 2, col: 2 });
    expect(select.kind).toBe("select");
    if (select.kind !== "select") return;
    const drop = clickCell(gPos, "G", select.ui, { row: 5, col: 1 });
    expect(drop).toEqual({
      kind: "move",
      move: { type: "relocateWhite", from: { row: 2, col: 2 }, to: { row: 5, col: 1 } },
    });
  });

  it("deselects on a second click", () => {
    const select = clickCell(gPos, "G", initialUiState, { row: 2, col: 2 });
    if (select.kind !== "select") throw new Error("expected selection");
    const again = clickCell(gPos, "G", select.ui, { row: 2, col: 2 });
    expect(again.kind).toBe("deselect");
  });
});

describe("stone colour choice", () => {
  it("honours hands", () => {
    expect(pickStoneColor(position({ hands: { whites: 0, blacks: "inf" } }), "white")).toBe("black");
    expect(pickStoneColor(position({ hands: { whites: 0, blacks: 0 } }), "black")).toBeNull();
    expect(pickStoneColor(position({ hands: { whites: 1, blacks: 1 } }), "white")).toBe("white");
  });
});

describe("badges and banners", () => {
  it("maps engine rationales to display badges", () => {
    expect(rationaleBadge("ImminentWin(S)")).toBe("Imminent Win");
    expect(rationaleBadge("CornerWin(SE)")).toBe("Corner Win");
    expect(rationaleBadge("Fantastic(N)")).toBe("Fantastic Imminent Win");
    expect(rationaleBadge("Solver(D-win,dist=7)")).toBe("Solver");
  });

  it("terminal banners", () => {
    expect(bannerFor("d-win", "D")).toMatch(/Duke escapes.*You win/);
    expect(bannerFor("g-win-immobilized", "D")).toMatch(/immobilized.*engine wins/);
    expect(bannerFor("ongoing", "D")).toBeNull();
  });

  it("fortress banner needs a drawn reply", () => {
    expect(
      fortressBanner([{ move: { type: "pass" }, label: "draw" }], "G"),
    ).toMatch(/fortress/);
    expect(fortressBanner([{ move: { type: "pass" }, label: "d-win" }], "G")).toBeNull();
  });
});

describe("form helpers", () => {
  it("normalizes dims long-edge horizontal", () => {
    expect(normalizeDims(9, 6)).toEqual({ rows: 6, cols: 9 });
    expect(normalizeDims(6, 9)).toEqual({ rows: 6, cols: 9 });
  });

  it("pass button only in the bounded variant for the stone side", () => {
    expect(passAvailable(game())).toBe(false); // human D
    const gHuman = game({
      config: { ...game().config, humanSide: "G", blacks: 0 },
    });
    expect(passAvailable(gHuman)).toBe(true);
    const standard = game({
      config: { ...game().config, humanSide: "G", blacks: "inf" },
    });
    expect(passAvailable(standard)).toBe(false);
  });

  it("step targets", () => {
    expect(stepTarget(position(), "N")).toEqual({ row: 2, col: 3 });
    expect(stepTarget(position(), "E")).toEqual({ row: 3, col: 4 });
  });
});
