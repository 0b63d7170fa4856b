// App bootstrap: the new-game form, board interactions, hint/eval overlays.

import { ApiError, DukegoClient } from "./api.js";
import {
  bannerFor,
  boardModel,
  clickCell,
  fortressBanner,
  initialUiState,
  normalizeDims,
  passAvailable,
  rationaleBadge,
  type UiState,
} from "./model.js";
import { renderBoard, renderLog, renderStatus, shake } from "./dom.js";
import type { EvalEntry, GameState, MoveJson } from "./types.js";

const params = new URLSearchParams(location.search);
const baseUrl = params.get("api") ?? "http://127.0.0.1:8000";
const client = new DukegoClient(baseUrl);

let state: GameState | null = null;
let ui: UiState = { ...initialUiState };
let hintMove: MoveJson | null = null;
let lastRationale: string | null = null;
let evalEntries: EvalEntry[] | null = null;
let busy = false;

const $ = <T extends HTMLElement>(id: string): T => document.getElementById(id) as T;

function redraw(): void {
  if (!state) return;
  const grid = boardModel(state.position, ui, { hint: hintMove, evalEntries });
  renderBoard($("board"), grid, onCellClick);
  renderLog($("log"), state.history);
  const banner =
    bannerFor(state.status, state.config.humanSide) ??
    (evalEntries ? fortressBanner(evalEntries, state.position.toMove) : null);
  renderStatus($("banner"), $("badge"), state, banner, lastRationale);
  $("pass").hidden = !passAvailable(state);
  $<HTMLElement>("hands").textContent =
    `hands: white ${state.position.hands.whites}, black ${state.position.hands.blacks}`;
  const url = new URL(location.href);
  url.searchParams.set("game", state.id);
  history.replaceState(null, "", url);
}

function applyState(next: GameState): void {
  state = next;
  ui = { ...ui, selection: null };
  hintMove = null;
  evalEntries = null;
  if (next.engineMove) {
    lastRationale = next.engineMove.rationale;
  }
  redraw();
}

async function guarded(action: () => Promise<void>): Promise<void> {
  if (busy) return;
  busy = true;
  try {
    await action();
  } catch (err) {
    if (err instanceof ApiError) {
      shake($("board"), err.message, $("message"));
    } else {
      $("message").textContent = String(err);
    }
  } finally {
    busy = false;
  }
}

function onCellClick(row: number, col: number): void {
  if (!state || state.status !== "ongoing") return;
  const action = clickCell(state.position, state.config.humanSide, ui, { row, col });
  if (action.kind === "select" || action.kind === "deselect") {
    ui = action.ui;
    redraw();
    return;
  }
  if (action.kind === "move") {
    void guarded(async () => {
      const next = await client.submitMove(state!.id, action.move);
      $("message").textContent = "";
      applyState(next);
    });
  }
}

function readForm(): Parameters<DukegoClient["createGame"]>[0] {
  const preset = $<HTMLSelectElement>("preset").value;
  const raw = {
    rows: Number($<HTMLInputElement>("rows").value),
    cols: Number($<HTMLInputElement>("cols").value),
  };
  const dims = normalizeDims(raw.rows, raw.cols);
  const budgets: Record<string, { whites: number; blacks: number | "inf" }> = {
    standard: { whites: 0, blacks: "inf" },
    "three-whites": { whites: 3, blacks: 0 },
    "2w2b": { whites: 2, blacks: 2 },
    "2w1b": { whites: 2, blacks: 1 },
  };
  return {
    ...dims,
    ...budgets[preset],
    firstMover: $<HTMLSelectElement>("first").value as "D" | "G",
    humanSide: $<HTMLSelectElement>("side").value as "D" | "G",
  };
}

function wire(): void {
  $("new-game").addEventListener("click", () => {
    void guarded(async () => {
      $("message").textContent = "";
      lastRationale = null;
      const created = await client.createGame(readForm());
      applyState(created);
    });
  });
  $("hint").addEventListener("click", () => {
    void guarded(async () => {
      if (!state) return;
      const hint = await client.hint(state.id);
      hintMove = hint.move;
      lastRationale = hint.rationale;
      $("message").textContent = `hint: ${rationaleBadge(hint.rationale)}`;
      redraw();
    });
  });
  $("eval").addEventListener("click", () => {
    void guarded(async () => {
      if (!state) return;
      try {
        evalEntries = (await client.evalMoves(state.id)).moves;
        $("message").textContent = "";
      } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
          $("message").textContent = "evaluation needs a solved configuration";
          evalEntries = null;
        } else {
          throw err;
        }
      }
      redraw();
    });
  });
  $("pass").addEventListener("click", () => {
    void guarded(async () => {
      if (!state) return;
      applyState(await client.submitMove(state.id, { type: "pass" }));
    });
  });
  $("undo").addEventListener("click", () => {
    void guarded(async () => {
      if (!state) return;
      applyState(await client.undo(state.id));
    });
  });
  $<HTMLSelectElement>("stone-color").addEventListener("change", (ev) => {
    ui = { ...ui, stoneColor: (ev.target as HTMLSelectElement).value as "black" | "white" };
  });

  const existing = params.get("game");
  if (existing) {
    void guarded(async () => {
      applyState(await client.getGame(existing));
    });
  }
}

wire();
