// DOM rendering and event wiring; all state transitions go through model.ts.

import type { CellModel } from "./model.js";
import type { GameState, HistoryEntry } from "./types.js";
import { describeMove, rationaleBadge } from "./model.js";

export function renderBoard(
  container: HTMLElement,
  grid: CellModel[][],
  onCellClick: (row: number, col: number) => void,
): void {
  container.innerHTML = "";
  container.style.gridTemplateColumns = `repeat(${grid[0]?.length ?? 0}, var(--cell))`;
  for (const row of grid) {
    for (const cell of row) {
      const el = document.createElement("button");
      el.className = "cell";
      if (cell.isEdge) el.classList.add("edge");
      if (cell.selected) el.classList.add("selected");
      if (cell.hint) el.classList.add("hint");
      if (cell.evalLabel) el.classList.add(`eval-${cell.evalLabel}`);
      const piece = cell.hintGhost && cell.content === "empty" ? cell.hintGhost : cell.content;
      if (piece !== "empty") {
        const span = document.createElement("span");
        span.className = `piece ${piece}`;
        if (cell.hintGhost && cell.content === "empty") span.classList.add("ghost");
        span.textContent = piece === "duke" ? "♖" : piece === "black" ? "●" : "○";
        el.appendChild(span);
      }
      el.dataset.row = String(cell.row);
      el.dataset.col = String(cell.col);
      el.addEventListener("click", () => onCellClick(cell.row, cell.col));
      container.appendChild(el);
    }
  }
}

export function renderLog(container: HTMLElement, history: HistoryEntry[]): void {
  container.innerHTML = "";
  history.forEach((entry, i) => {
    const li = document.createElement("li");
    li.textContent = `${i + 1}. ${entry.by}: ${describeMove(entry.move)}`;
    container.appendChild(li);
  });
  container.scrollTop = container.scrollHeight;
}

export function renderStatus(
  banner: HTMLElement,
  badge: HTMLElement,
  state: GameState,
  bannerText: string | null,
  lastRationale: string | null,
): void {
  banner.textContent =
    bannerText ?? (state.position.toMove === state.config.humanSide ? "Your move." : "Engine thinking…");
  banner.classList.toggle("terminal", bannerText !== null);
  if (lastRationale) {
    badge.textContent = rationaleBadge(lastRationale);
    badge.hidden = false;
  } else {
    badge.hidden = true;
  }
}

export function shake(el: HTMLElement, message: string, messageBox: HTMLElement): void {
  messageBox.textContent = message;
  el.classList.remove("shake");
  void el.offsetWidth; // restart the animation
  el.classList.add("shake");
}
