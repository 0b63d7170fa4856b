// Global setup: start the Python game service for the end-to-end tests.

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const __dirname = dirname(fileURLToPath(import.meta.url));

const PORT = 8471;
export const BASE_URL = `http://127.0.0.1:${PORT}`;

let child: ChildProcess | null = null;

async function waitForHealth(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE_URL}/health`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 300));
  }
  throw new Error("game service did not come up");
}

export default async function setup(): Promise<() => void> {
  const cacheDir = mkdtempSync(join(tmpdir(), "dukego-cache-"));
  const repoRoot = join(__dirname, "..", "..");
  // pre-solve the spaces the scenarios need so requests stay fast
  for (const [board, w] of [
    ["8x8", "3"],
    ["7x8", "3"],
  ] as const) {
    execFileSync(
      "python3",
      ["-m", "dukego.cli", "solve", board, "--white", w, "--out", join(cacheDir, `${board}-w${w}-b0.dgc`)],
      { cwd: repoRoot, stdio: "inherit", timeout: 300_000 },
    );
  }
  child = spawn(
    "python3",
    ["-m", "dukego.cli", "serve", "--port", String(PORT), "--cache-dir", cacheDir],
    { cwd: repoRoot, stdio: "inherit" },
  );
  await waitForHealth(60_000);
  return () => {
    child?.kill();
  };
}
