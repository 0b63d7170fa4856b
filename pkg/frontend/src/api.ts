// Thin client for the game service; every game truth comes from here.

import type { EvalResponse, GameConfig, GameState, Hint, MoveJson } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
  }
}

async function unwrap<T>(resp: Response): Promise<T> {
  if (resp.ok) {
    return (await resp.json()) as T;
  }
  let code = "http_error";
  let message = `${resp.status}`;
  try {
    const body = await resp.json();
    if (body && typeof body === "object" && body.detail) {
      code = body.detail.code ?? code;
      message = body.detail.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(code, message, resp.status);
}

export class DukegoClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  async health(): Promise<{ status: string }> {
    return unwrap(await this.fetchFn(`${this.baseUrl}/health`));
  }

  async createGame(config: GameConfig): Promise<GameState> {
    return unwrap(
      await this.fetchFn(`${this.baseUrl}/games`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(config),
      }),
    );
  }

  async getGame(id: string): Promise<GameState> {
    return unwrap(await this.fetchFn(`${this.baseUrl}/games/${id}`));
  }

  async submitMove(id: string, move: MoveJson): Promise<GameState> {
    return unwrap(
      await this.fetchFn(`${this.baseUrl}/games/${id}/moves`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ move }),
      }),
    );
  }

  async undo(id: string): Promise<GameState> {
    return unwrap(
      await this.fetchFn(`${this.baseUrl}/games/${id}/undo`, { method: "POST" }),
    );
  }

  async hint(id: string): Promise<Hint> {
    return unwrap(await this.fetchFn(`${this.baseUrl}/games/${id}/hint`));
  }

  async evalMoves(id: string): Promise<EvalResponse> {
    return unwrap(await this.fetchFn(`${this.baseUrl}/games/${id}/eval`));
  }
}
