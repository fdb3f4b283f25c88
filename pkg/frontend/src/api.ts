// Typed client for the analysis service. Error responses are surfaced
// as ApiError with the HTTP status, so the UI can treat 409
// (irreducibility broken) as an inline edit rejection.

import { Edit, ModelResponse, WhatifResponse } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }

  get isEditRejection(): boolean {
    return this.status === 409;
  }
}

async function parseError(resp: Response): Promise<never> {
  let message = `${resp.status} ${resp.statusText}`;
  try {
    const body = await resp.json();
    if (body && typeof body.error === "string") message = body.error;
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(resp.status, message);
}

export class ServiceClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  async getModel(): Promise<ModelResponse> {
    const resp = await this.fetchFn(`${this.baseUrl}/model`);
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as ModelResponse;
  }

  async whatif(edits: readonly Edit[], full = false): Promise<WhatifResponse> {
    const body: { edits: readonly Edit[]; full?: boolean } = { edits };
    if (full) body.full = true;
    const resp = await this.fetchFn(`${this.baseUrl}/whatif`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as WhatifResponse;
  }

  async uploadLog(file: File, k: number): Promise<ModelResponse> {
    const form = new FormData();
    form.append("file", file);
    form.append("k", String(k));
    const resp = await this.fetchFn(`${this.baseUrl}/log`, { method: "POST", body: form });
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as ModelResponse;
  }
}
