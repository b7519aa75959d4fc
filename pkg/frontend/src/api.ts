// Thin client for the graph server's three endpoints.

import type { DocumentNode, GraphDocument, WorkId } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function raiseFor(response: Response): Promise<never> {
  let code = "error";
  let message = `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as { code?: string; message?: string };
    if (body.code) code = body.code;
    if (body.message) message = body.message;
  } catch {
    // non-JSON error body; keep the defaults
  }
  throw new ApiError(response.status, code, message);
}

export async function fetchGraph(base = ""): Promise<GraphDocument> {
  const response = await fetch(`${base}/api/graph`);
  if (!response.ok) await raiseFor(response);
  return (await response.json()) as GraphDocument;
}

export async function fetchWork(base: string, id: WorkId): Promise<DocumentNode> {
  const response = await fetch(`${base}/api/work/${encodeURIComponent(id)}`);
  if (!response.ok) await raiseFor(response);
  return (await response.json()) as DocumentNode;
}

export async function requestBuild(
  base: string,
  identifier: WorkId,
  overrides: Record<string, number> = {},
): Promise<GraphDocument> {
  const response = await fetch(`${base}/api/build`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ identifier, ...overrides }),
  });
  if (!response.ok) await raiseFor(response);
  return (await response.json()) as GraphDocument;
}

/**
 * Serialises pivot rebuilds: a newer pivot supersedes any still in
 * flight, and a superseded response resolves to null so the caller
 * never applies a stale document.
 */
export class PivotController {
  private ticket = 0;

  async pivot(
    base: string,
    identifier: WorkId,
    overrides: Record<string, number> = {},
  ): Promise<GraphDocument | null> {
    const mine = ++this.ticket;
    const document = await requestBuild(base, identifier, overrides);
    return mine === this.ticket ? document : null;
  }
}
