/**
 * Wire protocol: newline-delimited JSON over stdin/stdout.
 *
 * Requests:  {"op": "info", "id": n}
 *            {"op": "embed", "id": n, "texts": ["...", ...]}
 * Responses: {"id": n, "dim": d, "model": "..."}
 *            {"id": n, "vectors": [[...], ...]}
 *            {"id": n, "error": "..."}
 *
 * One response line per request line, strictly in request order. A line
 * that cannot be read as a request at all is answered with id -1.
 */

export interface InfoRequest {
  op: 'info';
  id: number;
}

export interface EmbedRequest {
  op: 'embed';
  id: number;
  texts: string[];
}

export type WireRequest = InfoRequest | EmbedRequest;

export interface InfoResponse {
  id: number;
  dim: number;
  model: string;
}

export interface EmbedResponse {
  id: number;
  vectors: number[][];
}

export interface ErrorResponse {
  id: number;
  error: string;
}

export type WireResponse = InfoResponse | EmbedResponse | ErrorResponse;

/** Canonical reply to a line that is not valid JSON. */
export function parseErrorResponse(): ErrorResponse {
  return { id: -1, error: 'parse' };
}

function isInteger(value: unknown): value is number {
  return typeof value === 'number' && Number.isInteger(value);
}

/**
 * Read one request line. Returns either the validated request or the error
 * response the server should emit for it; never throws.
 */
export function parseRequest(line: string): { request: WireRequest } | { fail: ErrorResponse } {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch {
    return { fail: parseErrorResponse() };
  }
  if (typeof raw !== 'object' || raw === null || Array.isArray(raw)) {
    return { fail: { id: -1, error: 'parse: request must be a JSON object' } };
  }
  const obj = raw as Record<string, unknown>;
  if (!isInteger(obj.id)) {
    return { fail: { id: -1, error: 'parse: id must be an integer' } };
  }
  const id = obj.id;
  if (obj.op === 'info') {
    return { request: { op: 'info', id } };
  }
  if (obj.op === 'embed') {
    const texts = obj.texts;
    if (!Array.isArray(texts) || !texts.every((t) => typeof t === 'string')) {
      return { fail: { id, error: 'embed needs texts: a list of strings' } };
    }
    return { request: { op: 'embed', id, texts } };
  }
  return { fail: { id, error: `unknown op: ${JSON.stringify(obj.op)}` } };
}

export function serializeResponse(res: WireResponse): string {
  return JSON.stringify(res) + '\n';
}
