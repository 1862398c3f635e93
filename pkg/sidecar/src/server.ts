/**
 * Request loop: read newline-delimited JSON requests, answer each with one
 * response line, strictly in request order. Handler failures become error
 * responses; only the streams closing ends the loop.
 */

import { createInterface } from 'readline';
import type { Readable, Writable } from 'stream';
import { LazyEncoder } from './models';
import { parseRequest, serializeResponse, WireRequest, WireResponse } from './protocol';

async function answer(encoder: LazyEncoder, request: WireRequest): Promise<WireResponse> {
  try {
    const backend = await encoder.get();
    if (request.op === 'info') {
      return { id: request.id, dim: backend.dim, model: backend.model };
    }
    const vectors = await backend.embed(request.texts);
    return { id: request.id, vectors };
  } catch (err) {
    return { id: request.id, error: err instanceof Error ? err.message : String(err) };
  }
}

export function serve(encoder: LazyEncoder, input: Readable, output: Writable): Promise<void> {
  const lines = createInterface({ input, terminal: false });
  // Serialize through a promise chain: responses go out in arrival order
  // even though embedding is async.
  let pending: Promise<unknown> = Promise.resolve();
  lines.on('line', (line) => {
    if (line.trim() === '') {
      return; // blank keepalive lines are not requests
    }
    const parsed = parseRequest(line);
    pending = pending.then(async () => {
      const response = 'fail' in parsed ? parsed.fail : await answer(encoder, parsed.request);
      output.write(serializeResponse(response));
    });
  });
  return new Promise((resolve) => {
    lines.on('close', () => {
      void pending.then(() => resolve());
    });
  });
}
