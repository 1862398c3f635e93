/** Encoder backends behind one async interface. */

import { HashEmbedder } from './hashing';

export interface Encoder {
  model: string;
  dim: number;
  embed(texts: string[]): Promise<number[][]>;
}

export function mockEncoder(dim: number): Encoder {
  const embedder = new HashEmbedder(dim);
  return {
    model: `mock-${dim}d`,
    dim,
    embed: async (texts) => embedder.embed(texts),
  };
}

/**
 * Real pretrained encoder through TensorFlow.js. Both packages are loaded
 * dynamically so the sidecar itself has no model dependencies; the first
 * load also downloads the checkpoint, so this backend needs network access
 * once. When loading fails the error surfaces per request and the process
 * stays alive (see LazyEncoder).
 */
export async function useEncoder(): Promise<Encoder> {
  // bare dynamic imports: resolved only when --model use is requested
  await import('@tensorflow/tfjs' as string);
  const use = await import('@tensorflow-models/universal-sentence-encoder' as string);
  const model = await use.load();
  return {
    model: 'universal-sentence-encoder',
    dim: 512,
    embed: async (texts: string[]) => {
      const tensor = await model.embed(texts);
      const rows = (await tensor.array()) as number[][];
      tensor.dispose();
      return rows;
    },
  };
}

/**
 * Defers backend construction to the first request and remembers a failed
 * load, so a missing checkpoint turns into error responses instead of a
 * dead process.
 */
export class LazyEncoder {
  private loader: () => Promise<Encoder>;
  private encoder: Encoder | null = null;
  private loadError: string | null = null;

  constructor(loader: () => Promise<Encoder>) {
    this.loader = loader;
  }

  async get(): Promise<Encoder> {
    if (this.encoder) {
      return this.encoder;
    }
    if (this.loadError !== null) {
      throw new Error(this.loadError);
    }
    try {
      this.encoder = await this.loader();
      return this.encoder;
    } catch (err) {
      this.loadError = `model load failed: ${err instanceof Error ? err.message : String(err)}`;
      throw new Error(this.loadError);
    }
  }
}
