/**
 * Deterministic token-hash embedder used by the mock backend.
 *
 * Construction: lowercase, split on whitespace; each token's vector is the
 * first `dim` outputs of a splitmix64 stream seeded with the FNV-1a 64 hash
 * of the token's UTF-8 bytes, mapped to [-1, 1); token vectors are averaged
 * and L2-normalized. Word order is invisible by construction, and the same
 * text always produces the same vector. Empty text maps to the zero vector.
 */

const MASK64 = (1n << 64n) - 1n;
const FNV_OFFSET = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;
const SM_GOLDEN = 0x9e3779b97f4a7c15n;
const SM_MIX1 = 0xbf58476d1ce4e5b9n;
const SM_MIX2 = 0x94d049bb133111ebn;

export function fnv1a64(data: Uint8Array): bigint {
  let h = FNV_OFFSET;
  for (const byte of data) {
    h ^= BigInt(byte);
    h = (h * FNV_PRIME) & MASK64;
  }
  return h;
}

/** First n splitmix64 outputs for a seed, each mapped to [-1, 1). */
export function splitmixUniform(seed: bigint, n: number): Float64Array {
  const out = new Float64Array(n);
  for (let k = 1; k <= n; k++) {
    let z = (seed + BigInt(k) * SM_GOLDEN) & MASK64;
    z ^= z >> 30n;
    z = (z * SM_MIX1) & MASK64;
    z ^= z >> 27n;
    z = (z * SM_MIX2) & MASK64;
    z ^= z >> 31n;
    // top 53 bits as a double in [0, 1), then onto [-1, 1)
    out[k - 1] = 2 * (Number(z >> 11n) * 2 ** -53) - 1;
  }
  return out;
}

const utf8 = new TextEncoder();

export class HashEmbedder {
  readonly dim: number;
  private cache = new Map<string, Float64Array>();

  constructor(dim: number) {
    if (!Number.isInteger(dim) || dim <= 0) {
      throw new Error(`dim must be a positive integer, got ${dim}`);
    }
    this.dim = dim;
  }

  private tokenVector(token: string): Float64Array {
    let vec = this.cache.get(token);
    if (!vec) {
      vec = splitmixUniform(fnv1a64(utf8.encode(token)), this.dim);
      this.cache.set(token, vec);
    }
    return vec;
  }

  embedOne(text: string): number[] {
    const tokens = text.toLowerCase().split(/\s+/).filter((t) => t.length > 0);
    const acc = new Float64Array(this.dim);
    if (tokens.length === 0) {
      return Array.from(acc);
    }
    for (const token of tokens) {
      const vec = this.tokenVector(token);
      for (let i = 0; i < this.dim; i++) {
        acc[i] += vec[i];
      }
    }
    let sq = 0;
    for (let i = 0; i < this.dim; i++) {
      acc[i] /= tokens.length;
      sq += acc[i] * acc[i];
    }
    const norm = Math.sqrt(sq);
    if (norm === 0) {
      return Array.from(acc);
    }
    return Array.from(acc, (v) => v / norm);
  }

  embed(texts: string[]): number[][] {
    return texts.map((t) => this.embedOne(t));
  }
}
