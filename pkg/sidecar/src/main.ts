#!/usr/bin/env node
/** Entry point: pick a backend, serve stdio until stdin closes. */

import { LazyEncoder, mockEncoder, useEncoder } from './models';
import { serve } from './server';

const USAGE = `usage: semtm-sidecar [--model mock|use] [--dim N]

  --model mock   deterministic token-hash embedder (default), no downloads
  --model use    pretrained sentence encoder via TensorFlow.js (dim 512;
                 downloads the checkpoint on first load)
  --dim N        vector dimension for the mock backend (default 512)
`;

interface Args {
  model: 'mock' | 'use';
  dim: number;
}

export function parseArgs(argv: string[]): Args {
  const args: Args = { model: 'mock', dim: 512 };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    if (flag === '--help' || flag === '-h') {
      process.stdout.write(USAGE);
      process.exit(0);
    } else if (flag === '--model') {
      const value = argv[++i];
      if (value !== 'mock' && value !== 'use') {
        throw new Error(`--model must be mock or use, got ${value ?? '(nothing)'}`);
      }
      args.model = value;
    } else if (flag === '--dim') {
      const value = Number(argv[++i]);
      if (!Number.isInteger(value) || value <= 0) {
        throw new Error(`--dim must be a positive integer, got ${argv[i] ?? '(nothing)'}`);
      }
      args.dim = value;
    } else {
      throw new Error(`unknown flag ${flag}`);
    }
  }
  return args;
}

function main(): void {
  let args: Args;
  try {
    args = parseArgs(process.argv.slice(2));
  } catch (err) {
    process.stderr.write(`${err instanceof Error ? err.message : String(err)}\n${USAGE}`);
    process.exit(1);
  }
  const encoder = new LazyEncoder(
    args.model === 'use' ? useEncoder : () => Promise.resolve(mockEncoder(args.dim)),
  );
  serve(encoder, process.stdin, process.stdout).then(() => process.exit(0));
}

if (require.main === module) {
  main();
}
