"""Wall-clock timing of the three retrieval pipeline steps.

Step 1 embeds a whole synthetic memory in provider-sized batches, step 2
embeds one incoming segment, step 3 retrieves the nearest neighbour from
an index of synthetic vectors. Medians over repetitions are reported;
medians rather than means so a cold first run cannot dominate.

Synthetic inputs are deterministic per (n, seed), so timing runs are
comparable across invocations. Index construction is not part of the
retrieve measurement: the index is built once per repetition set and
only the query is timed.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

import numpy as np

from .embedding import EmbeddingProvider, embed_batch
from .index import VectorIndex

BENCH_STEPS = ("embed_memory_total", "embed_single_query", "retrieve_single_query")

_VOCAB_SIZE = 1000
_WORDS_PER_SEGMENT = 8


@dataclass(frozen=True)
class StepTiming:
    samples: tuple[float, ...]

    def __post_init__(self):
        if not self.samples:
            raise ValueError("no samples")
        if any(s < 0 for s in self.samples):
            raise ValueError("negative sample")

    @property
    def median(self) -> float:
        return statistics.median(self.samples)


@dataclass(frozen=True)
class TimingReport:
    n: int
    repetitions: int
    steps: dict[str, StepTiming]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "repetitions": self.repetitions,
            "steps": {
                name: {"median_s": t.median, "samples_s": list(t.samples)}
                for name, t in self.steps.items()
            },
        }


def synthetic_segments(n: int, rng: np.random.Generator) -> list[str]:
    """n short pseudo-sentences over a small closed vocabulary."""
    ids = rng.integers(0, _VOCAB_SIZE, size=(n, _WORDS_PER_SEGMENT))
    return [" ".join(f"w{j}" for j in row) for row in ids]


def bench_timing(
    n: int,
    provider: EmbeddingProvider,
    repetitions: int = 3,
    *,
    steps: tuple[str, ...] = BENCH_STEPS,
    seed: int = 0,
) -> TimingReport:
    """Time the selected steps over a size-n synthetic memory.

    embed_memory_total embeds n segments through the provider's batching;
    embed_single_query embeds one previously unseen segment (fresh tokens
    per repetition, so provider caches cannot flatter the number);
    retrieve_single_query runs top-1 cosine retrieval over n random
    vectors of the provider's dimension.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    unknown = [s for s in steps if s not in BENCH_STEPS]
    if unknown:
        raise ValueError(f"unknown steps {unknown}; expected subset of {BENCH_STEPS}")
    rng = np.random.default_rng(seed)
    dim = provider.spec.dim
    timings: dict[str, StepTiming] = {}

    if "embed_memory_total" in steps:
        segments = synthetic_segments(n, rng)
        samples = []
        for _ in range(repetitions):
            t0 = time.perf_counter()
            embed_batch(provider, segments)
            samples.append(time.perf_counter() - t0)
        timings["embed_memory_total"] = StepTiming(tuple(samples))

    if "embed_single_query" in steps:
        samples = []
        for rep in range(repetitions):
            query = " ".join(f"q{rep}n{j}" for j in range(_WORDS_PER_SEGMENT))
            t0 = time.perf_counter()
            embed_batch(provider, [query])
            samples.append(time.perf_counter() - t0)
        timings["embed_single_query"] = StepTiming(tuple(samples))

    if "retrieve_single_query" in steps:
        matrix = rng.standard_normal((n, dim))
        index = VectorIndex.from_matrix(np.arange(n, dtype=np.int64), matrix)
        queries = rng.standard_normal((repetitions, dim))
        samples = []
        for rep in range(repetitions):
            query = queries[rep]
            t0 = time.perf_counter()
            index.get_nearest(query, k=1)
            samples.append(time.perf_counter() - t0)
        timings["retrieve_single_query"] = StepTiming(tuple(samples))

    return TimingReport(n=n, repetitions=repetitions, steps=timings)
