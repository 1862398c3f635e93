"""End-to-end retrieval comparison harness.

For each incoming segment the harness retrieves one match per method
(edit-distance scan and embedding nearest-neighbour), scores both against
the actual translation with METEOR, throws away rows where the two
methods agree (those cannot separate them), buckets the rest by lexical
fuzzy score and reports per-bucket averages. An optional placeholder
normalization pass rewrites the target-side texts before METEOR, which
rewards matches that differ only in dates, numbers or named entities.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Sequence

from .embedding import EmbeddingProvider, cosine, embed_batch
from .exceptions import EmptyMemoryError
from .index import VectorIndex
from .lexical import MatchResult, best_lexical_match
from .meteor import MeteorParams, meteor_score
from .store import TranslationMemoryStore

BUCKET_EDGES = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)

PAIRINGS = ("query_vs_source", "reference_vs_target")


@dataclass(frozen=True)
class PartitionSpec:
    """Fuzzy-score buckets: half-open [lo, hi), the top bucket closed."""

    edges: tuple[float, ...] = BUCKET_EDGES

    def __post_init__(self):
        if len(self.edges) < 2:
            raise ValueError("need at least 2 edges")
        if any(b <= a for a, b in zip(self.edges, self.edges[1:])):
            raise ValueError(f"edges must be strictly increasing, got {self.edges}")
        if self.edges[0] != 0.0 or self.edges[-1] != 1.0:
            raise ValueError(f"edges must span [0, 1], got {self.edges}")

    @property
    def n_buckets(self) -> int:
        return len(self.edges) - 1

    def bucket_of(self, score: float) -> int:
        if not 0.0 <= score <= 1.0:
            raise ValueError(f"score {score} outside [0, 1]")
        return min(bisect_right(self.edges, score) - 1, self.n_buckets - 1)

    def labels(self) -> list[str]:
        return [f"{lo:g}-{hi:g}" for lo, hi in zip(self.edges, self.edges[1:])]


@dataclass(frozen=True)
class EvalRow:
    query: str
    reference: str
    lex_match: MatchResult
    emb_match: MatchResult
    lex_fuzzy: float
    meteor_lex: float
    meteor_emb: float

    def __post_init__(self):
        for name in ("lex_fuzzy", "meteor_lex", "meteor_emb"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} {value} outside [0, 1]")


@dataclass(frozen=True)
class BucketStats:
    label: str
    count: int
    avg_meteor_lex: float | None
    avg_meteor_emb: float | None


@dataclass(frozen=True)
class PartitionReport:
    buckets: tuple[BucketStats, ...]
    normalized: bool
    total: int

    def __post_init__(self):
        if sum(b.count for b in self.buckets) != self.total:
            raise ValueError("bucket counts do not sum to total")

    def to_dict(self) -> dict:
        return {
            "normalized": self.normalized,
            "total": self.total,
            "buckets": [
                {
                    "range": b.label,
                    "count": b.count,
                    "avg_meteor_lexical": b.avg_meteor_lex,
                    "avg_meteor_embedding": b.avg_meteor_emb,
                }
                for b in self.buckets
            ],
        }


def build_eval_rows(
    inputs: Sequence[tuple[str, str]],
    store: TranslationMemoryStore,
    index: VectorIndex,
    provider: EmbeddingProvider,
    params: MeteorParams = MeteorParams(),
) -> list[EvalRow]:
    """Retrieve both ways for every (query, reference) pair and score.

    The hypothesis METEOR scores against is the retrieved unit's target
    text; the reference is the query's actual translation. A negative
    top-1 cosine (possible in synthetic corpora) is floored at 0 for the
    reported match score.
    """
    if len(store) == 0:
        raise EmptyMemoryError("translation memory is empty")
    if not inputs:
        return []
    queries = [q for q, _ in inputs]
    query_vectors = embed_batch(provider, queries)
    rows = []
    for (query, reference), qvec in zip(inputs, query_vectors):
        lex = best_lexical_match(query, store)
        emb_id, sim = index.get_nearest(qvec, k=1)[0]
        emb_record = store.get(emb_id)
        assert emb_record is not None, f"index returned id {emb_id} missing from store"
        # raw cosine may escape [0, 1] by sign or by float epsilon
        emb = MatchResult(emb_record.unit, min(max(sim, 0.0), 1.0), "embedding")
        rows.append(
            EvalRow(
                query=query,
                reference=reference,
                lex_match=lex,
                emb_match=emb,
                lex_fuzzy=lex.score,
                meteor_lex=meteor_score(lex.unit.target_text, reference, params),
                meteor_emb=meteor_score(emb.unit.target_text, reference, params),
            )
        )
    return rows


def _is_tie(row: EvalRow) -> bool:
    return (
        row.lex_match.unit.id == row.emb_match.unit.id
        or row.lex_match.unit.target_text == row.emb_match.unit.target_text
    )


def drop_ties(rows: Sequence[EvalRow]) -> list[EvalRow]:
    """Remove rows where both methods retrieved the same unit or units
    with identical target text; those rows cannot separate the methods."""
    return [row for row in rows if not _is_tie(row)]


def partition_and_average(
    rows: Sequence[EvalRow],
    spec: PartitionSpec = PartitionSpec(),
    normalizer: Callable[[str], str] | None = None,
    params: MeteorParams = MeteorParams(),
) -> PartitionReport:
    """Bucket rows by lexical fuzzy score and average METEOR per bucket.

    With a normalizer, the reference and both retrieved target texts are
    normalized first, rows whose retrieved targets collapse to the same
    normalized text are dropped, and METEOR is recomputed on the
    normalized texts. Bucketing always uses the original fuzzy score.
    """
    scored: list[tuple[int, float, float]] = []
    for row in rows:
        bucket = spec.bucket_of(row.lex_fuzzy)
        if normalizer is None:
            scored.append((bucket, row.meteor_lex, row.meteor_emb))
            continue
        lex_target = normalizer(row.lex_match.unit.target_text)
        emb_target = normalizer(row.emb_match.unit.target_text)
        if row.lex_match.unit.id == row.emb_match.unit.id or lex_target == emb_target:
            continue
        reference = normalizer(row.reference)
        scored.append(
            (
                bucket,
                meteor_score(lex_target, reference, params),
                meteor_score(emb_target, reference, params),
            )
        )
    counts = [0] * spec.n_buckets
    lex_sums = [0.0] * spec.n_buckets
    emb_sums = [0.0] * spec.n_buckets
    for bucket, m_lex, m_emb in scored:
        counts[bucket] += 1
        lex_sums[bucket] += m_lex
        emb_sums[bucket] += m_emb
    buckets = tuple(
        BucketStats(
            label=label,
            count=counts[i],
            avg_meteor_lex=lex_sums[i] / counts[i] if counts[i] else None,
            avg_meteor_emb=emb_sums[i] / counts[i] if counts[i] else None,
        )
        for i, label in enumerate(spec.labels())
    )
    return PartitionReport(buckets=buckets, normalized=normalizer is not None, total=len(scored))


@dataclass(frozen=True)
class StsBucket:
    label: str
    count: int
    mean_sts: float | None


def mean_sts_per_bucket(
    rows: Sequence[EvalRow],
    provider: EmbeddingProvider,
    spec: PartitionSpec = PartitionSpec(),
    pairing: str = "query_vs_source",
) -> list[StsBucket]:
    """Per bucket, the mean cosine between the paired texts.

    pairing "query_vs_source" compares the incoming segment with the
    source text the embedding method retrieved (how close was the match
    we offered); "reference_vs_target" compares the actual translation
    with the retrieved target text.
    """
    if pairing == "query_vs_source":
        pairs = [(row.query, row.emb_match.unit.source_text) for row in rows]
    elif pairing == "reference_vs_target":
        pairs = [(row.reference, row.emb_match.unit.target_text) for row in rows]
    else:
        raise ValueError(f"unknown pairing {pairing!r}; expected one of {PAIRINGS}")
    counts = [0] * spec.n_buckets
    sums = [0.0] * spec.n_buckets
    if pairs:
        left = embed_batch(provider, [a for a, _ in pairs])
        right = embed_batch(provider, [b for _, b in pairs])
        for row, a, b in zip(rows, left, right):
            bucket = spec.bucket_of(row.lex_fuzzy)
            counts[bucket] += 1
            sums[bucket] += cosine(a, b)
    return [
        StsBucket(label, counts[i], sums[i] / counts[i] if counts[i] else None)
        for i, label in enumerate(spec.labels())
    ]


def format_partition_table(report: PartitionReport) -> str:
    """Aligned text table: bucket range, per-method averages, row count."""
    headers = ("range", "lexical", "embedding", "count")
    rows = [
        (
            b.label,
            "-" if b.avg_meteor_lex is None else f"{b.avg_meteor_lex:.4f}",
            "-" if b.avg_meteor_emb is None else f"{b.avg_meteor_emb:.4f}",
            str(b.count),
        )
        for b in report.buckets
    ]
    return _align(headers, rows)


def format_sts_table(buckets: Sequence[StsBucket]) -> str:
    headers = ("range", "mean_sts", "count")
    rows = [
        (b.label, "-" if b.mean_sts is None else f"{b.mean_sts:.4f}", str(b.count))
        for b in buckets
    ]
    return _align(headers, rows)


def _align(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [
        max(len(headers[c]), *(len(r[c]) for r in rows)) if rows else len(headers[c])
        for c in range(len(headers))
    ]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip(),
    ]
    for r in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    return "\n".join(lines)
