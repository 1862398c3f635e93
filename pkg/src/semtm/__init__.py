"""Semantic translation-memory retrieval.

Retrieval of translation-memory matches by sentence-embedding cosine
similarity, side by side with the classic edit-distance scan, plus the
evaluation harness that compares the two: sentence-similarity
correlation, per-fuzzy-band METEOR averages with optional placeholder
normalization, and step timings.
"""

from .benchmark import BENCH_STEPS, StepTiming, TimingReport, bench_timing, synthetic_segments
from .embedding import (
    CallableEmbedder,
    EmbedderSpec,
    EmbeddingProvider,
    HashingEmbedder,
    SubprocessEmbedder,
    cosine,
    deterministic_embed,
    embed_batch,
)
from .estimators import EmbeddingMatcher, LexicalMatcher
from .evaluation import (
    BUCKET_EDGES,
    BucketStats,
    EvalRow,
    PartitionReport,
    PartitionSpec,
    StsBucket,
    build_eval_rows,
    drop_ties,
    format_partition_table,
    format_sts_table,
    mean_sts_per_bucket,
    partition_and_average,
)
from .exceptions import (
    DegenerateVectorError,
    DimensionMismatchError,
    DuplicateIdError,
    EmptyIndexError,
    EmptyMemoryError,
    ParseError,
    ProducerContractError,
    ProviderError,
    SemtmError,
)
from .index import VectorIndex
from .lexical import (
    FuzzyThresholds,
    MatchKind,
    MatchResult,
    best_lexical_match,
    classify_match,
    fuzzy_score,
    levenshtein,
    minmax_similarity,
)
from .meteor import Alignment, MeteorParams, align_exact, meteor_score, tokenize
from .placeholders import (
    GazetteerTagger,
    Normalizer,
    PlaceholderKind,
    PlaceholderSpan,
    apply_placeholders,
    detect_dates,
    detect_numbers,
)
from .store import TranslationMemoryStore
from .sts import (
    DEFAULT_SCALE,
    StsMetrics,
    StsPair,
    average_ranks,
    evaluate_sts,
    load_sts,
    mse,
    pearson,
    spearman,
)
from .units import MemoryRecord, TranslationUnit, load_units, write_units

__version__ = "0.1.0"

__all__ = [
    "BENCH_STEPS",
    "BUCKET_EDGES",
    "DEFAULT_SCALE",
    "Alignment",
    "BucketStats",
    "CallableEmbedder",
    "DegenerateVectorError",
    "DimensionMismatchError",
    "DuplicateIdError",
    "EmbedderSpec",
    "EmbeddingMatcher",
    "EmbeddingProvider",
    "EmptyIndexError",
    "EmptyMemoryError",
    "EvalRow",
    "FuzzyThresholds",
    "GazetteerTagger",
    "HashingEmbedder",
    "LexicalMatcher",
    "MatchKind",
    "MatchResult",
    "MemoryRecord",
    "MeteorParams",
    "Normalizer",
    "ParseError",
    "PartitionReport",
    "PartitionSpec",
    "PlaceholderKind",
    "PlaceholderSpan",
    "ProducerContractError",
    "ProviderError",
    "SemtmError",
    "StepTiming",
    "StsBucket",
    "StsMetrics",
    "StsPair",
    "SubprocessEmbedder",
    "TimingReport",
    "TranslationMemoryStore",
    "TranslationUnit",
    "VectorIndex",
    "align_exact",
    "apply_placeholders",
    "average_ranks",
    "bench_timing",
    "best_lexical_match",
    "build_eval_rows",
    "classify_match",
    "cosine",
    "deterministic_embed",
    "detect_dates",
    "detect_numbers",
    "drop_ties",
    "embed_batch",
    "evaluate_sts",
    "format_partition_table",
    "format_sts_table",
    "fuzzy_score",
    "levenshtein",
    "load_sts",
    "load_units",
    "mean_sts_per_bucket",
    "meteor_score",
    "minmax_similarity",
    "mse",
    "partition_and_average",
    "pearson",
    "spearman",
    "synthetic_segments",
    "tokenize",
    "write_units",
]
