"""Semantic textual similarity harness.

Loads labeled sentence-pair datasets and compares two scorers against the
human gold standard: cosine over provider embeddings, and the normalized
edit-distance baseline (per-pair distances negated and min-max scaled over
the whole evaluated set). Agreement is reported as Pearson, Spearman and
MSE, with predictions mapped linearly onto the gold scale for the MSE.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embedding import EmbeddingProvider, cosine, embed_batch
from .exceptions import ParseError
from .lexical import levenshtein, minmax_similarity

DEFAULT_SCALE = (1.0, 5.0)

STS_METHODS = ("embed_cosine", "edit_minmax")


@dataclass(frozen=True)
class StsPair:
    s1: str
    s2: str
    gold: float
    scale: tuple[float, float] = DEFAULT_SCALE

    def __post_init__(self):
        lo, hi = self.scale
        if not lo < hi:
            raise ValueError(f"scale must satisfy lo < hi, got {self.scale}")
        if not lo <= self.gold <= hi:
            raise ValueError(f"gold {self.gold} outside scale [{lo}, {hi}]")


@dataclass(frozen=True)
class StsMetrics:
    pearson: float
    spearman: float
    mse: float

    def __post_init__(self):
        if not -1.0 - 1e-12 <= self.pearson <= 1.0 + 1e-12:
            raise ValueError(f"pearson {self.pearson} outside [-1, 1]")
        if not -1.0 - 1e-12 <= self.spearman <= 1.0 + 1e-12:
            raise ValueError(f"spearman {self.spearman} outside [-1, 1]")
        if self.mse < 0.0:
            raise ValueError(f"mse {self.mse} is negative")


def _parse_score(raw: str, lineno: int) -> float:
    try:
        score = float(raw)
    except ValueError:
        raise ParseError(f"unparseable score {raw!r}", lineno) from None
    if not np.isfinite(score):
        raise ParseError(f"non-finite score {raw!r}", lineno)
    return score


def _sick_columns(header: Sequence[str]) -> tuple[int, int, int]:
    # Column order varies between SICK releases; trust the header names
    # when present, else fall back to id/sA/sB/relatedness positions.
    names = [h.strip() for h in header]
    try:
        return (
            names.index("sentence_A"),
            names.index("sentence_B"),
            names.index("relatedness_score"),
        )
    except ValueError:
        return 1, 2, 3


def load_sts(path, format: str = "sick", *, scale: tuple[float, float] = DEFAULT_SCALE) -> list[StsPair]:
    """Read sentence pairs from a TSV file.

    format "sick": first line is a header, sentences and relatedness score
    located by column name (positional fallback). format "tsv3": headerless
    s1<TAB>s2<TAB>score lines. Blank lines are skipped. scale is the
    (lo, hi) range the gold scores must lie in.
    """
    if format not in ("sick", "tsv3"):
        raise ValueError(f"unknown format {format!r}")
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        cols = (0, 1, 2)
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if format == "sick" and lineno == 1:
                cols = _sick_columns(fields)
                continue
            needed = max(cols) + 1
            if len(fields) < needed:
                raise ParseError(f"expected at least {needed} fields, got {len(fields)}", lineno)
            s1 = fields[cols[0]].strip()
            s2 = fields[cols[1]].strip()
            if not s1 or not s2:
                raise ParseError("empty sentence", lineno)
            gold = _parse_score(fields[cols[2]].strip(), lineno)
            try:
                pairs.append(StsPair(s1, s2, gold, scale))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
    return pairs


def _as_samples(x: Sequence[float], y: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.ndim != 1 or ya.ndim != 1:
        raise ValueError("samples must be 1-dimensional")
    if xa.shape != ya.shape:
        raise ValueError(f"length mismatch: {xa.shape[0]} vs {ya.shape[0]}")
    if xa.shape[0] < 2:
        raise ValueError("need at least 2 points")
    if not (np.isfinite(xa).all() and np.isfinite(ya).all()):
        raise ValueError("samples must be finite")
    return xa, ya


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation. Raises ValueError on zero variance."""
    xa, ya = _as_samples(x, y)
    xm = xa - xa.mean()
    ym = ya - ya.mean()
    denom = np.sqrt((xm * xm).sum() * (ym * ym).sum())
    if denom == 0.0:
        raise ValueError("zero variance sample")
    return float((xm * ym).sum() / denom)


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks; tied values all get the mean of their rank run."""
    va = np.asarray(values, dtype=np.float64)
    order = np.argsort(va, kind="mergesort")
    ranks = np.empty(va.shape[0], dtype=np.float64)
    i = 0
    while i < va.shape[0]:
        j = i
        while j + 1 < va.shape[0] and va[order[j + 1]] == va[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of averaged ranks."""
    xa, ya = _as_samples(x, y)
    return pearson(average_ranks(xa), average_ranks(ya))


def _rescale(values: np.ndarray, src: tuple[float, float], dst: tuple[float, float]) -> np.ndarray:
    (slo, shi), (dlo, dhi) = src, dst
    if not (slo < shi and dlo < dhi):
        raise ValueError("scales must satisfy lo < hi")
    return dlo + (values - slo) * ((dhi - dlo) / (shi - slo))


def mse(
    pred: Sequence[float],
    gold: Sequence[float],
    *,
    pred_scale: tuple[float, float] | None = None,
    gold_scale: tuple[float, float] | None = None,
) -> float:
    """Mean squared error, after mapping pred linearly from pred_scale
    onto gold_scale when both are given (neither given: raw comparison)."""
    if (pred_scale is None) != (gold_scale is None):
        raise ValueError("pred_scale and gold_scale must be given together")
    pa = np.asarray(pred, dtype=np.float64)
    ga = np.asarray(gold, dtype=np.float64)
    if pa.shape != ga.shape or pa.ndim != 1:
        raise ValueError(f"length mismatch: {pa.shape} vs {ga.shape}")
    if pa.shape[0] < 1:
        raise ValueError("need at least 1 point")
    if pred_scale is not None:
        pa = _rescale(pa, pred_scale, gold_scale)
    diff = pa - ga
    return float((diff * diff).mean())


def _predict_embed_cosine(pairs: Sequence[StsPair], provider: EmbeddingProvider) -> list[float]:
    left = embed_batch(provider, [p.s1 for p in pairs])
    right = embed_batch(provider, [p.s2 for p in pairs])
    return [cosine(a, b) for a, b in zip(left, right)]


def _predict_edit_minmax(pairs: Sequence[StsPair]) -> list[float]:
    distances = [levenshtein(p.s1, p.s2) for p in pairs]
    return list(minmax_similarity(distances))


def evaluate_sts(
    pairs: Sequence[StsPair],
    method: str,
    provider: EmbeddingProvider | None = None,
) -> StsMetrics:
    """Score every pair with the chosen method and compare against gold.

    "embed_cosine" embeds both sentences through provider and takes the
    cosine; "edit_minmax" negates per-pair edit distances and min-max
    scales them over the evaluated set. Predictions live on [0, 1] (cosine
    may dip below 0 for near-opposite vectors) and are mapped onto the
    gold scale for the MSE. All pairs must share one gold scale.
    """
    if not pairs:
        raise ValueError("no pairs to evaluate")
    scales = {p.scale for p in pairs}
    if len(scales) != 1:
        raise ValueError(f"pairs mix gold scales: {sorted(scales)}")
    if method == "embed_cosine":
        if provider is None:
            raise ValueError("embed_cosine needs an embedding provider")
        pred = _predict_embed_cosine(pairs, provider)
    elif method == "edit_minmax":
        pred = _predict_edit_minmax(pairs)
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {STS_METHODS}")
    gold = [p.gold for p in pairs]
    return StsMetrics(
        pearson=pearson(pred, gold),
        spearman=spearman(pred, gold),
        mse=mse(pred, gold, pred_scale=(0.0, 1.0), gold_scale=pairs[0].scale),
    )
