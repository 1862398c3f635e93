"""Scikit-learn style wrappers around the two retrieval methods.

Both estimators are fitted on a translation memory (TranslationUnit
sequences or plain (source, target) string pairs) and then answer
queries: ``predict`` maps incoming segments to suggested target texts,
``query`` exposes the full scored match. Parameters follow sklearn
conventions (stored verbatim in __init__, fitted state on trailing
underscore attributes), so clone/get_params/set_params and pipeline
composition behave as usual.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .embedding import EmbeddingProvider, HashingEmbedder, embed_batch
from .exceptions import DuplicateIdError
from .index import VectorIndex
from .lexical import (
    FuzzyThresholds,
    MatchKind,
    MatchResult,
    best_lexical_match,
    classify_match,
)
from .units import MemoryRecord, TranslationUnit
from .validation import check_text_list


def _as_units(X: Iterable) -> list[TranslationUnit]:
    units: list[TranslationUnit] = []
    seen: set[int] = set()
    for i, item in enumerate(X):
        if isinstance(item, TranslationUnit):
            unit = item
        else:
            try:
                source, target = item
            except (TypeError, ValueError):
                raise ValueError(
                    f"item {i}: expected TranslationUnit or (source, target) pair, got {item!r}"
                ) from None
            unit = TranslationUnit(id=i, source_text=str(source), target_text=str(target))
        if unit.id in seen:
            raise DuplicateIdError(f"duplicate unit id {unit.id}")
        seen.add(unit.id)
        units.append(unit)
    if not units:
        raise ValueError("cannot fit on an empty translation memory")
    return units


class _UnitScan:
    """Minimal in-memory stand-in for the store's scan interface."""

    def __init__(self, records: list[MemoryRecord]):
        self._records = records

    def __len__(self) -> int:
        return len(self._records)

    def scan(self):
        return iter(self._records)


class LexicalMatcher(BaseEstimator):
    """Edit-distance retrieval: highest fuzzy score wins, lowest id on ties."""

    def __init__(self, thresholds: FuzzyThresholds | None = None):
        self.thresholds = thresholds

    def fit(self, X, y=None):
        """Index a memory given as TranslationUnits or (source, target) pairs."""
        units = _as_units(X)
        self.units_ = units
        self.memory_ = _UnitScan([MemoryRecord(unit) for unit in units])
        self.n_units_ = len(units)
        return self

    def query(self, text: str) -> MatchResult:
        check_is_fitted(self, "memory_")
        return best_lexical_match(text, self.memory_)

    def classify(self, text: str) -> MatchKind:
        thresholds = self.thresholds if self.thresholds is not None else FuzzyThresholds()
        return classify_match(self.query(text).score, thresholds)

    def predict(self, X: Sequence[str]) -> list[str]:
        """Suggested target text for each incoming segment."""
        check_is_fitted(self, "memory_")
        return [self.query(text).unit.target_text for text in check_text_list(X)]


class EmbeddingMatcher(BaseEstimator):
    """Embedding retrieval: exact top-k cosine over provider vectors."""

    def __init__(self, provider: EmbeddingProvider | None = None, k: int = 1):
        self.provider = provider
        self.k = k

    def fit(self, X, y=None):
        """Embed all source segments and build the vector index."""
        if self.k < 1:
            raise ValueError("k must be >= 1")
        units = _as_units(X)
        provider = self.provider if self.provider is not None else HashingEmbedder()
        vectors = embed_batch(provider, [u.source_text for u in units])
        ids = np.asarray([u.id for u in units], dtype=np.int64)
        self.provider_ = provider
        self.units_ = units
        self.by_id_ = {u.id: u for u in units}
        self.index_ = VectorIndex.from_matrix(ids, vectors)
        self.n_units_ = len(units)
        return self

    def query(self, text: str, k: int | None = None) -> list[MatchResult]:
        """Top-k matches, best first. Negative cosines floor at score 0."""
        check_is_fitted(self, "index_")
        vector = embed_batch(self.provider_, [text])[0]
        neighbours = self.index_.get_nearest(vector, k=self.k if k is None else k)
        return [
            MatchResult(self.by_id_[uid], min(max(sim, 0.0), 1.0), "embedding")
            for uid, sim in neighbours
        ]

    def predict(self, X: Sequence[str]) -> list[str]:
        """Suggested target text (top-1) for each incoming segment."""
        check_is_fitted(self, "index_")
        return [self.query(text, k=1)[0].unit.target_text for text in check_text_list(X)]
