"""Edit-distance fuzzy matching, the lexical baseline.

The fuzzy score between two segments is ``1 - d / max(len(a), len(b))``
with ``d`` the character-level Levenshtein distance (unit-cost insert,
delete, substitute over unicode code points). This is the most common
normalization for CAT-tool style fuzzy scores; commercial tools do not
publish theirs, so parity with any specific tool is not claimed. Distances
are computed on raw text, no case folding.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import EmptyMemoryError
from .units import TranslationUnit
from .validation import check_fraction


@dataclass(frozen=True)
class FuzzyThresholds:
    """Band edges for exact/fuzzy/no-match classification.

    ``fuzzy_low`` is the conventional lower bound of the fuzzy band
    (70% by default); exact requires a perfect score.
    """

    fuzzy_low: float = 0.70
    exact: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.fuzzy_low < 1.0:
            raise ValueError(f"fuzzy_low must lie in (0, 1), got {self.fuzzy_low}")
        if self.exact != 1.0:
            raise ValueError("exact threshold is pinned at 1.0")


class MatchKind(enum.Enum):
    EXACT = "exact"
    FUZZY = "fuzzy"
    NO_MATCH = "no_match"


@dataclass(frozen=True)
class MatchResult:
    """A retrieved unit, its similarity score, and the method that found it."""

    unit: TranslationUnit
    score: float
    method: str  # "lexical" or "embedding"

    def __post_init__(self):
        check_fraction(self.score, "match score")
        if self.method not in ("lexical", "embedding"):
            raise ValueError(f"unknown match method {self.method!r}")


def levenshtein(a: str, b: str) -> int:
    """Character-level Levenshtein distance between ``a`` and ``b``."""
    if a == b:
        return 0
    # Keep the shorter string on the inner loop.
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    cur = [0] * (len(b) + 1)
    for i, ca in enumerate(a, start=1):
        cur[0] = i
        for j, cb in enumerate(b, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb))
        prev, cur = cur, prev
    return prev[len(b)]


def _levenshtein_within(a: str, b: str, bound: int) -> int | None:
    """Distance if it is <= ``bound``, else None. Used to prune scans."""
    if abs(len(a) - len(b)) > bound:
        return None
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a) if len(a) <= bound else None
    prev = list(range(len(b) + 1))
    cur = [0] * (len(b) + 1)
    for i, ca in enumerate(a, start=1):
        cur[0] = i
        row_min = i
        for j, cb in enumerate(b, start=1):
            v = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb))
            cur[j] = v
            if v < row_min:
                row_min = v
        if row_min > bound:
            return None
        prev, cur = cur, prev
    d = prev[len(b)]
    return d if d <= bound else None


def fuzzy_score(a: str, b: str) -> float:
    """Normalized lexical similarity in [0, 1]; 1.0 iff the strings are equal."""
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein(a, b) / max(len(a), len(b))


def minmax_similarity(distances: list[int]) -> list[float]:
    """Map distances to similarities: negate, then min-max scale onto [0, 1].

    The smallest distance maps to 1.0 and the largest to 0.0. An all-equal
    input maps every element to 1.0 (the degenerate scale is pinned high so
    identical-distance sets compare as maximally similar).
    """
    if len(distances) == 0:
        raise ValueError("minmax_similarity requires a non-empty list")
    neg = -np.asarray(distances, dtype=np.float64)
    lo, hi = neg.min(), neg.max()
    if lo == hi:
        return [1.0] * len(distances)
    return ((neg - lo) / (hi - lo)).tolist()


def best_lexical_match(query: str, store) -> MatchResult:
    """Exhaustively scan ``store`` for the source segment with the highest
    fuzzy score against ``query``; ties break to the lowest id.

    The scan prunes candidates whose length difference alone caps their
    score below the best found so far; pruning cannot change the result
    because candidates are visited in increasing id order and only
    strictly-better scores replace the incumbent.
    """
    best_unit = None
    best_score = -1.0
    qlen = len(query)
    for record in store.scan():
        src = record.unit.source_text
        m = max(qlen, len(src))
        if m == 0:
            score = 1.0
        else:
            if best_score > 0.0:
                # Max distance still allowed for a strictly better score,
                # plus one unit of slack against float rounding.
                allowed = int(m * (1.0 - best_score)) + 1
                if abs(qlen - len(src)) > allowed:
                    continue
                d = _levenshtein_within(query, src, allowed)
                if d is None:
                    continue
            else:
                d = levenshtein(query, src)
            score = 1.0 - d / m if m else 1.0
        if score > best_score:
            best_score = score
            best_unit = record.unit
    if best_unit is None:
        raise EmptyMemoryError("cannot match against an empty translation memory")
    return MatchResult(unit=best_unit, score=best_score, method="lexical")


def classify_match(score: float, thresholds: FuzzyThresholds = FuzzyThresholds()) -> MatchKind:
    """Classify a similarity score as exact, fuzzy, or no match.

    The fuzzy band's lower bound is inclusive; exact requires 1.0.
    """
    check_fraction(score, "score")
    if score == 1.0:
        return MatchKind.EXACT
    if score >= thresholds.fuzzy_low:
        return MatchKind.FUZZY
    return MatchKind.NO_MATCH
