"""Sentence-level METEOR, exact-match stage.

Unigram precision/recall are combined by a recall-weighted harmonic mean
and discounted by a fragmentation penalty over matched chunks:

    P = matches / hyp_len          R = matches / ref_len
    Fmean = P * R / (alpha * P + (1 - alpha) * R)
    penalty = gamma * (chunks / matches) ** beta
    score = Fmean * (1 - penalty)

Only the exact-match stage is implemented; stem/synonym/paraphrase
matchers can be layered on through the alignment entry point but are out
of scope here. Defaults are the classic constants (0.9, 3, 0.5).
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

# Tokens are runs of word characters, or single punctuation marks; the
# punctuation set is "any non-word, non-space character".
_TOKEN_RE = re.compile(r"\w+|[^\w\s]")

# Alignment search gives up on optimality past this many explored nodes
# (chunk-minimization over maximal matchings is combinatorial); the best
# matching found so far is returned. Sentence-length inputs stay far below
# the budget.
_SEARCH_NODE_BUDGET = 200_000


@dataclass(frozen=True)
class MeteorParams:
    alpha: float = 0.9
    beta: float = 3.0
    gamma: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")


@dataclass(frozen=True)
class Alignment:
    """Counts of a one-to-one unigram matching between two token lists."""

    matches: int
    chunks: int
    hyp_len: int
    ref_len: int

    def __post_init__(self):
        if not 0 <= self.chunks <= self.matches <= min(self.hyp_len, self.ref_len):
            raise ValueError(
                f"inconsistent alignment: matches={self.matches} chunks={self.chunks} "
                f"hyp_len={self.hyp_len} ref_len={self.ref_len}"
            )
        if self.matches == 0 and self.chunks != 0:
            raise ValueError("an empty matching has no chunks")


def tokenize(text: str) -> list[str]:
    """Lowercase and split into word tokens and standalone punctuation."""
    return _TOKEN_RE.findall(text.lower())


def align_exact(hyp_tokens: list[str], ref_tokens: list[str]) -> Alignment:
    """Best one-to-one exact-token matching between the two lists.

    Maximizes the number of matched tokens (which is fixed per token type:
    the smaller of the two occurrence counts), then minimizes the number
    of chunks, i.e. maximal runs matched contiguously in both lists.
    """
    hyp_counts = Counter(hyp_tokens)
    ref_counts = Counter(ref_tokens)
    quota = {t: min(c, ref_counts[t]) for t, c in hyp_counts.items() if t in ref_counts}
    total = sum(quota.values())
    if total == 0:
        return Alignment(0, 0, len(hyp_tokens), len(ref_tokens))

    # Ref positions per matchable type, and per-position suffix counts on
    # the hyp side (to know when skipping a token would break maximality).
    ref_positions: dict[str, list[int]] = {}
    for j, t in enumerate(ref_tokens):
        if t in quota:
            ref_positions.setdefault(t, []).append(j)
    suffix: list[Counter] = [Counter() for _ in range(len(hyp_tokens) + 1)]
    for i in range(len(hyp_tokens) - 1, -1, -1):
        suffix[i] = suffix[i + 1].copy()
        suffix[i][hyp_tokens[i]] += 1

    used = [False] * len(ref_tokens)
    best_chunks = total + 1
    nodes = 0

    def search(i: int, remaining: dict, chunks: int, last_i: int, last_j: int) -> None:
        nonlocal best_chunks, nodes
        if chunks >= best_chunks:
            return
        nodes += 1
        if nodes > _SEARCH_NODE_BUDGET:
            return
        if i == len(hyp_tokens):
            best_chunks = chunks
            return
        t = hyp_tokens[i]
        need = remaining.get(t, 0)
        if need > 0:
            # Continuation of the current run first, then fresh starts.
            cont_j = last_j + 1 if last_i == i - 1 else -1
            candidates = ref_positions[t]
            ordered = []
            if cont_j >= 0 and cont_j < len(ref_tokens) and not used[cont_j] and ref_tokens[cont_j] == t:
                ordered.append(cont_j)
            can_skip = suffix[i + 1][t] >= need
            if can_skip:
                ordered.append(-1)  # sentinel: leave hyp[i] unmatched
            for j in candidates:
                if not used[j] and j != cont_j:
                    ordered.append(j)
            for j in ordered:
                if j == -1:
                    search(i + 1, remaining, chunks, last_i, last_j)
                    continue
                used[j] = True
                remaining[t] = need - 1
                extends = last_i == i - 1 and last_j == j - 1
                search(i + 1, remaining, chunks + (0 if extends else 1), i, j)
                remaining[t] = need
                used[j] = False
        else:
            search(i + 1, remaining, chunks, last_i, last_j)

    search(0, dict(quota), 0, -2, -2)
    return Alignment(total, best_chunks, len(hyp_tokens), len(ref_tokens))


def meteor_score(hyp: str, ref: str, params: MeteorParams = MeteorParams()) -> float:
    """METEOR score of a hypothesis segment against one reference.

    Worked examples (default parameters):

      - "the cat sat" against itself: P = R = Fmean = 1, one chunk of
        three matches, penalty 0.5 * (1/3)**3, score 1 - 0.5/27 ≈ 0.981481.
      - "the cat" against "cat the": both unigrams match but in two
        chunks, penalty 0.5 * (2/2)**3 = 0.5, score 0.5.
      - disjoint token sets: no matches, score 0.0.

    No token overlap scores 0; two empty segments score 1 and exactly one
    empty segment scores 0 (degenerate rows must compare somehow).
    """
    hyp_tokens = tokenize(hyp)
    ref_tokens = tokenize(ref)
    if not hyp_tokens and not ref_tokens:
        return 1.0
    if not hyp_tokens or not ref_tokens:
        return 0.0
    alignment = align_exact(hyp_tokens, ref_tokens)
    m = alignment.matches
    if m == 0:
        return 0.0
    precision = m / alignment.hyp_len
    recall = m / alignment.ref_len
    fmean = (precision * recall) / (params.alpha * precision + (1.0 - params.alpha) * recall)
    penalty = params.gamma * (alignment.chunks / m) ** params.beta
    return fmean * (1.0 - penalty)
