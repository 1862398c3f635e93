"""Placeholder normalization for evaluation.

Dates, named entities and number sequences are replaced by bare category
tokens (``DATE``, ``PER``, ``LOC``, ``ORG``, ``NUM``) before scoring, so
that a retrieved segment differing from the reference only in such details
is not punished. Producers run in priority order (dates before entities
before numbers); a span that overlaps an earlier producer's span is
dropped, which is what keeps date digits out of the number pass.

Spans use unicode code-point offsets into the original text, so a span
can never split a character.

The default entity tagger is a gazetteer (surface form -> kind, longest
match first, case-sensitive); a statistical NER system can be plugged in
through the same producer contract.
"""

from __future__ import annotations

import enum
import re
from collections.abc import Callable, Iterable
from dataclasses import dataclass

from .exceptions import ParseError, ProducerContractError

SpanProducer = Callable[[str], list["PlaceholderSpan"]]


class PlaceholderKind(enum.Enum):
    NUM = "NUM"
    DATE = "DATE"
    PER = "PER"
    LOC = "LOC"
    ORG = "ORG"


ENTITY_KINDS = frozenset({PlaceholderKind.PER, PlaceholderKind.LOC, PlaceholderKind.ORG})
_PLACEHOLDER_TOKENS = frozenset(kind.value for kind in PlaceholderKind)


@dataclass(frozen=True, order=True)
class PlaceholderSpan:
    start: int
    end: int
    kind: PlaceholderKind

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def overlaps(self, other: "PlaceholderSpan") -> bool:
        return self.start < other.end and other.start < self.end


# Full lowercase Spanish month names. 'setiembre' and abbreviations are
# deliberately not recognized.
SPANISH_MONTHS = (
    "enero", "febrero", "marzo", "abril", "mayo", "junio",
    "julio", "agosto", "septiembre", "octubre", "noviembre", "diciembre",
)

_NUMBER_RE = re.compile(r"\d+(?:[.,]\d+)*")
_MONTHS_ALT = "|".join(SPANISH_MONTHS)
_DATE_RES = (
    # 5 de marzo de 2018
    re.compile(rf"(?<!\d)\d{{1,2}} de (?:{_MONTHS_ALT}) de \d{{4}}(?!\d)"),
    # 12/07/2019
    re.compile(r"(?<!\d)\d{1,2}/\d{1,2}/\d{4}(?!\d)"),
    # 12-07-2019
    re.compile(r"(?<!\d)\d{1,2}-\d{1,2}-\d{4}(?!\d)"),
    # 2019-07-12
    re.compile(r"(?<!\d)\d{4}-\d{1,2}-\d{1,2}(?!\d)"),
)


def detect_numbers(text: str) -> list[PlaceholderSpan]:
    """Maximal digit runs, optionally with '.'/',' group or decimal separators."""
    return [
        PlaceholderSpan(m.start(), m.end(), PlaceholderKind.NUM)
        for m in _NUMBER_RE.finditer(text)
    ]


def detect_dates(text: str) -> list[PlaceholderSpan]:
    """Dates in the documented pattern set.

    Patterns: "D de <month> de YYYY", D/M/YYYY, D-M-YYYY and YYYY-MM-DD.
    A month name alone is not a date. Overlapping candidates collapse to
    the earliest, longest match.
    """
    candidates = []
    for rx in _DATE_RES:
        for m in rx.finditer(text):
            candidates.append(PlaceholderSpan(m.start(), m.end(), PlaceholderKind.DATE))
    candidates.sort(key=lambda s: (s.start, -s.end))
    accepted: list[PlaceholderSpan] = []
    for span in candidates:
        if not accepted or span.start >= accepted[-1].end:
            accepted.append(span)
    return accepted


class GazetteerTagger:
    """Entity tagger backed by a surface-form table.

    Longest surface wins at any position; matching is case-sensitive and
    bounded by word characters, so "Madrid" does not fire inside
    "madrileño". Only PER/LOC/ORG kinds are allowed.
    """

    def __init__(self, entries: dict[str, PlaceholderKind]):
        for surface, kind in entries.items():
            if not surface or surface != surface.strip():
                raise ValueError(f"bad gazetteer surface {surface!r}")
            if kind not in ENTITY_KINDS:
                raise ValueError(f"gazetteer kind must be PER/LOC/ORG, got {kind} for {surface!r}")
            if surface in _PLACEHOLDER_TOKENS:
                raise ValueError(f"gazetteer surface {surface!r} collides with a placeholder token")
        self._entries = dict(entries)
        self.kinds = frozenset(entries.values())
        if entries:
            ordered = sorted(entries, key=len, reverse=True)
            pattern = "|".join(re.escape(s) for s in ordered)
            self._rx = re.compile(rf"(?<!\w)(?:{pattern})(?!\w)")
        else:
            self._rx = None

    @classmethod
    def from_tsv(cls, path) -> "GazetteerTagger":
        """Load surface<TAB>kind lines; kind is PER, LOC or ORG."""
        entries: dict[str, PlaceholderKind] = {}
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line.strip():
                    continue
                fields = line.split("\t")
                if len(fields) != 2:
                    raise ParseError(f"expected 2 fields, got {len(fields)}", lineno)
                surface, kind_name = fields[0].strip(), fields[1].strip()
                try:
                    kind = PlaceholderKind[kind_name]
                except KeyError:
                    raise ParseError(f"unknown entity kind {kind_name!r}", lineno) from None
                if kind not in ENTITY_KINDS:
                    raise ParseError(f"kind must be PER/LOC/ORG, got {kind_name}", lineno)
                entries[surface] = kind
        return cls(entries)

    def spans(self, text: str) -> list[PlaceholderSpan]:
        if self._rx is None:
            return []
        return [
            PlaceholderSpan(m.start(), m.end(), self._entries[m.group(0)])
            for m in self._rx.finditer(text)
        ]

    def __call__(self, text: str) -> list[PlaceholderSpan]:
        return self.spans(text)


def _check_producer_spans(spans: list[PlaceholderSpan], text: str) -> list[PlaceholderSpan]:
    spans = sorted(spans)
    for i, span in enumerate(spans):
        if span.end > len(text):
            raise ProducerContractError(f"span {span} exceeds text length {len(text)}")
        if i > 0 and spans[i - 1].overlaps(span):
            raise ProducerContractError(f"producer emitted overlapping spans {spans[i - 1]} and {span}")
    return spans


def apply_placeholders(text: str, producers: Iterable[SpanProducer]) -> str:
    """Run span producers in priority order and replace accepted spans.

    Each accepted span is replaced by its kind token. A producer's own
    spans must not overlap each other; spans overlapping an earlier
    producer's accepted span are silently dropped. The result is stable
    under a second application with the same producers.
    """
    accepted: list[PlaceholderSpan] = []
    for producer in producers:
        for span in _check_producer_spans(producer(text), text):
            if not any(span.overlaps(prior) for prior in accepted):
                accepted.append(span)
    out = text
    for span in sorted(accepted, reverse=True):
        out = out[: span.start] + span.kind.value + out[span.end :]
    return out


class Normalizer:
    """Reusable priority pipeline: dates, then entities, then numbers."""

    def __init__(
        self,
        tagger: GazetteerTagger | SpanProducer | None = None,
        *,
        dates: bool = True,
        numbers: bool = True,
    ):
        producers: list[SpanProducer] = []
        if dates:
            producers.append(detect_dates)
        if tagger is not None:
            producers.append(tagger.spans if hasattr(tagger, "spans") else tagger)
        if numbers:
            producers.append(detect_numbers)
        self.producers = producers

    def __call__(self, text: str) -> str:
        return apply_placeholders(text, self.producers)
