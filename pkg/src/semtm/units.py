"""Translation units and flat-file ingestion.

A translation memory is, at its simplest, an ordered list of translation
units: one source segment paired with its translation. Two interchange
formats are supported:

* TSV: UTF-8, LF line endings, two columns ``source<TAB>target``. Tabs,
  newlines and backslashes inside segments are escaped as ``\\t``, ``\\n``
  and ``\\\\``. Ids are assigned 0..n-1 in file order.
* JSONL: one object per line with keys ``id``, ``source``, ``target``,
  ``source_lang``, ``target_lang``.

Leading/trailing whitespace is stripped on load (on the raw, still-escaped
field, so an escaped tab at a segment boundary survives a round trip).
Internal whitespace is preserved. Empty targets are allowed; empty sources
are not.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .exceptions import ParseError

DEFAULT_SOURCE_LANG = "en"
DEFAULT_TARGET_LANG = "es"


@dataclass(frozen=True)
class TranslationUnit:
    """One source/target segment pair, the TM's atom."""

    id: int
    source_text: str
    target_text: str
    source_lang: str = DEFAULT_SOURCE_LANG
    target_lang: str = DEFAULT_TARGET_LANG

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"unit id must be non-negative, got {self.id}")
        if not self.source_text.strip():
            raise ValueError(f"unit {self.id}: source_text is empty after trimming")


@dataclass(frozen=True)
class MemoryRecord:
    """A stored unit plus, optionally, the vector of its source segment."""

    unit: TranslationUnit
    vector: object | None = field(default=None, compare=False)

    @property
    def has_vector(self) -> bool:
        return self.vector is not None


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def _unescape(text: str, line: int) -> str:
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c == "\\":
            if i + 1 >= len(text):
                raise ParseError("dangling backslash escape", line)
            nxt = text[i + 1]
            if nxt == "t":
                out.append("\t")
            elif nxt == "n":
                out.append("\n")
            elif nxt == "\\":
                out.append("\\")
            else:
                raise ParseError(f"unknown escape sequence \\{nxt}", line)
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _parse_tsv_line(raw: str, lineno: int, uid: int, source_lang: str, target_lang: str) -> TranslationUnit:
    fields = raw.split("\t")
    if len(fields) != 2:
        raise ParseError(f"expected 2 fields, got {len(fields)}", lineno)
    # Strip before unescaping so escaped whitespace at segment boundaries
    # is preserved while raw padding in hand-written files is dropped.
    source = _unescape(fields[0].strip(), lineno)
    target = _unescape(fields[1].strip(), lineno)
    try:
        return TranslationUnit(uid, source, target, source_lang, target_lang)
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from exc


def _parse_jsonl_line(raw: str, lineno: int) -> TranslationUnit:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", lineno) from exc
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", lineno)
    try:
        unit = TranslationUnit(
            id=int(obj["id"]),
            source_text=str(obj["source"]).strip(),
            target_text=str(obj["target"]).strip(),
            source_lang=str(obj.get("source_lang", DEFAULT_SOURCE_LANG)),
            target_lang=str(obj.get("target_lang", DEFAULT_TARGET_LANG)),
        )
    except KeyError as exc:
        raise ParseError(f"missing key {exc.args[0]!r}", lineno) from exc
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from exc
    return unit


def load_units(
    path: str | os.PathLike,
    format: str = "tsv",
    *,
    source_lang: str = DEFAULT_SOURCE_LANG,
    target_lang: str = DEFAULT_TARGET_LANG,
) -> list[TranslationUnit]:
    """Load translation units from a TSV or JSONL file.

    TSV ids are assigned 0..n-1 in file order; JSONL ids come from the file
    and must be unique. Empty lines are skipped.
    """
    if format not in ("tsv", "jsonl"):
        raise ValueError(f"unknown format {format!r}, expected 'tsv' or 'jsonl'")
    units: list[TranslationUnit] = []
    seen_ids: set[int] = set()
    # newline="" keeps embedded \r intact instead of folding it into \n.
    with open(path, "r", encoding="utf-8", newline="") as fh:
        content = fh.read()
    for lineno, raw in enumerate(content.split("\n"), start=1):
        if raw == "":
            continue
        if format == "tsv":
            unit = _parse_tsv_line(raw, lineno, len(units), source_lang, target_lang)
        else:
            unit = _parse_jsonl_line(raw, lineno)
        if unit.id in seen_ids:
            raise ParseError(f"duplicate unit id {unit.id}", lineno)
        seen_ids.add(unit.id)
        units.append(unit)
    return units


def write_units(units: list[TranslationUnit], path: str | os.PathLike, format: str = "tsv") -> int:
    """Write units to ``path``; returns the number of units written.

    ``load_units(write_units(x))`` preserves texts and order (and, for
    JSONL, ids and language tags).
    """
    if format not in ("tsv", "jsonl"):
        raise ValueError(f"unknown format {format!r}, expected 'tsv' or 'jsonl'")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for unit in units:
            if format == "tsv":
                fh.write(f"{_escape(unit.source_text)}\t{_escape(unit.target_text)}\n")
            else:
                fh.write(
                    json.dumps(
                        {
                            "id": unit.id,
                            "source": unit.source_text,
                            "target": unit.target_text,
                            "source_lang": unit.source_lang,
                            "target_lang": unit.target_lang,
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )
    return len(units)
