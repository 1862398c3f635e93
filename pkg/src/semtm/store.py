"""Persistent translation-memory store.

One store is one file: a header followed by sequential records, each
holding a translation unit and, optionally, the float32 vector of its
source segment. The layout is documented byte-exact in the README. The
vector payload is little-endian float32, fixed width (``dim * 4`` bytes),
keyed by the record id.

Concurrency: one writer OR many concurrent readers. The record count in
the header is updated only after a record's bytes are fully flushed, so a
reader never observes a partially written record.
"""

from __future__ import annotations

import datetime as _dt
import json
import os
import struct
from collections.abc import Iterator

import numpy as np

from .exceptions import DimensionMismatchError, DuplicateIdError, ParseError
from .units import MemoryRecord, TranslationUnit
from .validation import check_vector

MAGIC = b"STMV"
VERSION = 1

_HEADER = struct.Struct("<4sHII")          # magic, version, dim, count
_REC_FIXED = struct.Struct("<IBHHII")      # id, flags, src_lang_len, tgt_lang_len, src_len, tgt_len
_FLAG_HAS_VECTOR = 0x01


class TranslationMemoryStore:
    """Record-level access to a translation memory persisted on disk.

    Use :meth:`create` for a new store, :meth:`open` for an existing one.
    ``put`` requires strictly increasing ids and vectors of the declared
    dimension; ``scan`` yields records in id (= insertion) order.
    """

    def __init__(self, path: str | os.PathLike, fh, dim: int, count: int, metadata: dict, writable: bool):
        self._path = os.fspath(path)
        self._fh = fh
        self._dim = dim
        self._count = count
        self._metadata = metadata
        self._writable = writable
        self._offsets: dict[int, int] = {}
        self._order: list[int] = []
        self._scan_offsets()

    # -- construction -------------------------------------------------------

    @classmethod
    def create(
        cls,
        path: str | os.PathLike,
        dim: int,
        *,
        source_lang: str = "en",
        target_lang: str = "es",
    ) -> "TranslationMemoryStore":
        """Create a new store file with a fixed vector dimension."""
        if dim <= 0:
            raise ValueError(f"dim must be positive, got {dim}")
        metadata = {
            "source_lang": source_lang,
            "target_lang": target_lang,
            "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        }
        meta_bytes = json.dumps(metadata, ensure_ascii=False).encode("utf-8")
        fh = open(path, "w+b")
        fh.write(_HEADER.pack(MAGIC, VERSION, dim, 0))
        fh.write(struct.pack("<I", len(meta_bytes)))
        fh.write(meta_bytes)
        fh.flush()
        return cls(path, fh, dim, 0, metadata, writable=True)

    @classmethod
    def open(cls, path: str | os.PathLike, mode: str = "r") -> "TranslationMemoryStore":
        """Open an existing store. ``mode`` is ``"r"`` (read) or ``"a"`` (append)."""
        if mode not in ("r", "a"):
            raise ValueError(f"mode must be 'r' or 'a', got {mode!r}")
        fh = open(path, "r+b" if mode == "a" else "rb")
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            fh.close()
            raise ParseError(f"{path}: truncated header")
        magic, version, dim, count = _HEADER.unpack(head)
        if magic != MAGIC:
            fh.close()
            raise ParseError(f"{path}: not a translation-memory store (bad magic)")
        if version != VERSION:
            fh.close()
            raise ParseError(f"{path}: unsupported store version {version}")
        (meta_len,) = struct.unpack("<I", fh.read(4))
        metadata = json.loads(fh.read(meta_len).decode("utf-8"))
        return cls(path, fh, dim, count, metadata, writable=(mode == "a"))

    @classmethod
    def build(
        cls,
        path: str | os.PathLike,
        units: list[TranslationUnit],
        vectors=None,
        *,
        dim: int = 512,
    ) -> "TranslationMemoryStore":
        """Create a store from a unit list, optionally with one vector per unit."""
        if vectors is not None and len(vectors) != len(units):
            raise ValueError(f"got {len(units)} units but {len(vectors)} vectors")
        langs = {}
        if units:
            langs = {"source_lang": units[0].source_lang, "target_lang": units[0].target_lang}
        store = cls.create(path, dim, **langs)
        for i, unit in enumerate(units):
            vec = None if vectors is None else vectors[i]
            store.put(MemoryRecord(unit, vec))
        return store

    # -- record access ------------------------------------------------------

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def metadata(self) -> dict:
        return dict(self._metadata)

    @property
    def path(self) -> str:
        return self._path

    def __len__(self) -> int:
        return self._count

    def put(self, record: MemoryRecord) -> None:
        """Append a record. Ids must be new and strictly increasing."""
        if not self._writable:
            raise PermissionError("store was opened read-only")
        uid = record.unit.id
        if uid in self._offsets:
            raise DuplicateIdError(f"id {uid} already stored")
        if self._order and uid < self._order[-1]:
            raise ValueError(f"ids must be strictly increasing: {uid} after {self._order[-1]}")
        vec_bytes = b""
        flags = 0
        if record.vector is not None:
            vec = check_vector(record.vector, dim=self._dim)
            vec_bytes = np.asarray(vec, dtype="<f4").tobytes()
            flags |= _FLAG_HAS_VECTOR
        src = record.unit.source_text.encode("utf-8")
        tgt = record.unit.target_text.encode("utf-8")
        sl = record.unit.source_lang.encode("utf-8")
        tl = record.unit.target_lang.encode("utf-8")

        self._fh.seek(0, os.SEEK_END)
        offset = self._fh.tell()
        self._fh.write(_REC_FIXED.pack(uid, flags, len(sl), len(tl), len(src), len(tgt)))
        self._fh.write(sl)
        self._fh.write(tl)
        self._fh.write(src)
        self._fh.write(tgt)
        self._fh.write(vec_bytes)
        self._fh.flush()
        # Bump the visible count only after the record bytes are on disk.
        self._count += 1
        self._fh.seek(0)
        self._fh.write(_HEADER.pack(MAGIC, VERSION, self._dim, self._count))
        self._fh.flush()
        self._offsets[uid] = offset
        self._order.append(uid)

    def get(self, uid: int) -> MemoryRecord | None:
        """Return the record with id ``uid``, or None if absent."""
        offset = self._offsets.get(uid)
        if offset is None:
            return None
        return self._read_record(offset)[0]

    def scan(self) -> Iterator[MemoryRecord]:
        """Yield all records in id order."""
        for uid in self._order:
            yield self._read_record(self._offsets[uid])[0]

    def units(self) -> list[TranslationUnit]:
        return [rec.unit for rec in self.scan()]

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()

    def __enter__(self) -> "TranslationMemoryStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- internals ----------------------------------------------------------

    def _scan_offsets(self) -> None:
        self._fh.seek(_HEADER.size)
        (meta_len,) = struct.unpack("<I", self._fh.read(4))
        pos = _HEADER.size + 4 + meta_len
        for _ in range(self._count):
            pos = self._index_record_at(pos)
        # leave file positioned at logical end of known records
        self._fh.seek(pos)

    def _index_record_at(self, pos: int) -> int:
        """Register the record at ``pos`` in the offset map; return the next offset."""
        self._fh.seek(pos)
        fixed = self._fh.read(_REC_FIXED.size)
        if len(fixed) < _REC_FIXED.size:
            raise ParseError(f"{self._path}: truncated record at offset {pos}")
        uid, flags, sl_len, tl_len, src_len, tgt_len = _REC_FIXED.unpack(fixed)
        size = sl_len + tl_len + src_len + tgt_len
        if flags & _FLAG_HAS_VECTOR:
            size += self._dim * 4
        self._offsets[uid] = pos
        self._order.append(uid)
        return pos + _REC_FIXED.size + size

    def _read_record(self, offset: int) -> tuple[MemoryRecord, int]:
        self._fh.seek(offset)
        fixed = self._fh.read(_REC_FIXED.size)
        uid, flags, sl_len, tl_len, src_len, tgt_len = _REC_FIXED.unpack(fixed)
        sl = self._fh.read(sl_len).decode("utf-8")
        tl = self._fh.read(tl_len).decode("utf-8")
        src = self._fh.read(src_len).decode("utf-8")
        tgt = self._fh.read(tgt_len).decode("utf-8")
        vector = None
        if flags & _FLAG_HAS_VECTOR:
            vector = np.frombuffer(self._fh.read(self._dim * 4), dtype="<f4").copy()
        unit = TranslationUnit(uid, src, tgt, sl, tl)
        end = self._fh.tell()
        return MemoryRecord(unit, vector), end
