"""Exact cosine nearest-neighbor index over segment vectors.

Brute force on purpose: a 230k x 512 scan sits comfortably inside the
latency budget of an interactive CAT tool, exactness makes oracle testing
trivial, and an approximate index can slot in behind the same contract
later. Vectors may arrive in any float precision; the index holds and
accumulates in float64, which keeps cosine stable near ties.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from .exceptions import (
    DegenerateVectorError,
    DimensionMismatchError,
    DuplicateIdError,
    EmptyIndexError,
)
from .units import MemoryRecord
from .validation import check_matrix, check_vector


class VectorIndex:
    """Ordered (id, vector) entries with exact top-k cosine retrieval.

    Build it (``add`` / ``from_store`` / ``from_matrix``), then query it.
    Queries are read-only and safe to run concurrently.
    """

    def __init__(self, dim: int):
        if dim <= 0:
            raise ValueError(f"dim must be positive, got {dim}")
        self._dim = dim
        self._ids: list[int] = []
        self._id_set: set[int] = set()
        self._pending: list[np.ndarray] = []
        self._matrix: np.ndarray | None = None
        self._norms: np.ndarray | None = None
        self._id_array: np.ndarray | None = None

    @classmethod
    def from_store(cls, store) -> "VectorIndex":
        """Index every record of a store; all records must carry vectors."""
        index = cls(store.dim)
        index.add(store.scan())
        return index

    @classmethod
    def from_matrix(cls, ids, matrix) -> "VectorIndex":
        """Bulk-build from an (n, dim) matrix without per-record overhead."""
        m = check_matrix(matrix)
        index = cls(m.shape[1])
        ids = [int(i) for i in ids]
        if len(ids) != m.shape[0]:
            raise ValueError(f"got {len(ids)} ids for {m.shape[0]} rows")
        if len(set(ids)) != len(ids):
            raise DuplicateIdError("ids must be unique")
        norms = np.linalg.norm(m, axis=1)
        if np.any(norms == 0.0):
            bad = int(np.flatnonzero(norms == 0.0)[0])
            raise DegenerateVectorError(f"row for id {ids[bad]} has a zero-norm vector")
        index._ids = ids
        index._id_set = set(ids)
        index._matrix = m
        index._norms = norms
        index._id_array = np.asarray(ids, dtype=np.int64)
        return index

    @property
    def dim(self) -> int:
        return self._dim

    def __len__(self) -> int:
        return len(self._ids)

    @property
    def ids(self) -> list[int]:
        return list(self._ids)

    def add(self, records: Iterable[MemoryRecord]) -> int:
        """Append records; returns how many were added.

        Every record must have a vector of the index dimension; duplicate
        ids are rejected. Zero-norm vectors are rejected here rather than
        at query time so empty-segment bugs surface during the build.
        """
        added = 0
        for record in records:
            if record.vector is None:
                raise ValueError(f"record {record.unit.id} has no vector")
            vec = check_vector(record.vector, dim=self._dim)
            if not np.any(vec):
                raise DegenerateVectorError(f"record {record.unit.id} has a zero-norm vector")
            uid = record.unit.id
            if uid in self._id_set:
                raise DuplicateIdError(f"id {uid} already indexed")
            self._id_set.add(uid)
            self._ids.append(uid)
            self._pending.append(vec)
            added += 1
        return added

    def _finalize(self) -> None:
        if self._pending:
            block = np.stack(self._pending)
            self._matrix = block if self._matrix is None else np.vstack([self._matrix, block])
            self._pending.clear()
            self._norms = np.linalg.norm(self._matrix, axis=1)
            self._id_array = np.asarray(self._ids, dtype=np.int64)

    def get_nearest(self, query, k: int = 1) -> list[tuple[int, float]]:
        """Exact top-k entries by cosine similarity, descending.

        Ties break to the lower id. Returns min(k, len(index)) pairs.
        """
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if not self._ids:
            raise EmptyIndexError("cannot query an empty index")
        q = check_vector(query)
        if q.size != self._dim:
            raise DimensionMismatchError(f"query dimension {q.size} != index dimension {self._dim}")
        qnorm = float(np.linalg.norm(q))
        if qnorm == 0.0:
            raise DegenerateVectorError("cannot query with a zero-norm vector")
        self._finalize()
        sims = (self._matrix @ q) / (self._norms * qnorm)
        # Primary key: similarity descending; tie-break: id ascending.
        order = np.lexsort((self._id_array, -sims))
        top = order[: min(k, len(order))]
        return [(int(self._id_array[i]), float(sims[i])) for i in top]
