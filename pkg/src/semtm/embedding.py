"""Sentence-embedding providers and cosine similarity.

Three providers are included:

* :class:`HashingEmbedder` — a deterministic bag-of-words embedder used for
  testing and offline runs. Each token's vector is drawn from a splitmix64
  stream seeded with the FNV-1a 64 hash of the token's UTF-8 bytes, so the
  output is bit-identical across runs and platforms.
* :class:`SubprocessEmbedder` — client for an external encoder process
  speaking newline-delimited JSON over stdin/stdout (the sidecar protocol).
* :class:`CallableEmbedder` — adapts any ``texts -> matrix`` function.

All similarity arithmetic accumulates in float64 regardless of how vectors
are stored, which keeps cosine stable near ties.
"""

from __future__ import annotations

import json
import shlex
import subprocess
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from .exceptions import DegenerateVectorError, DimensionMismatchError, ProviderError
from .validation import check_matrix, check_text_list, check_vector

DEFAULT_DIM = 512
DEFAULT_BATCH_SIZE = 256


@dataclass(frozen=True)
class EmbedderSpec:
    """Identity and batching contract of an embedding provider."""

    name: str
    dim: int = DEFAULT_DIM
    batch_size: int = DEFAULT_BATCH_SIZE

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if self.batch_size <= 0:
            raise ValueError(f"batch_size must be positive, got {self.batch_size}")


@runtime_checkable
class EmbeddingProvider(Protocol):
    """Anything that maps a batch of texts to one vector per text."""

    spec: EmbedderSpec

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        """Return an array of shape (len(texts), spec.dim)."""
        ...


def cosine(a, b) -> float:
    """Cosine similarity ``a.b / (|a||b|)`` in [-1, 1].

    Raises on dimension mismatch and on zero-norm input: a direction-free
    vector usually means an empty segment slipped through, and silently
    mapping it to similarity 0 would hide that bug.
    """
    va = check_vector(a)
    vb = check_vector(b)
    if va.size != vb.size:
        raise DimensionMismatchError(f"cosine: dimensions differ ({va.size} vs {vb.size})")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise DegenerateVectorError("cosine is undefined for zero-norm vectors")
    return float(np.dot(va, vb) / (na * nb))


def embed_batch(provider: EmbeddingProvider, texts: Sequence[str]) -> np.ndarray:
    """Embed ``texts`` through ``provider`` in chunks of its batch size.

    Returns an array of shape (len(texts), dim) with rows in input order.
    Provider failures are wrapped in :class:`ProviderError` carrying the
    index of the first text of the failed chunk.
    """
    texts = check_text_list(texts)
    if not texts:
        raise ValueError("embed_batch requires a non-empty list of texts")
    dim = provider.spec.dim
    size = provider.spec.batch_size
    chunks = []
    for start in range(0, len(texts), size):
        chunk = texts[start : start + size]
        try:
            vectors = np.asarray(provider.embed(chunk), dtype=np.float64)
        except ProviderError as exc:
            if exc.first_index is None:
                raise ProviderError(str(exc), first_index=start) from exc
            raise
        except Exception as exc:
            raise ProviderError(f"provider failed on batch at index {start}: {exc}", first_index=start) from exc
        if vectors.ndim != 2 or vectors.shape[0] != len(chunk):
            raise DimensionMismatchError(
                f"provider returned {vectors.shape} for a batch of {len(chunk)} texts"
            )
        chunks.append(check_matrix(vectors, dim=dim))
    return np.concatenate(chunks, axis=0)


# -- deterministic test embedder -------------------------------------------

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = 0xFFFFFFFFFFFFFFFF

_SM64_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_SM64_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_SM64_MIX2 = np.uint64(0x94D049BB133111EB)


def fnv1a_64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _U64
    return h


def _splitmix64_uniform(seed: int, n: int) -> np.ndarray:
    """First ``n`` splitmix64 outputs for ``seed``, mapped to [-1, 1).

    The k-th splitmix64 output is a pure function of seed + k*GOLDEN, so
    the whole stream vectorizes; uint64 arithmetic wraps mod 2**64.
    """
    z = np.uint64(seed) + np.arange(1, n + 1, dtype=np.uint64) * _SM64_GOLDEN
    z ^= z >> np.uint64(30)
    z *= _SM64_MIX1
    z ^= z >> np.uint64(27)
    z *= _SM64_MIX2
    z ^= z >> np.uint64(31)
    u = (z >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return 2.0 * u - 1.0


class HashingEmbedder:
    """Deterministic bag-of-words embedder (test double for a real encoder).

    Text is lowercased and split on whitespace; each token gets a pseudo-
    random vector seeded by the FNV-1a 64 hash of its UTF-8 bytes; token
    vectors are averaged and L2-normalized. Word order is invisible by
    construction. Empty or whitespace-only text maps to the zero vector,
    which downstream cosine deliberately rejects.
    """

    def __init__(self, dim: int = DEFAULT_DIM, batch_size: int = DEFAULT_BATCH_SIZE):
        self.spec = EmbedderSpec(name=f"hashing-{dim}d", dim=dim, batch_size=batch_size)
        self._token_cache: dict[str, np.ndarray] = {}

    def _token_vector(self, token: str) -> np.ndarray:
        vec = self._token_cache.get(token)
        if vec is None:
            vec = _splitmix64_uniform(fnv1a_64(token.encode("utf-8")), self.spec.dim)
            self._token_cache[token] = vec
        return vec

    def embed_one(self, text: str) -> np.ndarray:
        tokens = text.lower().split()
        if not tokens:
            return np.zeros(self.spec.dim)
        acc = np.zeros(self.spec.dim)
        for token in tokens:
            acc += self._token_vector(token)
        acc /= len(tokens)
        norm = np.linalg.norm(acc)
        if norm == 0.0:
            return np.zeros(self.spec.dim)
        return acc / norm

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        return np.stack([self.embed_one(t) for t in texts]) if texts else np.empty((0, self.spec.dim))

    # sklearn-style duck typing so the embedder drops into pipelines
    def fit(self, X, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        return self.embed(check_text_list(X))

    def get_params(self, deep: bool = True) -> dict:
        return {"dim": self.spec.dim, "batch_size": self.spec.batch_size}


def deterministic_embed(text: str, dim: int = DEFAULT_DIM) -> np.ndarray:
    """One-shot form of :class:`HashingEmbedder` for a single text."""
    return HashingEmbedder(dim=dim).embed_one(text)


class CallableEmbedder:
    """Wrap a plain ``texts -> matrix`` function as a provider."""

    def __init__(self, fn, name: str = "callable", dim: int = DEFAULT_DIM, batch_size: int = DEFAULT_BATCH_SIZE):
        self.spec = EmbedderSpec(name=name, dim=dim, batch_size=batch_size)
        self._fn = fn

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        return np.asarray(self._fn(list(texts)), dtype=np.float64)


# -- sidecar client ----------------------------------------------------------


class SubprocessEmbedder:
    """Client for an encoder sidecar speaking line-delimited JSON on stdio.

    Requests are ``{"op": "info"|"embed", "id": n, "texts": [...]}``;
    responses echo the id and carry either ``dim``/``vectors`` or
    ``error``. Requests are serialized: one in flight at a time, responses
    strictly in order.
    """

    def __init__(self, cmd: str | Sequence[str], batch_size: int = DEFAULT_BATCH_SIZE):
        argv = shlex.split(cmd) if isinstance(cmd, str) else list(cmd)
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise ProviderError(f"could not launch sidecar {argv!r}: {exc}") from exc
        self._next_id = 0
        try:
            info = self._request({"op": "info"})
            dim = info.get("dim")
            if not isinstance(dim, int) or dim <= 0:
                raise ProviderError(f"sidecar info returned invalid dim: {dim!r}")
        except Exception:
            self.close()
            raise
        model = info.get("model", "unknown")
        self.spec = EmbedderSpec(name=f"sidecar:{model}", dim=dim, batch_size=batch_size)

    def _request(self, payload: dict) -> dict:
        req_id = self._next_id
        self._next_id += 1
        payload = dict(payload, id=req_id)
        proc = self._proc
        if proc.poll() is not None:
            raise ProviderError(f"sidecar exited with code {proc.returncode}")
        try:
            proc.stdin.write(json.dumps(payload, ensure_ascii=False) + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise ProviderError(f"sidecar pipe failed: {exc}") from exc
        if not line:
            raise ProviderError("sidecar closed its output stream")
        try:
            response = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProviderError(f"sidecar sent invalid JSON: {line!r}") from exc
        if response.get("error"):
            raise ProviderError(f"sidecar error: {response['error']}")
        if response.get("id") != req_id:
            raise ProviderError(f"sidecar response id {response.get('id')} != request id {req_id}")
        return response

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        texts = check_text_list(texts)
        response = self._request({"op": "embed", "texts": texts})
        vectors = response.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ProviderError(
                f"sidecar returned {0 if not isinstance(vectors, list) else len(vectors)} "
                f"vectors for {len(texts)} texts"
            )
        out = np.asarray(vectors, dtype=np.float64)
        if out.ndim != 2 or out.shape[1] != self.spec.dim:
            raise DimensionMismatchError(
                f"sidecar returned shape {out.shape}, expected (*, {self.spec.dim})"
            )
        return out

    def close(self) -> None:
        proc = self._proc
        if proc.poll() is None:
            try:
                proc.stdin.close()
            except OSError:
                pass
            try:
                proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()

    def __enter__(self) -> "SubprocessEmbedder":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
