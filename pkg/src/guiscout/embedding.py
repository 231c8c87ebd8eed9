"""Text embeddings behind a provider interface.

The built-in deterministic provider exists so that every ranking number in
the test suite is reproducible bit-for-bit across processes and platforms:
tokens are hashed with FNV-1a 64 into a fixed-dimension count vector which
is then L2-normalized. A remote HTTP provider can swap in a real sentence
embedding model behind the same interface.

No truncation is applied to input texts.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np
import requests

from .corpus import CorpusIndex, gui_full_text
from .errors import ConfigError, ProviderFormatError, ProviderTransportError

DEFAULT_DIM = 256

_TOKEN = re.compile(r"[a-z0-9]+")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a_64(token: str) -> int:
    """FNV-1a 64-bit hash over the UTF-8 bytes of ``token``."""
    h = _FNV_OFFSET
    for byte in token.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric characters."""
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    """A unit-norm (or all-zero, for empty text) float64 vector."""

    values: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])

    @property
    def is_zero(self) -> bool:
        return not self.values.any()

    def tolist(self) -> list[float]:
        return [float(v) for v in self.values]


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Dot product of the already-normalized vectors, clamped to [-1, 1].

    Returns 0.0 when either vector is all-zero (the empty-text case).
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} != {b.dim}")
    if a.is_zero or b.is_zero:
        return 0.0
    return min(1.0, max(-1.0, float(np.dot(a.values, b.values))))


class Embedder(Protocol):
    dim: int

    def embed_text(self, text: str) -> EmbeddingVector: ...


class DeterministicHashEmbedder:
    """Hashed token-count embedder; pure function of its input text.

    Counts are accumulated as integers in token order and normalized with a
    fixed summation order, so outputs are byte-identical across runs.
    """

    def __init__(self, dim: int = DEFAULT_DIM):
        if dim < 1:
            raise ConfigError("embedding dim must be positive")
        self.dim = dim

    def embed_text(self, text: str) -> EmbeddingVector:
        counts = np.zeros(self.dim, dtype=np.float64)
        for token in tokenize(text):
            counts[fnv1a_64(token) % self.dim] += 1.0
        norm = float(np.sqrt(np.sum(counts * counts)))
        if norm == 0.0:
            return EmbeddingVector(counts)
        return EmbeddingVector(counts / norm)


class RemoteHttpEmbedder:
    """Embedding provider speaking the documented HTTP contract.

    POST ``{"texts": [...]}`` to the endpoint; expects
    ``{"vectors": [[...], ...]}`` with one vector per input text. Returned
    vectors are normalized locally so downstream cosine stays a plain dot
    product.
    """

    def __init__(self, endpoint: str, dim: int, timeout: float = 30.0, session=None):
        if not endpoint:
            raise ConfigError("remote_http embedder requires an endpoint")
        self.endpoint = endpoint
        self.dim = dim
        self.timeout = timeout
        self._session = session or requests.Session()

    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        try:
            response = self._session.post(
                self.endpoint, json={"texts": list(texts)}, timeout=self.timeout
            )
            response.raise_for_status()
            payload = response.json()
        except requests.RequestException as exc:
            raise ProviderTransportError(f"embedding endpoint failed: {exc}") from exc
        except ValueError as exc:
            raise ProviderFormatError(f"embedding endpoint returned non-JSON: {exc}") from exc
        vectors = payload.get("vectors") if isinstance(payload, dict) else None
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ProviderFormatError(
                "embedding endpoint must return one vector per text",
                raw=json.dumps(payload)[:2000],
            )
        out: list[EmbeddingVector] = []
        for vec in vectors:
            arr = np.asarray(vec, dtype=np.float64)
            if arr.ndim != 1 or arr.shape[0] != self.dim:
                raise ProviderFormatError(
                    f"expected {self.dim}-dimensional vectors", raw=str(vec)[:2000]
                )
            norm = float(np.sqrt(np.sum(arr * arr)))
            out.append(EmbeddingVector(arr / norm if norm else arr))
        return out

    def embed_text(self, text: str) -> EmbeddingVector:
        return self.embed_batch([text])[0]


class ProviderKind(str, Enum):
    DETERMINISTIC_HASH = "deterministic_hash"
    REMOTE_HTTP = "remote_http"


@dataclass(frozen=True)
class EmbeddingProviderConfig:
    provider_kind: ProviderKind = ProviderKind.DETERMINISTIC_HASH
    dim: int = DEFAULT_DIM
    endpoint: str | None = None
    cache_path: str | None = None

    def __post_init__(self):
        if self.provider_kind == ProviderKind.REMOTE_HTTP and not self.endpoint:
            raise ConfigError("remote_http provider requires an endpoint")

    def config_hash(self) -> str:
        blob = json.dumps(
            {
                "kind": self.provider_kind.value,
                "dim": self.dim,
                "endpoint": self.endpoint,
            },
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def create_embedder(config: EmbeddingProviderConfig) -> Embedder:
    if config.provider_kind == ProviderKind.DETERMINISTIC_HASH:
        return DeterministicHashEmbedder(dim=config.dim)
    return RemoteHttpEmbedder(endpoint=config.endpoint or "", dim=config.dim)


# Cache artifact kinds: the GUI's full extracted text, and one entry per
# crowd description.
KIND_FULL_TEXT = "full_text"
KIND_DESCRIPTION = "description"

CACHE_FORMAT_VERSION = 1


def corpus_content_hash(index: CorpusIndex) -> str:
    """Hash of everything the embedding cache depends on, order-independent."""
    h = hashlib.sha256()
    for doc in index.iter_sorted():
        h.update(doc.gui_id.encode("utf-8"))
        h.update(b"\x00")
        h.update(gui_full_text(doc).encode("utf-8"))
        for desc in doc.s2w_descriptions:
            h.update(b"\x01")
            h.update(desc.encode("utf-8"))
        h.update(b"\x02")
    return h.hexdigest()


class EmbeddingCache:
    """Corpus-wide vector store keyed by (gui_id, artifact kind, index)."""

    def __init__(self, config_hash: str, corpus_hash: str, dim: int):
        self.config_hash = config_hash
        self.corpus_hash = corpus_hash
        self.dim = dim
        self._entries: dict[tuple[str, str, int], EmbeddingVector] = {}
        self.computed_count = 0

    def put(self, gui_id: str, kind: str, i: int, vector: EmbeddingVector) -> None:
        self._entries[(gui_id, kind, i)] = vector

    def get(self, gui_id: str, kind: str, i: int = 0) -> EmbeddingVector | None:
        return self._entries.get((gui_id, kind, i))

    def __len__(self) -> int:
        return len(self._entries)

    def save(self, path: str | Path) -> None:
        entries = [
            {"gui_id": gid, "kind": kind, "i": i, "vector": vec.tolist()}
            for (gid, kind, i), vec in sorted(self._entries.items())
        ]
        payload = {
            "version": CACHE_FORMAT_VERSION,
            "config_hash": self.config_hash,
            "corpus_hash": self.corpus_hash,
            "dim": self.dim,
            "entries": entries,
        }
        Path(path).write_text(json.dumps(payload), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingCache":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if payload.get("version") != CACHE_FORMAT_VERSION:
            raise ConfigError(
                f"unsupported embedding cache version {payload.get('version')!r}"
            )
        cache = cls(payload["config_hash"], payload["corpus_hash"], payload["dim"])
        for entry in payload["entries"]:
            cache.put(
                entry["gui_id"],
                entry["kind"],
                entry["i"],
                EmbeddingVector(np.asarray(entry["vector"], dtype=np.float64)),
            )
        return cache


def embed_corpus(
    index: CorpusIndex,
    embedder: Embedder,
    config: EmbeddingProviderConfig | None = None,
    cache_path: str | Path | None = None,
) -> EmbeddingCache:
    """Embed every GUI full text and every crowd description.

    When ``cache_path`` holds a cache built from the same corpus content and
    provider configuration, it is reloaded as-is and nothing is recomputed.
    """
    if config is None:
        config = EmbeddingProviderConfig(dim=embedder.dim)
    config_hash = config.config_hash()
    corpus_hash = corpus_content_hash(index)
    if cache_path is not None and Path(cache_path).exists():
        cached = EmbeddingCache.load(cache_path)
        if cached.config_hash == config_hash and cached.corpus_hash == corpus_hash:
            return cached
    cache = EmbeddingCache(config_hash, corpus_hash, embedder.dim)
    for doc in index.iter_sorted():
        cache.put(doc.gui_id, KIND_FULL_TEXT, 0, embedder.embed_text(gui_full_text(doc)))
        cache.computed_count += 1
        for i, desc in enumerate(doc.s2w_descriptions):
            cache.put(doc.gui_id, KIND_DESCRIPTION, i, embedder.embed_text(desc))
            cache.computed_count += 1
    if cache_path is not None:
        cache.save(cache_path)
    return cache
