"""Sentence embedding providers.

Three interchangeable backends sit behind `embed(provider, text)`:

- HashEmbedder: deterministic, dependency-free stand-in for a neural
  encoder; every token maps to a unit vector seeded by a hash of its bytes,
  sentences are mean-pooled.
- StoreEmbedder: exact-string lookup into a precomputed embedding store
  (JSON Lines interchange file, usually produced by the exporter).
- RemoteEmbedder: HTTP client for a POST /embed service.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimMismatchError,
    FormatError,
    MissingEmbeddingError,
    ServiceError,
)

INTERCHANGE_FORMAT = "editvec-emb/v1"

_MASK64 = (1 << 64) - 1


def _fnv1a_64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & _MASK64
    return h


def _splitmix64_stream(seed: int, count: int) -> list[float]:
    """`count` doubles in [0, 1) from the splitmix64 stream at `seed`."""
    out = []
    state = seed
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        z = z ^ (z >> 31)
        out.append((z >> 11) * 2.0 ** -53)
    return out


def token_vector(token: str, dim: int = 32) -> np.ndarray:
    """Unit-norm pseudo-random vector, reproducible across platforms."""
    seed = _fnv1a_64(token.encode("utf-8"))
    vals = np.array(_splitmix64_stream(seed, dim), dtype=np.float64)
    vec = vals * 2.0 - 1.0
    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec = vec / norm
    return vec


class HashEmbedder:
    """Mean of per-token hash vectors; empty sentence -> zero vector."""

    name = "hash-test"

    def __init__(self, dim: int = 32):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self._token_cache: dict[str, np.ndarray] = {}

    def embed(self, text: str) -> np.ndarray:
        tokens = text.split()
        if not tokens:
            return np.zeros(self.dim)
        acc = np.zeros(self.dim)
        for tok in tokens:
            vec = self._token_cache.get(tok)
            if vec is None:
                vec = token_vector(tok, self.dim)
                self._token_cache[tok] = vec
            acc += vec
        return acc / len(tokens)


@dataclass
class EmbeddingStore:
    dim: int
    encoder_name: str
    vectors: dict[str, np.ndarray] = field(default_factory=dict)


class StoreEmbedder:
    """Serves vectors from a preloaded store; misses are hard errors."""

    def __init__(self, store: EmbeddingStore):
        self.store = store
        self.dim = store.dim
        self.name = store.encoder_name

    def embed(self, text: str) -> np.ndarray:
        vec = self.store.vectors.get(text)
        if vec is None:
            raise MissingEmbeddingError(text)
        return vec


class RemoteEmbedder:
    """Client for the POST /embed contract; batches and caches requests."""

    def __init__(self, base_url: str, batch_size: int = 64, timeout: float = 60.0):
        self.base_url = base_url.rstrip("/")
        self.batch_size = batch_size
        self.timeout = timeout
        self.dim: int | None = None
        self.name = f"remote:{self.base_url}"
        self._cache: dict[str, np.ndarray] = {}

    def _request(self, texts: list[str]) -> list[np.ndarray]:
        import requests

        try:
            resp = requests.post(
                self.base_url + "/embed",
                json={"texts": texts},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise ServiceError(f"embedding service unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ServiceError(f"embedding service returned {resp.status_code}")
        try:
            payload = resp.json()
            dim = int(payload["dim"])
            vectors = payload["vectors"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ServiceError(f"malformed /embed payload: {exc}") from exc
        if len(vectors) != len(texts):
            raise ServiceError(
                f"expected {len(texts)} vectors, got {len(vectors)}")
        out = []
        for text, vals in zip(texts, vectors):
            arr = np.asarray(vals, dtype=np.float64)
            if arr.shape != (dim,):
                raise ServiceError(f"vector for {text!r} has wrong dimension")
            if not np.all(np.isfinite(arr)):
                raise ServiceError(f"non-finite vector for {text!r}")
            out.append(arr)
        if self.dim is None:
            self.dim = dim
        elif dim != self.dim:
            raise ServiceError(f"service dim changed from {self.dim} to {dim}")
        return out

    def embed(self, text: str) -> np.ndarray:
        cached = self._cache.get(text)
        if cached is None:
            cached = self._request([text])[0]
            self._cache[text] = cached
        return cached

    def embed_many(self, texts: list[str]) -> list[np.ndarray]:
        missing = [t for t in dict.fromkeys(texts) if t not in self._cache]
        for i in range(0, len(missing), self.batch_size):
            batch = missing[i:i + self.batch_size]
            for text, vec in zip(batch, self._request(batch)):
                self._cache[text] = vec
        return [self._cache[t] for t in texts]


def embed(provider, text: str) -> np.ndarray:
    """Uniform entry point over any backend."""
    return provider.embed(text)


def load_store(path: str) -> EmbeddingStore:
    """Load a JSON Lines interchange file (header line + one record/line)."""
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line.strip():
            raise FormatError("missing header line", 1)
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"bad header JSON: {exc}", 1) from exc
        if header.get("format") != INTERCHANGE_FORMAT:
            raise FormatError(
                f"unsupported format {header.get('format')!r}", 1)
        try:
            dim = int(header["dim"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError("header missing integer 'dim'", 1) from exc
        store = EmbeddingStore(dim=dim, encoder_name=str(header.get("encoder", "")))
        for lineno, raw in enumerate(fh, 2):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw)
                text = rec["text"]
                vals = rec["v"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise FormatError(f"bad record: {exc}", lineno) from exc
            arr = np.asarray(vals, dtype=np.float64)
            if arr.shape != (dim,):
                raise DimMismatchError(
                    f"line {lineno}: vector has {arr.size} entries, header dim={dim}")
            if not np.all(np.isfinite(arr)):
                raise FormatError("non-finite vector entry", lineno)
            if text in store.vectors:
                warnings.warn(f"duplicate store key {text!r}; last record wins")
            store.vectors[text] = arr
    return store


def save_store(store: EmbeddingStore, path: str) -> None:
    """Write the interchange file; floats as shortest round-trip decimals."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        header = {
            "format": INTERCHANGE_FORMAT,
            "dim": store.dim,
            "encoder": store.encoder_name,
            "pooling": "mean",
        }
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for text, vec in store.vectors.items():
            rec = {"text": text, "v": [float(x) for x in vec]}
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def finite_or_raise(vec: np.ndarray, context: str) -> np.ndarray:
    if not np.all(np.isfinite(vec)):
        raise ServiceError(f"non-finite embedding for {context!r}")
    return vec
