"""Text vectorization: corpus-fitted TF-IDF or externally supplied embeddings.

TF-IDF variant: raw term counts weighted by smoothed inverse document
frequency, idf(t) = ln((1 + N) / (1 + df(t))) + 1, then L2-normalized.
External embeddings are read from a JSON-Lines file mapping assay ids to
fixed-dimension dense vectors; no transformer inference happens here.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from assaysem.corpus import BioassayRecord
from assaysem.errors import (
    EmbeddingFormatError,
    FitError,
    MissingEmbeddingError,
)

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_NUMBER_RE = re.compile(r"^[0-9]+$")

TFIDF_VARIANT = "count*smoothed-idf,l2"
TOKENIZER_VARIANT = "lower,alnum-split,drop-len<2,drop-numeric"


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop len<2 and pure numbers."""
    tokens = _TOKEN_RE.findall(text.lower())
    return [t for t in tokens if len(t) >= 2 and not _NUMBER_RE.match(t)]


@dataclass(frozen=True)
class TfidfModel:
    """Fitted vocabulary and idf weights; maps text to a dense unit vector."""

    vocabulary: dict[str, int]
    idf: np.ndarray  # aligned with vocabulary indices

    kind = "tfidf"

    @property
    def dimension(self) -> int:
        return len(self.vocabulary)

    def transform(self, record: BioassayRecord) -> np.ndarray:
        return self.transform_text(record.text)

    def transform_text(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension)
        for token, count in Counter(tokenize(text)).items():
            idx = self.vocabulary.get(token)
            if idx is not None:
                vec[idx] = count * self.idf[idx]
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec

    def fingerprint(self) -> str:
        return f"tfidf[{TFIDF_VARIANT};{TOKENIZER_VARIANT};dim={self.dimension}]"

    def as_dict(self) -> dict:
        return {
            "kind": "tfidf",
            "vocabulary": self.vocabulary,
            "idf": self.idf.tolist(),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "TfidfModel":
        return cls(vocabulary=obj["vocabulary"], idf=np.asarray(obj["idf"], dtype=float))


@dataclass(frozen=True)
class EmbeddingModel:
    """External per-assay dense vectors loaded from file; lookup only."""

    table: dict[str, np.ndarray]
    dimension: int
    meta: dict = field(default_factory=dict)

    kind = "embedding"

    def transform(self, record: BioassayRecord) -> np.ndarray:
        try:
            return self.table[record.id]
        except KeyError:
            raise MissingEmbeddingError(
                f"no embedding for assay id {record.id!r}; the embedding file is incomplete"
            ) from None

    def fingerprint(self) -> str:
        producer = self.meta.get("producer", "unknown")
        return f"embedding[producer={producer};dim={self.dimension}]"


def fit_tfidf(train_texts: list[str]) -> TfidfModel:
    """Fit vocabulary and idf weights on training texts only."""
    tokenized = [tokenize(t) for t in train_texts]
    if not any(tokenized):
        raise FitError("cannot fit TF-IDF: no tokens in any training document")
    n_docs = len(tokenized)
    df: Counter[str] = Counter()
    for tokens in tokenized:
        df.update(set(tokens))
    vocab = {tok: i for i, tok in enumerate(sorted(df))}
    idf = np.empty(len(vocab))
    for tok, i in vocab.items():
        idf[i] = math.log((1 + n_docs) / (1 + df[tok])) + 1.0
    return TfidfModel(vocabulary=vocab, idf=idf)


def load_embeddings(path: str | Path) -> EmbeddingModel:
    """Read a JSON-Lines embedding file: {"id": ..., "vector": [...]} per line.

    An optional leading {"meta": {...}} line carries producer/pooling info.
    All rows must share one dimension and contain only finite values.
    """
    path = Path(path)
    table: dict[str, np.ndarray] = {}
    meta: dict = {}
    dimension: int | None = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise EmbeddingFormatError(f"{path}:{lineno}: bad JSON: {exc}") from exc
            if "meta" in obj and "id" not in obj:
                meta = obj["meta"]
                continue
            if "id" not in obj or "vector" not in obj:
                raise EmbeddingFormatError(f"{path}:{lineno}: need 'id' and 'vector'")
            vec = np.asarray(obj["vector"], dtype=float)
            if vec.ndim != 1 or vec.size == 0:
                raise EmbeddingFormatError(f"{path}:{lineno}: vector must be a flat non-empty array")
            if not np.all(np.isfinite(vec)):
                raise EmbeddingFormatError(f"{path}:{lineno}: vector contains NaN or Inf")
            if dimension is None:
                dimension = vec.size
            elif vec.size != dimension:
                raise EmbeddingFormatError(
                    f"{path}:{lineno}: dimension {vec.size} != {dimension}"
                )
            table[obj["id"]] = vec
    if dimension is None:
        raise EmbeddingFormatError(f"{path}: no embedding rows")
    return EmbeddingModel(table=table, dimension=dimension, meta=meta)
