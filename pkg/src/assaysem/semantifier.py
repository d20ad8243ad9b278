"""A deployable semantifier snapshot: fitted vectorizer + cluster model in one file."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from assaysem import cluster, vectorize
from assaysem.cluster import ClusterModel, SemantificationResult
from assaysem.corpus import Corpus
from assaysem.vectorize import TfidfModel


@dataclass(frozen=True)
class Semantifier:
    """What the service loads and serves: text in, statements out.

    Only TF-IDF snapshots can semantify arbitrary new text; external
    embedding tables are id-keyed and therefore evaluation-only.
    """

    vectorizer: TfidfModel
    model: ClusterModel

    def semantify_text(self, text: str, threshold: int = 1) -> SemantificationResult:
        return cluster.semantify(self.model, self.vectorizer.transform_text(text), threshold)

    def save(self, path: str | Path) -> None:
        obj = {
            "vectorizer": self.vectorizer.as_dict(),
            "cluster": self.model.as_dict(),
        }
        Path(path).write_text(json.dumps(obj), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Semantifier":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            vectorizer=TfidfModel.from_dict(obj["vectorizer"]),
            model=ClusterModel.from_dict(obj["cluster"]),
        )


def train_semantifier(corpus: Corpus, k: int, seed: int,
                      max_iter: int = 300, tol: float = 1e-6) -> Semantifier:
    """Fit TF-IDF and K-means on the whole corpus and bundle the result."""
    records = list(corpus)
    tfidf = vectorize.fit_tfidf([r.text for r in records])
    vecs = np.stack([tfidf.transform(r) for r in records])
    fit = cluster.fit_kmeans(vecs, k, seed, max_iter, tol)
    model = cluster.attach_statements(fit, records, tfidf.fingerprint())
    return Semantifier(vectorizer=tfidf, model=model)
