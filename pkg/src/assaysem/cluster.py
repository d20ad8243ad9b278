"""K-means fitting, elbow K selection, and cluster-based semantification.

Training assays are clustered by their text vectors; each cluster keeps a
frequency table of the statements carried by its member assays. A new
assay is assigned to its nearest centroid and annotated with the cluster's
statements whose member-assay count meets the requested threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from assaysem.corpus import BioassayRecord, Statement
from assaysem.errors import ConsistencyError, InvalidArgumentError


@dataclass(frozen=True)
class KMeansFit:
    """Raw Lloyd's-algorithm output before statements are attached."""

    centroids: np.ndarray  # (k, d)
    labels: np.ndarray  # (n,) cluster index per input vector
    inertia: float
    n_iter: int
    inertia_history: tuple[float, ...]
    seed: int


@dataclass(frozen=True)
class ClusterModel:
    """The trained semantifier: centroids plus per-cluster statement counts."""

    k: int
    centroids: np.ndarray
    assignments: dict[str, int]  # training record id -> cluster index
    statement_freq: tuple[dict[Statement, int], ...]  # per cluster
    seed: int
    inertia: float
    vectorizer_fingerprint: str = ""

    @property
    def dimension(self) -> int:
        return self.centroids.shape[1]

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "centroids": self.centroids.tolist(),
            "assignments": self.assignments,
            "statement_freq": [
                [[s.property, s.value, c] for s, c in sorted(freq.items())]
                for freq in self.statement_freq
            ],
            "seed": self.seed,
            "inertia": self.inertia,
            "vectorizer_fingerprint": self.vectorizer_fingerprint,
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.as_dict()), encoding="utf-8")

    @classmethod
    def from_dict(cls, obj: dict) -> "ClusterModel":
        return cls(
            k=obj["k"],
            centroids=np.asarray(obj["centroids"], dtype=float),
            assignments=obj["assignments"],
            statement_freq=tuple(
                {Statement(p, v): c for p, v, c in freq} for freq in obj["statement_freq"]
            ),
            seed=obj["seed"],
            inertia=obj["inertia"],
            vectorizer_fingerprint=obj.get("vectorizer_fingerprint", ""),
        )

    @classmethod
    def load(cls, path: str | Path) -> "ClusterModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class SemantificationResult:
    cluster_index: int
    distance: float
    statements: frozenset[Statement]
    threshold: int


def _kmeanspp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: spread initial centroids by squared-distance sampling."""
    n = x.shape[0]
    centroids = np.empty((k, x.shape[1]))
    centroids[0] = x[rng.integers(n)]
    closest_sq = np.sum((x - centroids[0]) ** 2, axis=1)
    for i in range(1, k):
        total = closest_sq.sum()
        if total <= 0:
            # all remaining points coincide with a centroid; pick any
            idx = rng.integers(n)
        else:
            idx = int(np.searchsorted(np.cumsum(closest_sq / total), rng.random()))
            idx = min(idx, n - 1)
        centroids[i] = x[idx]
        closest_sq = np.minimum(closest_sq, np.sum((x - centroids[i]) ** 2, axis=1))
    return centroids


def _assign(x: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest centroid per point (ties -> lowest index) and squared distances."""
    # ||x-c||^2 = ||x||^2 - 2 x.c + ||c||^2, clipped against rounding
    sq = (
        np.sum(x**2, axis=1)[:, None]
        - 2.0 * (x @ centroids.T)
        + np.sum(centroids**2, axis=1)[None, :]
    )
    np.clip(sq, 0.0, None, out=sq)
    labels = np.argmin(sq, axis=1)
    return labels, sq[np.arange(x.shape[0]), labels]


def fit_kmeans(
    vectors: np.ndarray,
    k: int,
    seed: int,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> KMeansFit:
    """Lloyd's algorithm from k-means++ initialization.

    Stops when the relative centroid shift drops below `tol` or after
    `max_iter` iterations. Empty clusters are repaired by reseeding with
    the point farthest from its current centroid. Deterministic for a
    fixed seed.
    """
    x = np.asarray(vectors, dtype=float)
    if x.ndim != 2:
        raise InvalidArgumentError("vectors must form a 2-D array")
    n = x.shape[0]
    if k < 1:
        raise InvalidArgumentError("k must be >= 1")
    if k >= n:
        raise InvalidArgumentError(f"k={k} must be smaller than the training size n={n}")
    rng = np.random.default_rng(seed)
    centroids = _kmeanspp_init(x, k, rng)
    history: list[float] = []
    labels = np.zeros(n, dtype=int)
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        labels, dist_sq = _assign(x, centroids)
        # repair empty clusters with the farthest-from-centroid points
        empty = [j for j in range(k) if not np.any(labels == j)]
        for j in empty:
            far = int(np.argmax(dist_sq))
            centroids[j] = x[far]
            labels[far] = j
            dist_sq[far] = 0.0
        history.append(float(dist_sq.sum()))
        new_centroids = np.empty_like(centroids)
        for j in range(k):
            new_centroids[j] = x[labels == j].mean(axis=0)
        shift = np.linalg.norm(new_centroids - centroids)
        scale = max(1.0, np.linalg.norm(centroids))
        centroids = new_centroids
        if shift <= tol * scale:
            break
    labels, dist_sq = _assign(x, centroids)
    inertia = float(dist_sq.sum())
    return KMeansFit(
        centroids=centroids,
        labels=labels,
        inertia=inertia,
        n_iter=n_iter,
        inertia_history=tuple(history),
        seed=seed,
    )


def attach_statements(
    fit: KMeansFit,
    train: list[BioassayRecord],
    vectorizer_fingerprint: str = "",
) -> ClusterModel:
    """Build per-cluster statement frequency tables from the training records.

    `train` must be ordered like the vectors given to fit_kmeans. Each
    assay contributes a statement at most once, so a statement's count in
    a cluster is the number of member assays carrying it.
    """
    if len(train) != fit.labels.shape[0]:
        raise ConsistencyError(
            f"{len(train)} records vs {fit.labels.shape[0]} cluster assignments"
        )
    k = fit.centroids.shape[0]
    freq: list[dict[Statement, int]] = [dict() for _ in range(k)]
    assignments: dict[str, int] = {}
    for rec, label in zip(train, fit.labels):
        assignments[rec.id] = int(label)
        table = freq[label]
        for stmt in rec.statements:
            table[stmt] = table.get(stmt, 0) + 1
    return ClusterModel(
        k=k,
        centroids=fit.centroids,
        assignments=assignments,
        statement_freq=tuple(freq),
        seed=fit.seed,
        inertia=fit.inertia,
        vectorizer_fingerprint=vectorizer_fingerprint,
    )


def semantify(model: ClusterModel, vector: np.ndarray, threshold: int = 1) -> SemantificationResult:
    """Assign a vector to its nearest cluster and emit that cluster's statements.

    Only statements carried by at least `threshold` member assays survive.
    An empty statement set is a valid outcome (an assay outside the scope
    of the training data), not an error.
    """
    if threshold < 1:
        raise InvalidArgumentError("threshold must be >= 1")
    v = np.asarray(vector, dtype=float)
    if v.shape != (model.dimension,):
        raise InvalidArgumentError(
            f"vector dimension {v.shape} does not match model dimension {model.dimension}"
        )
    dists = np.linalg.norm(model.centroids - v, axis=1)
    idx = int(np.argmin(dists))  # argmin takes the lowest index on ties
    statements = frozenset(
        s for s, count in model.statement_freq[idx].items() if count >= threshold
    )
    return SemantificationResult(
        cluster_index=idx,
        distance=float(dists[idx]),
        statements=statements,
        threshold=threshold,
    )


@dataclass(frozen=True)
class ElbowResult:
    selected_k: int
    k_candidates: tuple[int, ...]
    inertias: tuple[float, ...]


def elbow_select(
    vectors: np.ndarray,
    k_candidates: list[int],
    seed: int,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> ElbowResult:
    """Pick K at the knee of the inertia-vs-K curve.

    One model is fitted per candidate; the knee is the candidate with the
    maximum perpendicular distance from the chord joining the curve's
    endpoints. The full curve is returned for inspection.
    """
    if len(k_candidates) < 3:
        raise InvalidArgumentError("need at least 3 K candidates to locate a knee")
    ks = list(k_candidates)
    inertias = [fit_kmeans(vectors, k, seed, max_iter, tol).inertia for k in ks]
    pts = np.column_stack([np.asarray(ks, dtype=float), np.asarray(inertias)])
    # normalize axes so the knee is scale-independent
    span = pts.max(axis=0) - pts.min(axis=0)
    span[span == 0] = 1.0
    norm = (pts - pts.min(axis=0)) / span
    chord = norm[-1] - norm[0]
    chord /= np.linalg.norm(chord)
    rel = norm - norm[0]
    dist = np.abs(rel[:, 0] * chord[1] - rel[:, 1] * chord[0])
    return ElbowResult(
        selected_k=ks[int(np.argmax(dist))],
        k_candidates=tuple(ks),
        inertias=tuple(inertias),
    )
