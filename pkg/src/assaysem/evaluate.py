"""Micro-averaged metrics, the cross-validation driver, and result grids."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from assaysem import baseline, cluster, vectorize
from assaysem.corpus import Corpus, FoldSplit, Statement
from assaysem.errors import InvalidArgumentError


def derive_seed(base: int, *parts: int) -> int:
    """Stable per-cell seed derivation (splitmix64 chain over base and parts).

    Any single grid cell (fold, K, ...) is re-runnable in isolation from
    the one experiment seed.
    """
    mask = (1 << 64) - 1

    def mix(z: int) -> int:
        z = (z + 0x9E3779B97F4A7C15) & mask
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        return z ^ (z >> 31)

    state = mix(base & mask)
    for p in parts:
        state = mix(state ^ (p & mask))
    return state


@dataclass(frozen=True)
class PredictionPair:
    assay_id: str
    predicted: frozenset[Statement]
    gold: frozenset[Statement]


@dataclass(frozen=True)
class EvalReport:
    """Metrics for one configuration, either a single fold or the fold average."""

    config: dict
    fold: int | None  # None for the averaged report
    tp: int
    fp: int
    fn: int
    precision: float | None  # None = undefined (no predictions at all)
    recall: float
    f1: float
    metadata: dict = field(default_factory=dict)


def micro_metrics(pairs: list[PredictionPair], config: dict | None = None, fold: int | None = None) -> EvalReport:
    """Pool tp/fp/fn over all pairs; precision is flagged undefined when
    nothing was predicted rather than coerced to 0 or 1."""
    if not pairs:
        raise InvalidArgumentError("cannot score an empty prediction list")
    tp = fp = fn = 0
    for pair in pairs:
        tp += len(pair.predicted & pair.gold)
        fp += len(pair.predicted - pair.gold)
        fn += len(pair.gold - pair.predicted)
    precision = tp / (tp + fp) if (tp + fp) > 0 else None
    recall = tp / (tp + fn) if (tp + fn) > 0 else 0.0
    p = precision or 0.0
    f1 = 2 * p * recall / (p + recall) if (p + recall) > 0 else 0.0
    return EvalReport(
        config=config or {},
        fold=fold,
        tp=tp,
        fp=fp,
        fn=fn,
        precision=precision,
        recall=recall,
        f1=f1,
    )


@dataclass(frozen=True)
class MethodConfig:
    """Everything needed to reproduce one evaluation cell."""

    method: Literal["naive", "cluster"]
    seed: int = 13
    # cluster method
    vectorizer: Literal["tfidf", "embedding"] = "tfidf"
    embedding_path: str | None = None
    k: int | None = None
    threshold: int = 1
    max_iter: int = 300
    tol: float = 1e-6
    # naive method
    top_n: int | None = None
    include_test: bool = False  # literal whole-dataset frequency reading

    def as_dict(self) -> dict:
        d = {"method": self.method, "seed": self.seed}
        if self.method == "cluster":
            d.update(
                vectorizer=self.vectorizer,
                k=self.k,
                threshold=self.threshold,
            )
        else:
            d.update(top_n=self.top_n, include_test=self.include_test)
        return d


@dataclass(frozen=True)
class CVResult:
    averaged: EvalReport
    per_fold: tuple[EvalReport, ...]


def _average(per_fold: list[EvalReport], config: dict) -> EvalReport:
    """Arithmetic mean of per-fold scores (not a recount of pooled totals)."""
    defined_p = [r.precision for r in per_fold if r.precision is not None]
    return EvalReport(
        config=config,
        fold=None,
        tp=sum(r.tp for r in per_fold),
        fp=sum(r.fp for r in per_fold),
        fn=sum(r.fn for r in per_fold),
        precision=sum(defined_p) / len(defined_p) if defined_p else None,
        recall=sum(r.recall for r in per_fold) / len(per_fold),
        f1=sum(r.f1 for r in per_fold) / len(per_fold),
        metadata={"folds": len(per_fold)},
    )


def run_fold(corpus: Corpus, config: MethodConfig, fold: FoldSplit,
             embedding_model: vectorize.EmbeddingModel | None = None) -> EvalReport:
    """Fit on the fold's train split only, predict on its test split, score."""
    by_id = corpus.by_id()
    train = [r for r in corpus if r.id in fold.train_ids]
    test = [r for r in corpus if r.id in fold.test_ids]
    metadata: dict = {}

    if config.method == "naive":
        source = list(corpus) if config.include_test else train
        table = baseline.build_frequency_table(source)
        predicted = baseline.naive_semantify(table, config.top_n or 0)
        pairs = [PredictionPair(r.id, predicted, r.statements) for r in test]
    else:
        if config.k is None:
            raise InvalidArgumentError("cluster method needs k")
        if config.vectorizer == "tfidf":
            model = vectorize.fit_tfidf([r.text for r in train])
        else:
            if embedding_model is None:
                if not config.embedding_path:
                    raise InvalidArgumentError("embedding vectorizer needs embedding_path")
                embedding_model = vectorize.load_embeddings(config.embedding_path)
            model = embedding_model
        metadata["vectorizer"] = model.fingerprint()
        train_vecs = np.stack([model.transform(r) for r in train])
        fit = cluster.fit_kmeans(
            train_vecs,
            config.k,
            seed=derive_seed(config.seed, fold.fold_index, config.k),
            max_iter=config.max_iter,
            tol=config.tol,
        )
        cmodel = cluster.attach_statements(fit, train, model.fingerprint())
        metadata["inertia"] = cmodel.inertia
        pairs = [
            PredictionPair(
                r.id,
                cluster.semantify(cmodel, model.transform(r), config.threshold).statements,
                r.statements,
            )
            for r in test
        ]
    report = micro_metrics(pairs, config=config.as_dict(), fold=fold.fold_index)
    return replace(report, metadata=metadata)


def run_cv(corpus: Corpus, config: MethodConfig, folds: list[FoldSplit]) -> CVResult:
    embedding_model = None
    if config.method == "cluster" and config.vectorizer == "embedding" and config.embedding_path:
        embedding_model = vectorize.load_embeddings(config.embedding_path)
    per_fold = [run_fold(corpus, config, fold, embedding_model) for fold in folds]
    return CVResult(
        averaged=_average(per_fold, config.as_dict()),
        per_fold=tuple(per_fold),
    )


def _fmt(x: float | None) -> str:
    return "undef" if x is None else f"{x:.4f}"


def reports_to_csv(results: list[CVResult]) -> str:
    """Flat per-fold + avg rows: method, vectorizer, k, threshold/top_n, fold, P, R, F1."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["method", "vectorizer", "k", "threshold", "top_n", "fold", "P", "R", "F1"])
    for result in results:
        rows = list(result.per_fold) + [result.averaged]
        for r in rows:
            c = r.config
            writer.writerow([
                c.get("method", ""),
                c.get("vectorizer", ""),
                c.get("k", ""),
                c.get("threshold", ""),
                c.get("top_n", ""),
                "avg" if r.fold is None else r.fold,
                _fmt(r.precision),
                _fmt(r.recall),
                _fmt(r.f1),
            ])
    return buf.getvalue()


def emit_naive_grid(results: dict[int, EvalReport]) -> str:
    """One row of P/R/F1 per top-n column, mirroring the naive-baseline table."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    ns = sorted(results)
    writer.writerow([f"top{n}_{m}" for n in ns for m in ("P", "R", "F1")])
    writer.writerow(
        [_fmt(v) for n in ns for v in (results[n].precision, results[n].recall, results[n].f1)]
    )
    return buf.getvalue()


def emit_cluster_grid(
    results: dict[tuple[str, int, int], EvalReport],
    k_values: list[int],
    thresholds: list[int] = (4, 3, 2, 1),
    vectorizers: list[str] = ("tfidf", "embedding"),
) -> str:
    """K rows x (threshold x vectorizer) blocks with trend arrows and a best-F1 marker.

    `results` is keyed by (vectorizer, threshold, k). Missing cells are
    emitted as MISSING, never silently dropped.
    """
    buf = io.StringIO()
    writer = csv.writer(buf)
    header = ["k"]
    for t in thresholds:
        for v in vectorizers:
            header += [f"{v}_ge{t}_P", f"{v}_ge{t}_R", f"{v}_ge{t}_F1", f"{v}_ge{t}_trend"]
    writer.writerow(header)

    best: dict[tuple[str, int], int | None] = {}
    for t in thresholds:
        for v in vectorizers:
            cells = [(k, results.get((v, t, k))) for k in k_values]
            scored = [(r.f1, k) for k, r in cells if r is not None]
            best[(v, t)] = max(scored)[1] if scored else None

    for i, k in enumerate(k_values):
        row: list[str] = [str(k)]
        for t in thresholds:
            for v in vectorizers:
                r = results.get((v, t, k))
                if r is None:
                    row += ["MISSING", "MISSING", "MISSING", ""]
                    continue
                f1_cell = _fmt(r.f1)
                if best[(v, t)] == k:
                    f1_cell += "*"
                trend = ""
                if i > 0:
                    prev = results.get((v, t, k_values[i - 1]))
                    if prev is not None:
                        trend = "up" if r.f1 > prev.f1 else ("down" if r.f1 < prev.f1 else "flat")
                row += [_fmt(r.precision), _fmt(r.recall), f1_cell, trend]
        writer.writerow(row)
    return buf.getvalue()
