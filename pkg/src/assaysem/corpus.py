"""Canonical bioassay data model: statements, records, corpora, fold splits.

The on-disk corpus format is UTF-8 JSON Lines, one record per line:

    {"id": "...", "text": "...", "statements": [{"property": "...", "value": "..."}, ...]}

Statements are opaque labeled pairs; no ontology resolution happens here.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

from assaysem.errors import EmptyCorpusError, InvalidArgumentError


def normalize_label(s: str) -> str:
    """Trim, collapse internal whitespace, and case-fold a label."""
    return " ".join(s.split()).casefold()


@dataclass(frozen=True, order=True)
class Statement:
    """One property/value pair attached to an assay (subject implicit).

    Labels are normalized at construction; equality and hashing use the
    normalized pair, so the corpus-wide unique count is stable under
    formatting noise.
    """

    property: str
    value: str

    def __post_init__(self):
        object.__setattr__(self, "property", normalize_label(self.property))
        object.__setattr__(self, "value", normalize_label(self.value))
        if not self.property or not self.value:
            raise InvalidArgumentError(
                f"statement labels must be non-empty after normalization: "
                f"({self.property!r}, {self.value!r})"
            )

    def as_dict(self) -> dict:
        return {"property": self.property, "value": self.value}


@dataclass(frozen=True)
class BioassayRecord:
    """An assay: stable id, description text, and (for gold data) its statements."""

    id: str
    text: str
    statements: frozenset[Statement] = frozenset()

    def __post_init__(self):
        if not self.id:
            raise InvalidArgumentError("record id must be non-empty")
        object.__setattr__(self, "statements", frozenset(self.statements))

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "statements": [s.as_dict() for s in sorted(self.statements)],
        }


@dataclass(frozen=True)
class LoadReport:
    """Accounting of a corpus load: which lines failed and why."""

    total_lines: int
    loaded: int
    malformed: tuple[tuple[int, str], ...]  # (1-based line number, reason)


@dataclass(frozen=True)
class Corpus:
    """An immutable ordered collection of bioassay records."""

    records: tuple[BioassayRecord, ...]
    source: str = "<memory>"
    loaded_at: str = ""
    load_report: LoadReport | None = None

    def __post_init__(self):
        ids = [r.id for r in self.records]
        if len(ids) != len(set(ids)):
            seen, dupes = set(), set()
            for i in ids:
                (dupes if i in seen else seen).add(i)
            raise InvalidArgumentError(f"duplicate record ids: {sorted(dupes)[:5]}")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def ids(self) -> list[str]:
        return [r.id for r in self.records]

    def by_id(self) -> dict[str, BioassayRecord]:
        return {r.id: r for r in self.records}


@dataclass(frozen=True)
class FoldSplit:
    """One train/test partition of a cross-validation run."""

    fold_index: int
    train_ids: frozenset[str]
    test_ids: frozenset[str]
    seed: int

    def __post_init__(self):
        if self.train_ids & self.test_ids:
            raise InvalidArgumentError("train and test ids overlap")

    def as_dict(self) -> dict:
        return {
            "fold_index": self.fold_index,
            "train_ids": sorted(self.train_ids),
            "test_ids": sorted(self.test_ids),
            "seed": self.seed,
        }


@dataclass(frozen=True)
class CorpusStats:
    record_count: int
    unique_statements: int
    unique_properties: int
    statements_min: int
    statements_mean: float
    statements_max: int

    def as_dict(self) -> dict:
        return {
            "record_count": self.record_count,
            "unique_statements": self.unique_statements,
            "unique_properties": self.unique_properties,
            "statements_min": self.statements_min,
            "statements_mean": self.statements_mean,
            "statements_max": self.statements_max,
        }


def _parse_record(obj: dict) -> BioassayRecord:
    if not isinstance(obj, dict):
        raise ValueError("record is not a JSON object")
    rid = obj.get("id")
    text = obj.get("text")
    if not isinstance(rid, str) or not rid:
        raise ValueError("missing or empty 'id'")
    if not isinstance(text, str):
        raise ValueError("missing 'text'")
    stmts = []
    for raw in obj.get("statements", []):
        if not isinstance(raw, dict) or "property" not in raw or "value" not in raw:
            raise ValueError("statement entries need 'property' and 'value'")
        stmts.append(Statement(raw["property"], raw["value"]))
    return BioassayRecord(id=rid, text=text, statements=frozenset(stmts))


def load_corpus(path: str | Path) -> Corpus:
    """Load a JSON-Lines corpus file.

    Malformed lines are collected into the returned corpus' load report
    rather than silently dropped. Raises EmptyCorpusError when no line
    parses, and the usual OSError family when the file is unreadable.
    """
    path = Path(path)
    records: list[BioassayRecord] = []
    malformed: list[tuple[int, str]] = []
    seen_ids: set[str] = set()
    total = 0
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            total += 1
            try:
                rec = _parse_record(json.loads(line))
                if rec.id in seen_ids:
                    raise ValueError(f"duplicate id {rec.id!r}")
                seen_ids.add(rec.id)
                records.append(rec)
            except (json.JSONDecodeError, ValueError, InvalidArgumentError) as exc:
                malformed.append((lineno, str(exc)))
    if not records:
        raise EmptyCorpusError(f"no parseable records in {path}")
    return Corpus(
        records=tuple(records),
        source=str(path),
        loaded_at=datetime.now(timezone.utc).isoformat(),
        load_report=LoadReport(total, len(records), tuple(malformed)),
    )


def save_corpus(corpus: Iterable[BioassayRecord], path: str | Path) -> None:
    """Write records as JSON Lines."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for rec in corpus:
            fh.write(json.dumps(rec.as_dict(), ensure_ascii=False) + "\n")


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Counts and per-assay statement statistics over a gold corpus."""
    if len(corpus) == 0:
        raise InvalidArgumentError("corpus is empty")
    all_statements: set[Statement] = set()
    counts: list[int] = []
    for rec in corpus:
        all_statements |= rec.statements
        counts.append(len(rec.statements))
    return CorpusStats(
        record_count=len(corpus),
        unique_statements=len(all_statements),
        unique_properties=len({s.property for s in all_statements}),
        statements_min=min(counts),
        statements_mean=sum(counts) / len(counts),
        statements_max=max(counts),
    )


def make_folds(corpus: Corpus, k_folds: int, seed: int) -> list[FoldSplit]:
    """Deterministic k-fold split: seeded shuffle, then contiguous test slices.

    Test sets are pairwise disjoint and cover the corpus; sizes differ by
    at most one. No stratification is applied.
    """
    n = len(corpus)
    if k_folds < 2:
        raise InvalidArgumentError("k_folds must be >= 2")
    if k_folds > n:
        raise InvalidArgumentError(f"k_folds={k_folds} exceeds corpus size {n}")
    ids = sorted(corpus.ids())
    random.Random(seed).shuffle(ids)
    base, extra = divmod(n, k_folds)
    folds: list[FoldSplit] = []
    start = 0
    for i in range(k_folds):
        size = base + (1 if i < extra else 0)
        test = frozenset(ids[start : start + size])
        folds.append(
            FoldSplit(
                fold_index=i,
                train_ids=frozenset(ids) - test,
                test_ids=test,
                seed=seed,
            )
        )
        start += size
    return folds
