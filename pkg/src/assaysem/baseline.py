"""Naive baseline: annotate every assay with the globally most frequent statements."""

from __future__ import annotations

from dataclasses import dataclass

from assaysem.corpus import BioassayRecord, Statement
from assaysem.errors import InvalidArgumentError


@dataclass(frozen=True)
class FrequencyTable:
    """Statements ranked by distinct-assay count, ties broken lexicographically."""

    ranked: tuple[tuple[Statement, int], ...]


def build_frequency_table(records: list[BioassayRecord]) -> FrequencyTable:
    """Count distinct-assay occurrences and rank deterministically."""
    if not records:
        raise InvalidArgumentError("cannot build a frequency table from zero records")
    counts: dict[Statement, int] = {}
    for rec in records:
        for stmt in rec.statements:
            counts[stmt] = counts.get(stmt, 0) + 1
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return FrequencyTable(ranked=tuple(ranked))


def naive_semantify(table: FrequencyTable, n: int) -> frozenset[Statement]:
    """The top-n statements; identical for every test assay."""
    if n < 0:
        raise InvalidArgumentError("n must be >= 0")
    return frozenset(stmt for stmt, _ in table.ranked[:n])
