"""Depositor-record ingestion: parse raw assay JSON, extract description text.

Each depositor source is described by a small declarative profile mapping
section names to JSON-pointer paths, so new depositors are added without
code changes. Only JSON responses are supported; XML/CSV profiles are
declared extension points.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from assaysem.corpus import BioassayRecord
from assaysem.errors import DepositorParseError, UnsupportedSourceError

# Reason codes used in ExtractionReport.unparseable
MISSING_ID = "MISSING_ID"
DUPLICATE_ID = "DUPLICATE_ID"
NO_TEXT = "NO_TEXT"

# Profile for "The Scripps Research Molecular Screening Center" style
# responses (PubChem-like assay submissions). Section paths resolve
# against each assay entry; list-valued sections are joined line-wise.
SCRIPPS_PROFILE = {
    "name": "scripps",
    "format": "json",
    "records": "/assays",
    "assay_id": "/descr/aid/id",
    "sections": {
        "overview": "/descr/description",
        "protocol": "/descr/protocol",
    },
    "article_refs": "/descr/xref",
    "article_ref_id": "/pmid",
}

PROFILES = {"scripps": SCRIPPS_PROFILE}


def resolve_pointer(doc: Any, pointer: str) -> Any:
    """Minimal RFC 6901 JSON-pointer lookup; returns None when absent."""
    if pointer == "":
        return doc
    node = doc
    for part in pointer.lstrip("/").split("/"):
        part = part.replace("~1", "/").replace("~0", "~")
        if isinstance(node, dict):
            if part not in node:
                return None
            node = node[part]
        elif isinstance(node, list):
            try:
                node = node[int(part)]
            except (ValueError, IndexError):
                return None
        else:
            return None
    return node


@dataclass(frozen=True)
class DepositorRecord:
    """One raw assay entry plus the fields the profile could locate.

    `raw` keeps the depositor JSON verbatim for provenance; `assay_id` is
    empty when the profile found no id (reported downstream, not dropped).
    """

    source: str
    raw: dict
    assay_id: str
    article_refs: tuple[str, ...] = ()


@dataclass(frozen=True)
class ExtractionReport:
    total: int
    extracted: int
    unparseable: tuple[tuple[str, str], ...]  # (assay_id or positional tag, reason)

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "extracted": self.extracted,
            "unparseable": [{"assay_id": a, "reason": r} for a, r in self.unparseable],
        }


def get_profile(source: str) -> dict:
    try:
        return PROFILES[source]
    except KeyError:
        raise UnsupportedSourceError(
            f"no ingestion profile for source {source!r}; known: {sorted(PROFILES)}"
        ) from None


def _extract_refs(entry: Any, profile: dict) -> tuple[str, ...]:
    refs = resolve_pointer(entry, profile.get("article_refs", ""))
    if not isinstance(refs, list):
        return ()
    out = []
    for item in refs:
        if isinstance(item, (str, int)):
            out.append(str(item))
        elif isinstance(item, dict):
            rid = resolve_pointer(item, profile.get("article_ref_id", ""))
            if rid is not None:
                out.append(str(rid))
    return tuple(out)


def parse_depositor_file(path: str | Path, profile: dict | str) -> list[DepositorRecord]:
    """Parse one depositor response document into DepositorRecords.

    An empty assay array is a valid, empty result. Malformed JSON raises
    DepositorParseError with the decoder's byte position.
    """
    if isinstance(profile, str):
        profile = get_profile(profile)
    if profile.get("format", "json") != "json":
        raise UnsupportedSourceError(f"unsupported profile format {profile.get('format')!r}")
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DepositorParseError(f"{path}: invalid JSON at byte {exc.pos}: {exc.msg}") from exc
    entries = resolve_pointer(doc, profile["records"])
    if entries is None and isinstance(doc, list):
        entries = doc
    if not isinstance(entries, list):
        raise DepositorParseError(
            f"{path}: no assay array at pointer {profile['records']!r}"
        )
    records = []
    for entry in entries:
        rid = resolve_pointer(entry, profile["assay_id"])
        records.append(
            DepositorRecord(
                source=profile["name"],
                raw=entry,
                assay_id="" if rid is None else str(rid),
                article_refs=_extract_refs(entry, profile),
            )
        )
    return records


def _join_section(value: Any) -> str | None:
    if isinstance(value, str):
        return value if value.strip() else None
    if isinstance(value, list) and all(isinstance(v, str) for v in value):
        joined = "\n".join(value)
        return joined if joined.strip() else None
    return None


def extract_text(record: DepositorRecord, profile: dict | str) -> str | None:
    """Locate the overview and protocol-summary sections and merge them.

    Sections are concatenated with a blank-line separator; None when
    neither section exists (a reported outcome, never an error).
    """
    if isinstance(profile, str):
        profile = get_profile(profile)
    parts = []
    for section_pointer in profile["sections"].values():
        text = _join_section(resolve_pointer(record.raw, section_pointer))
        if text is not None:
            parts.append(text)
    return "\n\n".join(parts) if parts else None


def to_bioassay_records(
    records: list[DepositorRecord], profile: dict | str
) -> tuple[list[BioassayRecord], ExtractionReport]:
    """Produce unlabeled BioassayRecords; account for every input in the report.

    Article cross-references survive many-to-many (an assay can belong to
    several papers); retrieve them per record via `article_map`.
    """
    out: list[BioassayRecord] = []
    unparseable: list[tuple[str, str]] = []
    seen: set[str] = set()
    for pos, rec in enumerate(records):
        if not rec.assay_id:
            unparseable.append((f"<entry {pos}>", MISSING_ID))
            continue
        if rec.assay_id in seen:
            unparseable.append((rec.assay_id, DUPLICATE_ID))
            continue
        text = extract_text(rec, profile)
        if text is None:
            seen.add(rec.assay_id)
            unparseable.append((rec.assay_id, NO_TEXT))
            continue
        seen.add(rec.assay_id)
        out.append(BioassayRecord(id=rec.assay_id, text=text))
    return out, ExtractionReport(
        total=len(records), extracted=len(out), unparseable=tuple(unparseable)
    )


def article_map(records: list[DepositorRecord]) -> dict[str, tuple[str, ...]]:
    """assay id -> article ids, for records that carried an id."""
    return {r.assay_id: r.article_refs for r in records if r.assay_id}
