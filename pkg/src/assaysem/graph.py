"""Embedded triple store with provenance tracking and N-Triples export.

Subjects get deterministic IRIs (urn:assay:<id>, urn:paper:<extid>);
statement properties become urn:property:<percent-encoded label> so the
label is recoverable on reparse. Persistence is a single JSON file plus
an append-only provenance log next to it.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import quote, unquote

from assaysem.errors import InvalidArgumentError

Triple = tuple[str, str, str]  # (subject iri, predicate label, object label)


def assay_iri(assay_id: str) -> str:
    return f"urn:assay:{quote(assay_id, safe='')}"


def paper_iri(external_id: str) -> str:
    return f"urn:paper:{quote(external_id, safe='')}"


def property_iri(label: str) -> str:
    return f"urn:property:{quote(label, safe='')}"


def _escape_literal(s: str) -> str:
    return (
        s.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def _unescape_literal(s: str) -> str:
    out, i = [], 0
    escapes = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}
    while i < len(s):
        if s[i] == "\\" and i + 1 < len(s) and s[i + 1] in escapes:
            out.append(escapes[s[i + 1]])
            i += 2
        else:
            out.append(s[i])
            i += 1
    return "".join(out)


_NT_LINE = re.compile(r'^<([^>]*)> <([^>]*)> "((?:[^"\\]|\\.)*)" \.$')


def to_ntriples(triples: set[Triple]) -> str:
    """Serialize: one triple per line, terminated by ' .'. Empty set -> empty body."""
    lines = []
    for subject, predicate, obj in sorted(triples):
        lines.append(f'<{subject}> <{property_iri(predicate)}> "{_escape_literal(obj)}" .')
    return "\n".join(lines) + ("\n" if lines else "")


def parse_ntriples(body: str) -> set[Triple]:
    """Reparse our own export; predicate labels are percent-decoded back."""
    triples: set[Triple] = set()
    for lineno, line in enumerate(body.splitlines(), start=1):
        if not line.strip():
            continue
        m = _NT_LINE.match(line)
        if not m:
            raise InvalidArgumentError(f"line {lineno} is not a valid N-Triples statement")
        subject, pred_iri, literal = m.groups()
        if not pred_iri.startswith("urn:property:"):
            raise InvalidArgumentError(f"line {lineno}: unexpected predicate IRI {pred_iri}")
        predicate = unquote(pred_iri[len("urn:property:"):])
        triples.add((subject, predicate, _unescape_literal(literal)))
    return triples


class GraphStore:
    """Idempotent triple insertion with per-triple provenance.

    Writes are serialized through one lock; reads copy a consistent
    snapshot. When constructed with a path, every accepted write is
    persisted immediately and appended to the provenance log.
    """

    def __init__(self, path: str | Path | None = None):
        self._lock = threading.Lock()
        self._triples: set[Triple] = set()
        self._provenance: dict[Triple, set[str]] = {}
        self._path = Path(path) if path else None
        if self._path and self._path.exists():
            self._load()

    def _load(self) -> None:
        obj = json.loads(self._path.read_text(encoding="utf-8"))
        for entry in obj["triples"]:
            t = (entry["s"], entry["p"], entry["o"])
            self._triples.add(t)
            self._provenance[t] = set(entry.get("provenance", []))

    def _persist(self) -> None:
        if not self._path:
            return
        obj = {
            "triples": [
                {"s": s, "p": p, "o": o, "provenance": sorted(self._provenance[(s, p, o)])}
                for s, p, o in sorted(self._triples)
            ]
        }
        self._path.write_text(json.dumps(obj, ensure_ascii=False), encoding="utf-8")

    def _log(self, event: dict) -> None:
        if not self._path:
            return
        log_path = self._path.with_suffix(self._path.suffix + ".log")
        with log_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")

    def insert(self, triples: list[Triple], provenance: str) -> int:
        """Insert triples idempotently; returns how many were new."""
        if not provenance:
            raise InvalidArgumentError("every insert needs a provenance tag")
        with self._lock:
            added = 0
            for t in triples:
                if t not in self._triples:
                    self._triples.add(t)
                    added += 1
                self._provenance.setdefault(t, set()).add(provenance)
            self._persist()
            self._log({"provenance": provenance, "triples": [list(t) for t in triples]})
            return added

    def triples(self) -> set[Triple]:
        with self._lock:
            return set(self._triples)

    def provenance(self, triple: Triple) -> set[str]:
        with self._lock:
            return set(self._provenance.get(triple, set()))

    def __len__(self) -> int:
        with self._lock:
            return len(self._triples)

    def subjects(self) -> set[str]:
        with self._lock:
            return {s for s, _, _ in self._triples}

    def export_ntriples(self) -> str:
        return to_ntriples(self.triples())

    def compare(self, assay_ids: list[str], properties: list[str] | None = None) -> dict:
        """Property x assay matrix over inserted assay triples.

        Cell values are lists (a property can hold several values); blank
        cells are empty lists. Raises KeyError for unknown assay ids.
        """
        snapshot = self.triples()
        known = {s for s, _, _ in snapshot}
        matrix: dict[str, dict[str, list[str]]] = {}
        for aid in assay_ids:
            iri = assay_iri(aid)
            if iri not in known:
                raise KeyError(aid)
            for s, p, o in snapshot:
                if s == iri:
                    matrix.setdefault(p, {}).setdefault(aid, []).append(o)
        props = sorted(matrix) if properties is None else [p for p in properties if p in matrix]
        return {
            "assays": assay_ids,
            "properties": props,
            "matrix": {
                p: {aid: sorted(matrix.get(p, {}).get(aid, [])) for aid in assay_ids}
                for p in props
            },
        }
