"""HTTP facade: stateless semantification, curation sessions, bulk import,
comparison, and N-Triples export over the embedded graph store."""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from assaysem import graph
from assaysem.corpus import Statement
from assaysem.errors import InvalidArgumentError
from assaysem.graph import GraphStore
from assaysem.semantifier import Semantifier

# ---------------------------------------------------------------------------
# wire models


class StatementModel(BaseModel):
    property: str
    value: str

    @classmethod
    def from_statement(cls, s: Statement) -> "StatementModel":
        return cls(property=s.property, value=s.value)

    def to_statement(self) -> Statement:
        return Statement(self.property, self.value)


class SemantifyRequest(BaseModel):
    text: str
    threshold: int = Field(default=1, ge=1)


class SemantifyResponse(BaseModel):
    cluster_index: int
    distance: float
    threshold: int
    statements: list[StatementModel]


class SessionCreateRequest(BaseModel):
    text: str
    threshold: int = Field(default=1, ge=1)
    assay_id: str | None = None
    curator: str = "anonymous"


class DecisionModel(BaseModel):
    property: str
    value: str
    decision: Literal["pending", "accepted", "rejected"]


class SessionDecisionsRequest(BaseModel):
    decisions: list[DecisionModel]


class SessionResponse(BaseModel):
    session_id: str
    assay_id: str
    text: str
    state: Literal["open", "inserted", "discarded"]
    threshold: int
    curator: str
    rows: list[DecisionModel]


class PaperMetadata(BaseModel):
    title: str
    external_id: str | None = None
    authors: list[str] = []


class InsertRequest(BaseModel):
    empty_contribution: bool = False
    paper: PaperMetadata | None = None


class InsertResponse(BaseModel):
    session_id: str
    assay_id: str
    triples_written: int
    statements: list[StatementModel]


class BulkEntry(BaseModel):
    paper: PaperMetadata | None = None
    assay_id: str | None = None
    text: str | None = None
    statements: list[StatementModel] | None = None
    threshold: int = Field(default=1, ge=1)


class BulkRequest(BaseModel):
    entries: list[BulkEntry]


class BulkEntryOutcome(BaseModel):
    index: int
    status: Literal["inserted", "semantified-then-inserted", "failed", "duplicate"]
    reason: str | None = None
    assay_id: str | None = None
    triples_written: int = 0


class BulkResponse(BaseModel):
    batch_id: str
    outcomes: list[BulkEntryOutcome]


# ---------------------------------------------------------------------------
# server state


@dataclass
class CurationSession:
    session_id: str
    assay_id: str
    text: str
    threshold: int
    curator: str
    proposal: frozenset[Statement]
    decisions: dict[Statement, str]
    state: str = "open"


class PubmedClient:
    """Article-metadata lookup. The default implementation resolves from a
    recorded-fixture file; live fetching is a deployment concern."""

    def __init__(self, fixture_path: str | Path | None = None):
        self._table: dict[str, dict] = {}
        if fixture_path:
            self._table = json.loads(Path(fixture_path).read_text(encoding="utf-8"))

    def fetch(self, pubmed_id: str) -> dict | None:
        return self._table.get(pubmed_id)


@dataclass
class AppState:
    store: GraphStore
    semantifier: Semantifier | None = None
    pubmed: PubmedClient = field(default_factory=PubmedClient)
    sessions: dict[str, CurationSession] = field(default_factory=dict)
    inserted_fingerprints: set = field(default_factory=set)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def swap_model(self, semantifier: Semantifier) -> None:
        # attribute assignment is atomic; in-flight requests keep the
        # snapshot they already grabbed
        self.semantifier = semantifier


def _session_response(s: CurationSession) -> SessionResponse:
    return SessionResponse(
        session_id=s.session_id,
        assay_id=s.assay_id,
        text=s.text,
        state=s.state,
        threshold=s.threshold,
        curator=s.curator,
        rows=[
            DecisionModel(property=st.property, value=st.value, decision=s.decisions[st])
            for st in sorted(s.proposal)
        ],
    )


def _statement_triples(assay_id: str, statements: frozenset[Statement]) -> list[graph.Triple]:
    subject = graph.assay_iri(assay_id)
    return [(subject, s.property, s.value) for s in sorted(statements)]


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="bioassay semantification service")
    app.state.engine = state

    def require_model() -> Semantifier:
        snapshot = state.semantifier
        if snapshot is None:
            raise HTTPException(status_code=503, detail="no semantifier model loaded")
        return snapshot

    @app.post("/semantify", response_model=SemantifyResponse)
    def semantify(req: SemantifyRequest):
        if not req.text.strip():
            raise HTTPException(status_code=400, detail="text must be non-empty")
        model = require_model()
        result = model.semantify_text(req.text, req.threshold)
        return SemantifyResponse(
            cluster_index=result.cluster_index,
            distance=result.distance,
            threshold=result.threshold,
            statements=[StatementModel.from_statement(s) for s in sorted(result.statements)],
        )

    @app.post("/sessions", response_model=SessionResponse, status_code=201)
    def create_session(req: SessionCreateRequest):
        if not req.text.strip():
            raise HTTPException(status_code=400, detail="text must be non-empty")
        model = require_model()
        result = model.semantify_text(req.text, req.threshold)
        session_id = uuid.uuid4().hex
        session = CurationSession(
            session_id=session_id,
            assay_id=req.assay_id or f"session-{session_id[:12]}",
            text=req.text,
            threshold=req.threshold,
            curator=req.curator,
            proposal=result.statements,
            decisions={s: "pending" for s in result.statements},
        )
        with state.lock:
            state.sessions[session_id] = session
        return _session_response(session)

    @app.get("/sessions/{session_id}", response_model=SessionResponse)
    def get_session(session_id: str):
        session = state.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return _session_response(session)

    @app.patch("/sessions/{session_id}", response_model=SessionResponse)
    def patch_session(session_id: str, req: SessionDecisionsRequest):
        with state.lock:
            session = state.sessions.get(session_id)
            if session is None:
                raise HTTPException(status_code=404, detail="unknown session")
            if session.state != "open":
                raise HTTPException(status_code=409, detail=f"session is {session.state}")
            updates = {}
            for d in req.decisions:
                try:
                    stmt = Statement(d.property, d.value)
                except InvalidArgumentError as exc:
                    raise HTTPException(status_code=400, detail=str(exc))
                if stmt not in session.proposal:
                    raise HTTPException(
                        status_code=400,
                        detail=f"statement ({stmt.property!r}, {stmt.value!r}) was not proposed",
                    )
                updates[stmt] = d.decision
            session.decisions.update(updates)
            return _session_response(session)

    @app.post("/sessions/{session_id}/insert", response_model=InsertResponse)
    def insert_session(session_id: str, req: InsertRequest):
        with state.lock:
            session = state.sessions.get(session_id)
            if session is None:
                raise HTTPException(status_code=404, detail="unknown session")
            if session.state != "open":
                raise HTTPException(status_code=409, detail=f"session is {session.state}")
            accepted = frozenset(
                s for s, decision in session.decisions.items() if decision == "accepted"
            )
            if not accepted and not req.empty_contribution:
                raise HTTPException(
                    status_code=400,
                    detail="no accepted statements; set empty_contribution to insert anyway",
                )
            provenance = f"session:{session_id}:curator:{session.curator}"
            triples = _statement_triples(session.assay_id, accepted)
            if req.paper and req.paper.external_id:
                triples.append(
                    (graph.paper_iri(req.paper.external_id), "describes assay", session.assay_id)
                )
            written = state.store.insert(triples, provenance) if triples else 0
            session.state = "inserted"
            return InsertResponse(
                session_id=session_id,
                assay_id=session.assay_id,
                triples_written=written,
                statements=[StatementModel.from_statement(s) for s in sorted(accepted)],
            )

    @app.post("/bulk", response_model=BulkResponse)
    def bulk(req: BulkRequest):
        if not req.entries:
            raise HTTPException(status_code=400, detail="entries must be non-empty")
        batch_id = uuid.uuid4().hex[:12]
        outcomes: list[BulkEntryOutcome] = []
        for i, entry in enumerate(req.entries):
            outcomes.append(_bulk_entry(state, batch_id, i, entry))
        return BulkResponse(batch_id=batch_id, outcomes=outcomes)

    @app.get("/export/ntriples")
    def export_ntriples():
        return Response(content=state.store.export_ntriples(), media_type="application/n-triples")

    @app.get("/compare")
    def compare(assays: str = Query(...), property: str | None = None):
        assay_ids = [a for a in assays.split(",") if a]
        if not assay_ids:
            raise HTTPException(status_code=400, detail="no assay ids given")
        try:
            return state.store.compare(
                assay_ids, properties=[property] if property else None
            )
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=f"unknown assay id {exc.args[0]!r}")

    @app.get("/health")
    def health():
        return {
            "model_loaded": state.semantifier is not None,
            "triples": len(state.store),
            "open_sessions": sum(1 for s in state.sessions.values() if s.state == "open"),
        }

    ui_dir = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if ui_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _bulk_entry(state: AppState, batch_id: str, index: int, entry) -> BulkEntryOutcome:
    if entry.paper is None or not entry.paper.title:
        return BulkEntryOutcome(index=index, status="failed", reason="MISSING_METADATA")
    if entry.statements is None and not (entry.text and entry.text.strip()):
        return BulkEntryOutcome(index=index, status="failed", reason="NO_TEXT_OR_STATEMENTS")
    assay_id = entry.assay_id or f"bulk-{batch_id}-{index}"

    semantified = False
    if entry.statements is not None:
        statements = frozenset(s.to_statement() for s in entry.statements)
    else:
        snapshot = state.semantifier
        if snapshot is None:
            return BulkEntryOutcome(index=index, status="failed", reason="NO_MODEL")
        statements = snapshot.semantify_text(entry.text, entry.threshold).statements
        semantified = True

    fingerprint = (entry.paper.external_id, assay_id, statements)
    with state.lock:
        if fingerprint in state.inserted_fingerprints:
            return BulkEntryOutcome(index=index, status="duplicate", assay_id=assay_id)
        state.inserted_fingerprints.add(fingerprint)

    triples = _statement_triples(assay_id, statements)
    if entry.paper.external_id:
        triples.append((graph.paper_iri(entry.paper.external_id), "describes assay", assay_id))
        meta = state.pubmed.fetch(entry.paper.external_id)
        if meta and meta.get("title"):
            triples.append((graph.paper_iri(entry.paper.external_id), "has title", meta["title"]))
    written = state.store.insert(triples, f"batch:{batch_id}") if triples else 0
    return BulkEntryOutcome(
        index=index,
        status="semantified-then-inserted" if semantified else "inserted",
        assay_id=assay_id,
        triples_written=written,
    )
