"""HTTP API for the officer console and scripted clients.

All fixed-point numbers cross the wire as decimal strings ("85.00") so
clients never touch floats. Mutations serialize through one lock on top
of the store's single-writer discipline; evaluations themselves are
pure and safe to run concurrently.
"""

from __future__ import annotations

import os
import threading
from contextlib import asynccontextmanager
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import serialize
from .assessment import ComponentId, DEFAULT_WEIGHTS, MarkError, MarkSheet, parse_mark
from .explanation import render_detailed, render_general, trace_to_json, ExplanationTrace
from .inference import FiredRule
from .promotion import (
    CoachNote,
    Rank,
    content_trace_id,
    evaluate_sheet,
    rank_cadets,
    what_if,
)
from .rules import ParseError, RuleSet, default_rules_text, parse_rules
from .store import (
    CadetRecord,
    DuplicateError,
    NotFoundError,
    Store,
    StoreError,
    StoreLockedError,
    now_iso,
)


@dataclass
class ServiceConfig:
    store_path: Path
    rules_path: Path | None = None  # None means the bundled default rules
    listen: str = "127.0.0.1:8000"


class RequestError(ValueError):
    """400-level request problem naming the offending field."""


def load_config(path: str | Path) -> ServiceConfig:
    """Read the `key = value` service config file.

    Keys: `store` (required), `rules`, `listen`. CADEX_STORE and
    CADEX_LISTEN environment variables override the file.
    """
    values = {}
    for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    store = os.environ.get("CADEX_STORE") or values.get("store")
    if not store:
        raise ValueError(f"{path}: missing required key 'store'")
    listen = os.environ.get("CADEX_LISTEN") or values.get("listen", "127.0.0.1:8000")
    rules = values.get("rules")
    return ServiceConfig(
        store_path=Path(store),
        rules_path=Path(rules) if rules else None,
        listen=listen,
    )


def _field(body: dict, name: str, kind=str):
    if name not in body:
        raise RequestError(f"missing field {name!r}")
    value = body[name]
    if not isinstance(value, kind):
        raise RequestError(f"field {name!r} must be {kind.__name__}")
    return value


def _parse_rank(text: str, field_name: str = "rank") -> Rank:
    try:
        return Rank(text)
    except ValueError:
        raise RequestError(
            f"field {field_name!r}: unknown rank {text!r} "
            f"(valid: {', '.join(r.value for r in Rank)})"
        ) from None


def _parse_marks(raw: dict) -> dict[ComponentId, "object"]:
    marks = {}
    for key, value in raw.items():
        try:
            component = ComponentId(key)
        except ValueError:
            raise RequestError(f"field 'marks': unknown component {key!r}") from None
        try:
            marks[component] = parse_mark(value)
        except MarkError as exc:
            raise RequestError(f"field 'marks.{key}': {exc}") from None
    return marks


def trace_from_json(doc: dict) -> ExplanationTrace:
    """Rebuild an in-memory trace from its stored JSON document."""
    from decimal import Decimal

    firings = tuple(
        FiredRule(
            rule_name=f["rule"],
            snapshot=tuple(sorted(f["snapshot"].items())),
            actions=tuple(f["actions"]),
            seq=f["seq"],
        )
        for f in doc["firings"]
    )
    return ExplanationTrace(
        trace_id=doc["trace_id"],
        cadet_id=doc["cadet_id"],
        cycle=doc["cycle"],
        marks={ComponentId(k): parse_mark(v) for k, v in doc["marks"].items()},
        composite=Decimal(doc["composite"]),
        firings=firings,
        stage=doc["stage"],
        eligible=tuple(doc["eligible"]),
    )


def create_app(
    store_path: str | Path,
    rules_text: str | None = None,
    weights: dict[ComponentId, int] | None = None,
) -> FastAPI:
    """Build the application: parse rules, open the store, wire routes.

    Raises ParseError / StoreLockedError instead of starting unhealthy.
    """
    ruleset: RuleSet = parse_rules(rules_text if rules_text is not None else default_rules_text())
    weights = weights or dict(DEFAULT_WEIGHTS)
    store = Store.open(store_path)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        store.close()

    app = FastAPI(title="cadex", docs_url=None, redoc_url=None, lifespan=lifespan)
    app.state.store = store
    app.state.ruleset = ruleset
    app.state.weights = weights
    app.state.write_lock = threading.Lock()

    for exc_type, status in (
        (RequestError, 400),
        (MarkError, 400),
        (ParseError, 400),
        (NotFoundError, 404),
        (DuplicateError, 409),
        (StoreLockedError, 423),
        (StoreError, 400),
        (ValueError, 400),
    ):
        def handler(request: Request, exc: Exception, status=status):
            return JSONResponse(status_code=status, content={"detail": str(exc)})

        app.add_exception_handler(exc_type, handler)

    @app.get("/ready")
    def ready():
        return {"status": "ok", "rules": len(ruleset), "seq": store.seq}

    @app.post("/cadets", status_code=201)
    async def create_cadet(request: Request):
        body = await request.json()
        record = CadetRecord(
            cadet_id=_field(body, "cadet_id"),
            name=_field(body, "name"),
            rank=_parse_rank(_field(body, "rank")),
            enrollment_cycle=_field(body, "enrollment_cycle"),
        )
        with app.state.write_lock:
            store.put_cadet(record)
        return serialize.cadet_json(record)

    @app.get("/cadets")
    def list_cadets():
        return [serialize.cadet_json(r) for r in store.list_cadets()]

    @app.get("/cadets/{cadet_id}")
    def get_cadet(cadet_id: str):
        return serialize.cadet_json(store.get_cadet(cadet_id))

    @app.put("/cadets/{cadet_id}/marks")
    async def put_marks(cadet_id: str, request: Request):
        body = await request.json()
        cycle = _field(body, "cycle")
        marks = _parse_marks(_field(body, "marks", dict))
        sheet = MarkSheet(cadet_id=cadet_id, cycle=cycle, marks=marks)
        sheet.validate()
        with app.state.write_lock:
            assessment_id = store.submit_marks(
                cadet_id, sheet, resubmit=bool(body.get("resubmit", False))
            )
        return {"assessment_id": assessment_id}

    @app.post("/cadets/{cadet_id}/evaluate")
    async def evaluate(cadet_id: str, request: Request):
        body = await request.json()
        cycle = _field(body, "cycle")
        record = store.get_cadet(cadet_id)
        sheet = store.latest_sheet(cadet_id, cycle)
        evaluation = evaluate_sheet(
            sheet, weights, ruleset, record.rank, trace_id=content_trace_id(sheet, record.rank)
        )
        with app.state.write_lock:
            store.record_trace(trace_to_json(evaluation.trace))
        return serialize.evaluation_response(cadet_id, cycle, evaluation)

    @app.get("/traces/{trace_id}")
    def get_trace(trace_id: str, view: str = "general"):
        doc = store.get_trace(trace_id)
        trace = trace_from_json(doc)
        if view == "general":
            rendered = render_general(trace)
        elif view == "detailed":
            rendered = render_detailed(trace, weights, ruleset)
        else:
            raise RequestError(f"field 'view': expected 'general' or 'detailed', got {view!r}")
        return serialize.trace_view(doc, view, rendered)

    @app.get("/rankings")
    def rankings(cycle: str):
        entries = []
        for sheet in store.sheets_for_cycle(cycle):
            record = store.get_cadet(sheet.cadet_id)
            entries.append((sheet.cadet_id, sheet, record.rank))
        notes = {cid: store.list_notes(cid) for cid, _, _ in entries}
        ranked = rank_cadets(entries, weights, ruleset, notes)
        return serialize.ranking_json(ranked)

    @app.post("/whatif")
    async def whatif(request: Request):
        body = await request.json()
        cadet_id = _field(body, "cadet_id")
        cycle = _field(body, "cycle")
        record = store.get_cadet(cadet_id)
        sheet = store.latest_sheet(cadet_id, cycle)
        changes = _parse_marks(body.get("set", {}))
        evaluation = what_if(sheet, changes, weights, ruleset, record.rank)
        return serialize.whatif_response(
            cadet_id, cycle, evaluation, trace_to_json(evaluation.trace)
        )

    @app.post("/cadets/{cadet_id}/notes", status_code=201)
    async def add_note(cadet_id: str, request: Request):
        body = await request.json()
        note = CoachNote(
            cadet_id=cadet_id,
            cycle=_field(body, "cycle"),
            author=_field(body, "author"),
            text=_field(body, "text"),
            timestamp=body.get("timestamp") or now_iso(),
        )
        with app.state.write_lock:
            store.add_note(note)
        return serialize.note_json(note)

    @app.get("/export")
    def export(request: Request):
        import tempfile

        with tempfile.TemporaryDirectory() as tmp:
            with app.state.write_lock:
                archive = store.export_backup(tmp)
            data = archive.read_bytes()
            name = archive.name
        return Response(
            content=data,
            media_type="application/x-tar",
            headers={"Content-Disposition": f'attachment; filename="{name}"'},
        )

    return app


def serve(config: ServiceConfig) -> None:
    """Run the service with uvicorn (blocking)."""
    import uvicorn

    rules_text = (
        Path(config.rules_path).read_text("utf-8") if config.rules_path else None
    )
    app = create_app(config.store_path, rules_text)
    host, _, port = config.listen.partition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000))
