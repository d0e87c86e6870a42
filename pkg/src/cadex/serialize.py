"""JSON shapes shared by the HTTP service and the CLI's --json mode.

The CLI promises byte-identical output to the corresponding HTTP
responses, so both sides build content here and dump it with the same
settings the web framework uses.
"""

from __future__ import annotations

import json

from .promotion import CoachNote, Evaluation, RankingEntry
from .store import CadetRecord


def dumps_api(content) -> bytes:
    # same settings FastAPI's JSONResponse uses
    return json.dumps(
        content, ensure_ascii=False, allow_nan=False, indent=None, separators=(",", ":")
    ).encode("utf-8")


def cadet_json(record: CadetRecord) -> dict:
    return {
        "cadet_id": record.cadet_id,
        "name": record.name,
        "rank": record.rank.value,
        "enrollment_cycle": record.enrollment_cycle,
    }


def note_json(note: CoachNote) -> dict:
    return {
        "cadet_id": note.cadet_id,
        "cycle": note.cycle,
        "author": note.author,
        "text": note.text,
        "timestamp": note.timestamp,
    }


def evaluation_response(cadet_id: str, cycle: str, evaluation: Evaluation) -> dict:
    return {
        "cadet_id": cadet_id,
        "cycle": cycle,
        "composite": str(evaluation.composite),
        "stage": evaluation.stage.value,
        "eligible": [r.value for r in evaluation.eligible],
        "trace_id": evaluation.trace.trace_id,
    }


def whatif_response(cadet_id: str, cycle: str, evaluation: Evaluation, trace_json: dict) -> dict:
    return {
        "cadet_id": cadet_id,
        "cycle": cycle,
        "composite": str(evaluation.composite),
        "stage": evaluation.stage.value,
        "eligible": [r.value for r in evaluation.eligible],
        "trace": trace_json,
    }


def ranking_json(entries: list[RankingEntry]) -> list[dict]:
    return [
        {
            "cadet_id": e.cadet_id,
            "composite": str(e.composite),
            "stage": e.stage.value,
            "eligible": [r.value for r in e.eligible],
            "tie_break_used": e.tie_break_used,
            "manual_review": e.manual_review,
            "notes": [note_json(n) for n in e.notes],
        }
        for e in entries
    ]


def trace_view(trace_json: dict, view: str, rendered: str) -> dict:
    return {"trace": trace_json, "view": view, "rendered": rendered}
