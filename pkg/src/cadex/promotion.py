"""Domain layer: stage classification, rank eligibility, cadet ranking.

Stage boundaries are half-open ([60,80) is AVERAGE and so on) with HIGH
closed at 100, so every two-decimal score maps to exactly one stage.
Eligibility granted by the rules is gated to ranks strictly above the
cadet's current rank: the rule conclusions are ceilings, not targets.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum

from .assessment import ComponentId, MarkSheet, compute_composite
from .explanation import ExplanationTrace, build_trace
from .inference import WorkingMemory, forward_chain
from .rules import RuleSet


class Stage(Enum):
    HIGH = "HIGH"
    AVERAGE = "AVERAGE"
    LOW = "LOW"
    FAIL = "FAIL"

    @property
    def order(self) -> int:
        return ["FAIL", "LOW", "AVERAGE", "HIGH"].index(self.value)

    def __lt__(self, other: "Stage") -> bool:
        return self.order < other.order


class Rank(Enum):
    CADET_OFFICER = "CadetOfficer"
    LANCE_CORPORAL = "LanceCorporal"
    CORPORAL = "Corporal"
    SERGEANT = "Sergeant"
    JUO = "JUO"
    SUO = "SUO"

    @property
    def order(self) -> int:
        return list(Rank).index(self)

    def __lt__(self, other: "Rank") -> bool:
        return self.order < other.order


def classify_stage(score: Decimal) -> Stage:
    """Map a composite score to its performance stage."""
    if not Decimal(0) <= score <= Decimal(100):
        raise ValueError(f"score {score} out of range [0, 100]")
    if score >= 80:
        return Stage.HIGH
    if score >= 60:
        return Stage.AVERAGE
    if score >= 50:
        return Stage.LOW
    return Stage.FAIL


@dataclass(frozen=True)
class CoachNote:
    cadet_id: str
    cycle: str
    author: str
    text: str
    timestamp: str  # ISO-8601 UTC with milliseconds

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("coach note text must be non-empty")


@dataclass(frozen=True)
class RankingEntry:
    cadet_id: str
    composite: Decimal
    stage: Stage
    eligible: tuple[Rank, ...]  # gated; strictly above the cadet's current rank
    tie_break_used: bool = False
    manual_review: bool = False
    notes: tuple[CoachNote, ...] = ()


@dataclass(frozen=True)
class Evaluation:
    """Full outcome of scoring one mark sheet against the rule base."""

    composite: Decimal
    stage: Stage
    eligible: tuple[Rank, ...]
    trace: ExplanationTrace


def _granted_ranks(memory_eligible: dict[str, str]) -> list[Rank]:
    return sorted((Rank(name) for name in memory_eligible), key=lambda r: r.order)


def _gate(granted: list[Rank], current: Rank) -> tuple[Rank, ...]:
    return tuple(r for r in granted if r > current)


def eligible_ranks(stage: Stage, current: Rank, ruleset: RuleSet) -> set[Rank]:
    """Ranks the rules grant for a stage, restricted to promotions only."""
    memory, _ = forward_chain(ruleset, WorkingMemory.from_values({"stage": stage.value}))
    return set(_gate(_granted_ranks(memory.eligible), current))


def evaluate_sheet(
    sheet: MarkSheet,
    table: dict[ComponentId, int],
    ruleset: RuleSet,
    current: Rank,
    trace_id: str | None = None,
) -> Evaluation:
    """Score a sheet, run the engine, and package conclusions + trace.

    Pure: persistence, if any, is the caller's business.
    """
    composite = compute_composite(sheet, table)
    memory, firings = forward_chain(
        ruleset, WorkingMemory.from_values({"composite": composite})
    )
    stage_value = memory.value("stage")
    if stage_value is None:
        raise ValueError("rule set derived no stage for the composite score")
    stage = Stage(stage_value)
    eligible = _gate(_granted_ranks(memory.eligible), current)
    trace = build_trace(
        sheet,
        composite,
        firings,
        stage.value,
        tuple(r.value for r in eligible),
        ruleset,
        trace_id=trace_id,
        gate=lambda names: {
            r.value for r in _gate(sorted((Rank(n) for n in names), key=lambda r: r.order), current)
        },
    )
    return Evaluation(composite=composite, stage=stage, eligible=eligible, trace=trace)


def content_trace_id(sheet: MarkSheet, current: Rank, prefix: str = "t") -> str:
    """Deterministic trace id: a hash of the evaluation inputs.

    Evaluating the same marks twice yields the same id, which makes
    re-evaluation idempotent and what-if responses repeatable.
    """
    digest = hashlib.sha256(
        "|".join(
            [sheet.cadet_id, sheet.cycle, current.value]
            + [f"{c.value}={sheet.marks[c]}" for c in ComponentId]
        ).encode("utf-8")
    ).hexdigest()
    return f"{prefix}-{digest[:32]}"


def what_if(
    sheet: MarkSheet,
    changes: dict[ComponentId, Decimal],
    table: dict[ComponentId, int],
    ruleset: RuleSet,
    current: Rank,
) -> Evaluation:
    """Evaluate a hypothetical sheet; identical path, nothing persisted."""
    modified = sheet.with_marks(changes)
    trace_id = content_trace_id(modified, current, prefix="whatif")
    return evaluate_sheet(modified, table, ruleset, current, trace_id=trace_id)


def rank_cadets(
    entries: list[tuple[str, MarkSheet, Rank]],
    table: dict[ComponentId, int],
    ruleset: RuleSet,
    notes: dict[str, list[CoachNote]] | None = None,
) -> list[RankingEntry]:
    """Order cadets for the promotion board.

    Composite descending; exact ties broken by the coach-observation
    mark descending (flagged tie_break_used); ties still standing are
    kept in cadet_id order, flagged manual_review, and carry the coach
    notes so the officer can decide.
    """
    notes = notes or {}
    seen = set()
    for cadet_id, _, _ in entries:
        if cadet_id in seen:
            raise ValueError(f"duplicate cadet_id {cadet_id!r}")
        seen.add(cadet_id)

    scored = []
    for cadet_id, sheet, current in entries:
        evaluation = evaluate_sheet(sheet, table, ruleset, current)
        coach_mark = sheet.marks[ComponentId.COACH_OBSERVATION]
        scored.append((cadet_id, evaluation, coach_mark))
    scored.sort(key=lambda item: (-item[1].composite, -item[2], item[0]))

    by_composite: dict[Decimal, int] = {}
    by_pair: dict[tuple[Decimal, Decimal], int] = {}
    for cadet_id, evaluation, coach_mark in scored:
        by_composite[evaluation.composite] = by_composite.get(evaluation.composite, 0) + 1
        key = (evaluation.composite, coach_mark)
        by_pair[key] = by_pair.get(key, 0) + 1

    result = []
    for cadet_id, evaluation, coach_mark in scored:
        tied = by_composite[evaluation.composite] > 1
        unresolved = by_pair[(evaluation.composite, coach_mark)] > 1
        result.append(
            RankingEntry(
                cadet_id=cadet_id,
                composite=evaluation.composite,
                stage=evaluation.stage,
                eligible=evaluation.eligible,
                tie_break_used=tied,
                manual_review=unresolved,
                notes=tuple(notes.get(cadet_id, ())) if unresolved else (),
            )
        )
    return result
