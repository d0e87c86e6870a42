"""Explanation traces and their two rendered views.

A trace is the immutable record of one evaluation: the input marks, the
composite, every rule firing in sequence, and the conclusions. The
general view is a one-paragraph summary; the detailed view adds the
per-component contribution table and each firing with its matched
values substituted in.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass
from decimal import Decimal

from .assessment import ComponentId, MarkSheet, compute_composite, contributions
from .inference import FiredRule, WorkingMemory, forward_chain
from .rules import And, Comparison, Expr, Not, Or, RuleSet


class TraceError(ValueError):
    """Trace content inconsistent with its inputs or rule set."""


@dataclass(frozen=True)
class ExplanationTrace:
    trace_id: str
    cadet_id: str
    cycle: str
    marks: dict[ComponentId, Decimal]
    composite: Decimal
    firings: tuple[FiredRule, ...]
    stage: str | None  # None when the rule set derives no stage fact
    eligible: tuple[str, ...]  # rank names as granted by the rules, gated upstream


def build_trace(
    sheet: MarkSheet,
    composite: Decimal,
    firings: list[FiredRule],
    stage: str | None,
    eligible: tuple[str, ...],
    ruleset: RuleSet,
    trace_id: str | None = None,
    gate=None,
) -> ExplanationTrace:
    """Assemble a trace and verify the replay invariant.

    Re-runs the engine on the recorded input and rejects firings or
    conclusions that the rule set does not actually reproduce. `gate`
    optionally filters the replayed eligible set (rank gating happens
    upstream of the trace, so verification must apply the same filter).
    """
    memory, replayed = forward_chain(
        ruleset, WorkingMemory.from_values({"composite": composite})
    )
    if [f.rule_name for f in replayed] != [f.rule_name for f in firings] or [
        f.snapshot for f in replayed
    ] != [f.snapshot for f in firings]:
        raise TraceError("recorded firings do not replay from the input snapshot")
    replayed_stage = memory.value("stage")
    granted = set(gate(set(memory.eligible))) if gate else set(memory.eligible)
    if replayed_stage != stage or granted != set(eligible):
        raise TraceError("recorded conclusions do not replay from the input snapshot")
    return ExplanationTrace(
        trace_id=trace_id or uuid.uuid4().hex,
        cadet_id=sheet.cadet_id,
        cycle=sheet.cycle,
        marks=dict(sheet.marks),
        composite=composite,
        firings=tuple(firings),
        stage=stage,
        eligible=tuple(eligible),
    )


def trace_to_json(trace: ExplanationTrace) -> dict:
    """The stable serialization contract used by the service and UI."""
    return {
        "trace_id": trace.trace_id,
        "cadet_id": trace.cadet_id,
        "cycle": trace.cycle,
        "marks": {c.value: str(trace.marks[c]) for c in ComponentId},
        "composite": str(trace.composite),
        "firings": [
            {
                "seq": f.seq,
                "rule": f.rule_name,
                "snapshot": {attr: str(value) for attr, value in f.snapshot},
                "actions": list(f.actions),
            }
            for f in trace.firings
        ],
        "stage": trace.stage,
        "eligible": list(trace.eligible),
    }


def _substituted(expr: Expr, snapshot: dict[str, str]) -> str:
    if isinstance(expr, Comparison):
        shown = f"{expr.attr}({snapshot[expr.attr]})" if expr.attr in snapshot else expr.attr
        return f"{shown} {expr.op} {expr.value}"
    if isinstance(expr, Not):
        return f"NOT ({_substituted(expr.operand, snapshot)})"
    joiner = " AND " if isinstance(expr, And) else " OR "
    parts = (
        _substituted(p, snapshot) if isinstance(p, Comparison) else f"({_substituted(p, snapshot)})"
        for p in expr.parts
    )
    return joiner.join(parts)


def render_general(trace: ExplanationTrace) -> str:
    """One-paragraph summary: cadet, cycle, composite, stage, ranks."""
    if trace.eligible:
        tail = "Eligible for promotion to: " + ", ".join(trace.eligible) + "."
    else:
        tail = "The cadet is not eligible for promotion."
    return (
        f"Cadet {trace.cadet_id}, cycle {trace.cycle}: composite score "
        f"{trace.composite} places the cadet at stage {trace.stage}. {tail}\n"
    )


def render_detailed(trace: ExplanationTrace, weights: dict[ComponentId, int], ruleset: RuleSet) -> str:
    """Component contribution table plus each firing with matched values."""
    sheet = MarkSheet(trace.cadet_id, trace.cycle, trace.marks)
    lines = [f"Cadet {trace.cadet_id}, cycle {trace.cycle}", ""]
    lines.append(f"{'Component':<22}{'Mark':>8}{'Weight':>8}{'Contribution':>14}")
    for component, mark, weight, part in contributions(sheet, weights):
        lines.append(f"{component.value:<22}{str(mark):>8}{weight:>8}{str(part):>14}")
    lines.append(f"{'Composite':<22}{str(compute_composite(sheet, weights)):>8}")
    lines.append("")
    if not trace.firings:
        lines.append("No rules fired.")
    else:
        lines.append("Rules fired:")
        for firing in trace.firings:
            try:
                rule = ruleset.by_name(firing.rule_name)
            except KeyError:
                raise TraceError(f"trace references unknown rule {firing.rule_name!r}") from None
            snapshot = {attr: str(value) for attr, value in firing.snapshot}
            cond = _substituted(rule.condition, snapshot)
            lines.append(f"  {firing.seq}. {firing.rule_name}: {cond} => " + "; ".join(firing.actions))
    lines.append("")
    if trace.eligible:
        conclusion = f"Conclusion: stage {trace.stage}; eligible for: " + ", ".join(trace.eligible)
    else:
        conclusion = f"Conclusion: stage {trace.stage}; the cadet is not eligible for promotion"
    lines.append(conclusion + ".")
    return "\n".join(lines) + "\n"
