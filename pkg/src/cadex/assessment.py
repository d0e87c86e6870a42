"""Standard-testing weight table and weighted composite scoring.

All arithmetic is exact fixed-point: marks and composites are Decimals
with at most two fraction digits, weights are integer percentage points
summing to 100. No floats cross any boundary of this module.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from enum import Enum

CENT = Decimal("0.01")
HUNDRED = Decimal("100.00")
ZERO = Decimal("0.00")


class ComponentId(str, Enum):
    """The twelve standard-testing components. Closed set."""

    LEADERSHIP = "leadership"
    THEORY_PAPER1 = "theory_paper1"
    THEORY_PAPER2 = "theory_paper2"
    MILITARY_PRACTICAL = "military_practical"
    MILITARY_IMP = "military_imp"
    MARCHING = "marching"
    WEAPONS = "weapons"
    SHOOTING_SKILL = "shooting_skill"
    WAR_FIELD = "war_field"
    SPORTS = "sports"
    ATTENDANCE = "attendance"
    COACH_OBSERVATION = "coach_observation"


# Default weights of the standard-testing battery (percentage points).
DEFAULT_WEIGHTS: dict[ComponentId, int] = {
    ComponentId.LEADERSHIP: 14,
    ComponentId.THEORY_PAPER1: 12,
    ComponentId.THEORY_PAPER2: 12,
    ComponentId.MILITARY_PRACTICAL: 12,
    ComponentId.MILITARY_IMP: 12,
    ComponentId.MARCHING: 6,
    ComponentId.WEAPONS: 6,
    ComponentId.SHOOTING_SKILL: 4,
    ComponentId.WAR_FIELD: 10,
    ComponentId.SPORTS: 3,
    ComponentId.ATTENDANCE: 6,
    ComponentId.COACH_OBSERVATION: 3,
}

CSV_HEADER = ["cadet_id", "cycle"] + [c.value for c in ComponentId]


class MarkError(ValueError):
    """A mark sheet is structurally invalid; names the offending component."""


def parse_mark(text: str | Decimal | int) -> Decimal:
    """Parse a mark into a two-decimal fixed-point value in [0, 100].

    Accepts decimal strings with at most two fraction digits. Raises
    MarkError otherwise.
    """
    if isinstance(text, Decimal):
        value = text
    else:
        try:
            value = Decimal(str(text))
        except InvalidOperation:
            raise MarkError(f"not a decimal mark: {text!r}") from None
    if value != value.quantize(CENT):
        raise MarkError(f"mark {value} has more than 2 decimal places")
    value = value.quantize(CENT)
    if not (ZERO <= value <= HUNDRED):
        raise MarkError(f"mark {value} out of range [0, 100]")
    return value


def validate_weights(table: dict[ComponentId, int]) -> list[str]:
    """Check the weight-table invariants.

    Returns an empty list when the table is valid, otherwise one message
    per violation (missing/extra component, non-integer or out-of-range
    weight, sum != 100).
    """
    violations = []
    for component in ComponentId:
        if component not in table:
            violations.append(f"missing weight for {component.value}")
    for key, weight in table.items():
        if not isinstance(key, ComponentId):
            violations.append(f"unknown component {key!r}")
            continue
        if not isinstance(weight, int) or isinstance(weight, bool):
            violations.append(f"weight for {key.value} is not an integer")
        elif not 0 <= weight <= 100:
            violations.append(f"weight for {key.value} = {weight} out of range [0, 100]")
    if not violations:
        total = sum(table.values())
        if total != 100:
            violations.append(f"sum = {total} != 100")
    return violations


@dataclass(frozen=True)
class MarkSheet:
    """Raw component marks for one cadet in one assessment cycle."""

    cadet_id: str
    cycle: str
    marks: dict[ComponentId, Decimal]

    def validate(self) -> None:
        for component in ComponentId:
            if component not in self.marks:
                raise MarkError(f"missing mark for {self.cadet_id}: {component.value}")
        for key, mark in self.marks.items():
            if not isinstance(key, ComponentId):
                raise MarkError(f"unknown component {key!r}")
            if not (ZERO <= mark <= HUNDRED):
                raise MarkError(f"mark for {key.value} = {mark} out of range [0, 100]")

    def with_marks(self, changes: dict[ComponentId, Decimal]) -> "MarkSheet":
        merged = dict(self.marks)
        merged.update(changes)
        return MarkSheet(self.cadet_id, self.cycle, merged)


def compute_composite(sheet: MarkSheet, table: dict[ComponentId, int]) -> Decimal:
    """Weighted composite score: sum of mark * weight / 100, exact.

    The exact sum has up to four fraction digits (two from the mark, two
    from the division); the published composite is quantized to two with
    half-up rounding.
    """
    sheet.validate()
    violations = validate_weights(table)
    if violations:
        raise MarkError("invalid weight table: " + "; ".join(violations))
    total = sum(
        (sheet.marks[c] * table[c] for c in ComponentId), start=Decimal(0)
    ) / Decimal(100)
    return total.quantize(CENT, rounding="ROUND_HALF_UP")


def contributions(sheet: MarkSheet, table: dict[ComponentId, int]) -> list[tuple[ComponentId, Decimal, int, Decimal]]:
    """Per-component (component, mark, weight, weighted contribution) rows.

    Contributions carry four fraction digits so the rows sum to the exact
    pre-rounding composite.
    """
    rows = []
    for component in ComponentId:
        part = (sheet.marks[component] * table[component] / Decimal(100)).quantize(
            Decimal("0.0001")
        )
        rows.append((component, sheet.marks[component], table[component], part))
    return rows


def parse_marks_csv(text: str) -> list[MarkSheet]:
    """Read the mark-sheet CSV interchange format.

    Header must match CSV_HEADER exactly; each row yields one MarkSheet.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MarkError("empty CSV: missing header row") from None
    if header != CSV_HEADER:
        raise MarkError(f"bad CSV header: expected {','.join(CSV_HEADER)}")
    sheets = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise MarkError(f"line {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        cadet_id, cycle = row[0], row[1]
        marks = {}
        for component, cell in zip(ComponentId, row[2:]):
            try:
                marks[component] = parse_mark(cell)
            except MarkError as exc:
                raise MarkError(f"line {lineno}, {component.value}: {exc}") from None
        sheets.append(MarkSheet(cadet_id=cadet_id, cycle=cycle, marks=marks))
    return sheets


def marks_csv(sheets: list[MarkSheet]) -> str:
    """Serialize mark sheets back to the CSV interchange format."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for sheet in sheets:
        writer.writerow(
            [sheet.cadet_id, sheet.cycle] + [str(sheet.marks[c]) for c in ComponentId]
        )
    return out.getvalue()
