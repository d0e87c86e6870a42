import random
from decimal import Decimal

import pytest

from cadex.assessment import ComponentId
from cadex.inference import WorkingMemory, forward_chain
from cadex.promotion import (
    CoachNote,
    Rank,
    Stage,
    classify_stage,
    eligible_ranks,
    evaluate_sheet,
    rank_cadets,
    what_if,
)
from conftest import uniform_sheet

ALL_RANKS = {Rank.CORPORAL, Rank.SERGEANT, Rank.JUO, Rank.SUO}


class TestClassifyStage:
    @pytest.mark.parametrize(
        "score, stage",
        [
            ("85.00", Stage.HIGH),
            ("80.00", Stage.HIGH),
            ("100.00", Stage.HIGH),
            ("60.00", Stage.AVERAGE),
            ("79.50", Stage.AVERAGE),
            ("50.00", Stage.LOW),
            ("59.50", Stage.LOW),
            ("49.99", Stage.FAIL),
            ("0.00", Stage.FAIL),
        ],
    )
    def test_boundaries(self, score, stage):
        assert classify_stage(Decimal(score)) == stage

    @pytest.mark.parametrize("score", ["-0.01", "100.01"])
    def test_out_of_range(self, score):
        with pytest.raises(ValueError):
            classify_stage(Decimal(score))

    def test_total_and_exclusive_full_scan(self):
        intervals = {
            Stage.HIGH: (Decimal("80"), Decimal("100.01")),
            Stage.AVERAGE: (Decimal("60"), Decimal("80")),
            Stage.LOW: (Decimal("50"), Decimal("60")),
            Stage.FAIL: (Decimal("0"), Decimal("50")),
        }
        for i in range(10_001):
            score = Decimal(i) / 100
            stage = classify_stage(score)
            matches = [s for s, (lo, hi) in intervals.items() if lo <= score < hi]
            assert matches == [stage]

    def test_stage_monotone(self):
        previous = Stage.FAIL
        for i in range(10_001):
            stage = classify_stage(Decimal(i) / 100)
            assert stage.order >= previous.order
            previous = stage

    def test_order(self):
        assert Stage.HIGH > Stage.AVERAGE > Stage.LOW > Stage.FAIL


class TestRankOrder:
    def test_ladder(self):
        assert (
            Rank.CADET_OFFICER
            < Rank.LANCE_CORPORAL
            < Rank.CORPORAL
            < Rank.SERGEANT
            < Rank.JUO
            < Rank.SUO
        )

    def test_extremes(self):
        assert max(Rank, key=lambda r: r.order) is Rank.SUO
        assert min(Rank, key=lambda r: r.order) is Rank.CADET_OFFICER


class TestEligibleRanks:
    def test_high_from_bottom(self, ruleset):
        assert eligible_ranks(Stage.HIGH, Rank.CADET_OFFICER, ruleset) == ALL_RANKS

    def test_average_from_bottom(self, ruleset):
        assert eligible_ranks(Stage.AVERAGE, Rank.CADET_OFFICER, ruleset) == {
            Rank.CORPORAL,
            Rank.SERGEANT,
        }

    @pytest.mark.parametrize("current", list(Rank))
    def test_fail_empty(self, ruleset, current):
        assert eligible_ranks(Stage.FAIL, current, ruleset) == set()

    def test_high_gated_by_sergeant(self, ruleset):
        assert eligible_ranks(Stage.HIGH, Rank.SERGEANT, ruleset) == {Rank.JUO, Rank.SUO}

    def test_low_grants_lance_corporal(self, ruleset):
        assert eligible_ranks(Stage.LOW, Rank.CADET_OFFICER, ruleset) == {Rank.LANCE_CORPORAL}

    def test_gating_soundness(self, ruleset):
        for stage in Stage:
            for current in Rank:
                for granted in eligible_ranks(stage, current, ruleset):
                    assert granted > current

    def test_ceiling_monotone_over_stages(self, ruleset):
        def ceiling(stage):
            granted = eligible_ranks(stage, Rank.CADET_OFFICER, ruleset)
            return max((r.order for r in granted), default=-1)

        assert ceiling(Stage.HIGH) > ceiling(Stage.AVERAGE) > ceiling(Stage.LOW) > ceiling(Stage.FAIL)


class TestEngineConsistency:
    def test_rules_agree_with_classify_stage_scan(self, ruleset):
        for i in range(0, 10_001, 13):  # coarse scan; the full one runs in acceptance
            score = (Decimal(i) / 100).quantize(Decimal("0.01"))
            memory, _ = forward_chain(ruleset, WorkingMemory.from_values({"composite": score}))
            assert memory.value("stage") == classify_stage(score).value


class TestRankCadets:
    def sheets(self, weights, specs):
        entries = []
        for cadet_id, mark, coach in specs:
            sheet = uniform_sheet(mark, cadet_id).with_marks(
                {ComponentId.COACH_OBSERVATION: Decimal(coach)}
            )
            entries.append((cadet_id, sheet, Rank.CADET_OFFICER))
        return entries

    def test_single_cadet(self, ruleset, weights):
        ranked = rank_cadets(self.sheets(weights, [("C1", "85.00", "85.00")]), weights, ruleset)
        assert len(ranked) == 1
        assert not ranked[0].tie_break_used and not ranked[0].manual_review

    def test_strict_order(self, ruleset, weights):
        ranked = rank_cadets(
            self.sheets(weights, [("C1", "70.00", "70.00"), ("C2", "90.00", "90.00")]),
            weights,
            ruleset,
        )
        assert [e.cadet_id for e in ranked] == ["C2", "C1"]

    def test_coach_tie_break(self, ruleset, weights):
        # equal composites built from different coach-observation marks:
        # bump another component to compensate (coach weight 3, marching 6)
        base = uniform_sheet("85.00", "A").with_marks(
            {ComponentId.COACH_OBSERVATION: Decimal("90.00"), ComponentId.MARCHING: Decimal("82.50")}
        )
        other = uniform_sheet("85.00", "B").with_marks(
            {ComponentId.COACH_OBSERVATION: Decimal("60.00"), ComponentId.MARCHING: Decimal("97.50")}
        )
        entries = [("A", base, Rank.CADET_OFFICER), ("B", other, Rank.CADET_OFFICER)]
        ranked = rank_cadets(entries, weights, ruleset)
        assert [e.cadet_id for e in ranked] == ["A", "B"]
        assert all(e.tie_break_used for e in ranked)
        assert not any(e.manual_review for e in ranked)

    def test_unresolved_tie_flags_manual_review_with_notes(self, ruleset, weights):
        entries = self.sheets(weights, [("A", "85.00", "85.00"), ("B", "85.00", "85.00")])
        notes = {
            "A": [CoachNote("A", "2026-1", "coach", "strong drill leadership", "2026-01-01T00:00:00.000Z")]
        }
        ranked = rank_cadets(entries, weights, ruleset, notes)
        assert [e.cadet_id for e in ranked] == ["A", "B"]
        assert all(e.manual_review and e.tie_break_used for e in ranked)
        assert ranked[0].notes[0].text == "strong drill leadership"

    def test_duplicate_cadet_rejected(self, ruleset, weights):
        entries = self.sheets(weights, [("A", "85.00", "85.00"), ("A", "70.00", "70.00")])
        with pytest.raises(ValueError, match="duplicate"):
            rank_cadets(entries, weights, ruleset)

    def test_permutation_invariance(self, ruleset, weights):
        specs = [(f"C{i}", f"{50 + i}.00", f"{60 + i}.00") for i in range(8)]
        specs += [("T1", "85.00", "85.00"), ("T2", "85.00", "85.00")]
        entries = self.sheets(weights, specs)
        baseline = rank_cadets(entries, weights, ruleset)
        rng = random.Random(4)
        for _ in range(10):
            shuffled = entries[:]
            rng.shuffle(shuffled)
            assert rank_cadets(shuffled, weights, ruleset) == baseline

    def test_gating_soundness_in_entries(self, ruleset, weights):
        entries = [
            ("A", uniform_sheet("85.00", "A"), Rank.SERGEANT),
            ("B", uniform_sheet("62.00", "B"), Rank.SERGEANT),
        ]
        for entry in rank_cadets(entries, weights, ruleset):
            current = Rank.SERGEANT
            assert all(r > current for r in entry.eligible)


class TestWhatIf:
    def test_all_hundred(self, ruleset, weights):
        evaluation = what_if(uniform_sheet("40.00"), {c: Decimal("100.00") for c in ComponentId}, weights, ruleset, Rank.CADET_OFFICER)
        assert evaluation.composite == Decimal("100.00")
        assert evaluation.stage == Stage.HIGH
        assert set(evaluation.eligible) == ALL_RANKS

    def test_empty_changes_identity(self, ruleset, weights):
        sheet = uniform_sheet("67.25")
        direct = evaluate_sheet(sheet, weights, ruleset, Rank.CADET_OFFICER)
        hypothetical = what_if(sheet, {}, weights, ruleset, Rank.CADET_OFFICER)
        assert hypothetical.composite == direct.composite
        assert hypothetical.stage == direct.stage
        assert hypothetical.eligible == direct.eligible

    def test_marching_bump_crosses_boundary(self, ruleset, weights):
        # uniform 79.00 except marching at 50.00 -> composite 77.26;
        # set it so base composite is 79.00 with marching 50:
        sheet = uniform_sheet("79.00")
        low_marching = sheet.with_marks({ComponentId.MARCHING: Decimal("50.00")})
        base = evaluate_sheet(
            low_marching.with_marks({ComponentId.LEADERSHIP: Decimal("91.43")}),
            weights, ruleset, Rank.CADET_OFFICER,
        )
        assert base.composite == Decimal("79.00")
        assert base.stage == Stage.AVERAGE
        bumped = what_if(
            low_marching.with_marks({ComponentId.LEADERSHIP: Decimal("91.43")}),
            {ComponentId.MARCHING: Decimal("100.00")},
            weights, ruleset, Rank.CADET_OFFICER,
        )
        # +50 marching * 6% = +3.00
        assert bumped.composite == Decimal("82.00")
        assert bumped.stage == Stage.HIGH

    def test_repeatable_trace_id(self, ruleset, weights):
        sheet = uniform_sheet("67.25")
        one = what_if(sheet, {}, weights, ruleset, Rank.CADET_OFFICER)
        two = what_if(sheet, {}, weights, ruleset, Rank.CADET_OFFICER)
        assert one.trace.trace_id == two.trace.trace_id
