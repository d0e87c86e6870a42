"""Rule-based expert system for cadet performance staging and promotion."""

from .assessment import (
    ComponentId,
    DEFAULT_WEIGHTS,
    MarkError,
    MarkSheet,
    compute_composite,
    validate_weights,
)
from .explanation import ExplanationTrace, build_trace, render_detailed, render_general
from .inference import (
    AttrGoal,
    ConflictError,
    EligibleGoal,
    WorkingMemory,
    backward_chain,
    forward_chain,
)
from .promotion import (
    CoachNote,
    Rank,
    RankingEntry,
    Stage,
    classify_stage,
    eligible_ranks,
    evaluate_sheet,
    rank_cadets,
    what_if,
)
from .rules import ParseError, RuleSet, default_ruleset, parse_rules, pretty_print, validate_ruleset
from .store import Store, import_backup

__all__ = [
    "AttrGoal",
    "CoachNote",
    "ComponentId",
    "ConflictError",
    "DEFAULT_WEIGHTS",
    "EligibleGoal",
    "ExplanationTrace",
    "MarkError",
    "MarkSheet",
    "ParseError",
    "Rank",
    "RankingEntry",
    "RuleSet",
    "Stage",
    "Store",
    "WorkingMemory",
    "backward_chain",
    "build_trace",
    "classify_stage",
    "compute_composite",
    "default_ruleset",
    "eligible_ranks",
    "evaluate_sheet",
    "forward_chain",
    "import_backup",
    "parse_rules",
    "pretty_print",
    "rank_cadets",
    "render_detailed",
    "render_general",
    "validate_ruleset",
    "validate_weights",
    "what_if",
]
