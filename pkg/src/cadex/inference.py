"""Forward and backward chaining over a RuleSet.

Facts are single-assignment: once an attribute has a value it never
changes, and a second rule assigning a different value is a hard
ConflictError rather than an overwrite. The one exception is the
set-valued `eligible` pseudo-attribute, which ELIGIBLE actions grow with
union semantics.

Comparisons are three-valued during matching: a condition reading an
attribute with no value yet is neither true nor false, and the rule
simply does not fire. This keeps forward and backward chaining
equivalent on stratified rule bases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal

from .rules import (
    And,
    Assign,
    Comparison,
    Eligible,
    Expr,
    Literal,
    Not,
    Or,
    Rule,
    RuleSet,
)

ASSERTED = "asserted"


class ConflictError(Exception):
    """Two rules assign different values to the same attribute."""

    def __init__(self, attribute: str, first_rule: str, second_rule: str):
        super().__init__(
            f"conflicting assignments to {attribute!r}: "
            f"rule {first_rule!r} vs rule {second_rule!r}"
        )
        self.attribute = attribute
        self.first_rule = first_rule
        self.second_rule = second_rule


@dataclass(frozen=True)
class Fact:
    attribute: str
    value: Literal
    origin: str  # ASSERTED or the deriving rule's name


@dataclass
class WorkingMemory:
    """Attribute -> fact store for one evaluation. Not thread-shared."""

    facts: dict[str, Fact] = field(default_factory=dict)
    eligible: dict[str, str] = field(default_factory=dict)  # rank -> origin

    @classmethod
    def from_values(cls, values: dict[str, Literal]) -> "WorkingMemory":
        return cls({k: Fact(k, v, ASSERTED) for k, v in values.items()})

    def value(self, attribute: str) -> Literal | None:
        fact = self.facts.get(attribute)
        return fact.value if fact else None

    def assert_derived(self, attribute: str, value: Literal, rule_name: str) -> bool:
        """Record a derived fact; returns True when memory changed."""
        existing = self.facts.get(attribute)
        if existing is None:
            self.facts[attribute] = Fact(attribute, value, rule_name)
            return True
        if existing.value != value:
            raise ConflictError(attribute, existing.origin, rule_name)
        return False

    def add_eligible(self, ranks: tuple[str, ...], rule_name: str) -> bool:
        changed = False
        for rank in ranks:
            if rank not in self.eligible:
                self.eligible[rank] = rule_name
                changed = True
        return changed

    def copy(self) -> "WorkingMemory":
        return WorkingMemory(dict(self.facts), dict(self.eligible))


@dataclass(frozen=True)
class FiredRule:
    rule_name: str
    snapshot: tuple[tuple[str, Literal], ...]  # attribute values read, sorted
    actions: tuple[str, ...]  # human-readable applied actions
    seq: int


def _compare(value: Literal, op: str, literal: Literal) -> bool | None:
    numeric = isinstance(value, (Decimal, int)) and isinstance(literal, (Decimal, int))
    if op == "==":
        return value == literal if (numeric or type(value) is type(literal)) else False
    if op == "!=":
        return value != literal if (numeric or type(value) is type(literal)) else True
    if not numeric:
        return None  # no ordering on symbols
    if op == ">=":
        return value >= literal
    if op == "<=":
        return value <= literal
    if op == ">":
        return value > literal
    return value < literal


def eval_expr(expr: Expr, lookup) -> bool | None:
    """Three-valued evaluation; lookup(attr) returns a value or None."""
    if isinstance(expr, Comparison):
        value = lookup(expr.attr)
        if value is None:
            return None
        return _compare(value, expr.op, expr.value)
    if isinstance(expr, Not):
        inner = eval_expr(expr.operand, lookup)
        return None if inner is None else not inner
    if isinstance(expr, And):
        result: bool | None = True
        for part in expr.parts:
            sub = eval_expr(part, lookup)
            if sub is False:
                return False
            if sub is None:
                result = None
        return result
    result = False
    for part in expr.parts:
        sub = eval_expr(part, lookup)
        if sub is True:
            return True
        if sub is None:
            result = None
    return result


def _describe_action(action) -> str:
    if isinstance(action, Assign):
        return f"{action.attr} = {action.value}"
    return "ELIGIBLE(" + ", ".join(action.ranks) + ")"


def forward_chain(
    ruleset: RuleSet, memory: WorkingMemory
) -> tuple[WorkingMemory, list[FiredRule]]:
    """Run data-driven firing to fixpoint.

    Rules are scanned in declaration order; each rule fires at most once
    (refraction; sufficient because facts are single-assignment, so a
    rule's matched snapshot can never change after it becomes true).
    The input memory is not mutated.
    """
    memory = memory.copy()
    firings: list[FiredRule] = []
    fired: set[str] = set()
    changed = True
    while changed:
        changed = False
        for rule in ruleset:
            if rule.name in fired:
                continue
            if eval_expr(rule.condition, memory.value) is not True:
                continue
            snapshot = tuple(
                sorted((attr, memory.value(attr)) for attr in rule.reads())
            )
            for action in rule.actions:
                if isinstance(action, Assign):
                    memory.assert_derived(action.attr, action.value, rule.name)
                else:
                    memory.add_eligible(action.ranks, rule.name)
            fired.add(rule.name)
            firings.append(
                FiredRule(
                    rule_name=rule.name,
                    snapshot=snapshot,
                    actions=tuple(_describe_action(a) for a in rule.actions),
                    seq=len(firings) + 1,
                )
            )
            changed = True
    return memory, firings


# --- Backward chaining ----------------------------------------------------

@dataclass(frozen=True)
class AttrGoal:
    attribute: str
    value: Literal

    def __str__(self):
        return f"{self.attribute} == {self.value}"


@dataclass(frozen=True)
class EligibleGoal:
    rank: str

    def __str__(self):
        return f"eligible contains {self.rank}"


Goal = AttrGoal | EligibleGoal


@dataclass(frozen=True)
class ProofNode:
    statement: str
    via: str  # ASSERTED or a rule name
    children: tuple["ProofNode", ...] = ()

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)


@dataclass(frozen=True)
class ProofResult:
    proven: bool
    tree: ProofNode | None
    failed_subgoals: tuple[str, ...] = ()


class _BackwardSearch:
    """Goal-driven resolution with memoized attribute values.

    Depth-first over rules in declaration order; memoization makes the
    search linear on stratified rule bases and doubles as a cycle guard.
    """

    def __init__(self, ruleset: RuleSet, memory: WorkingMemory):
        self.ruleset = ruleset
        self.memory = memory
        self.memo: dict[str, tuple[Literal, ProofNode] | None] = {}
        self.in_progress: set[str] = set()

    def resolve(self, attribute: str) -> tuple[Literal, ProofNode] | None:
        if attribute in self.memo:
            return self.memo[attribute]
        if attribute in self.in_progress:
            return None  # recursive rule base; treat as underivable
        asserted = self.memory.facts.get(attribute)
        if asserted is not None:
            result = (asserted.value, ProofNode(f"{attribute} == {asserted.value}", ASSERTED))
            self.memo[attribute] = result
            return result
        self.in_progress.add(attribute)
        try:
            found: tuple[Literal, ProofNode] | None = None
            found_rule = ""
            for rule in self.ruleset:
                assign = next(
                    (a for a in rule.actions if isinstance(a, Assign) and a.attr == attribute),
                    None,
                )
                if assign is None:
                    continue
                support = self.prove_condition(rule)
                if support is None:
                    continue
                if found is not None:
                    if assign.value != found[0]:
                        raise ConflictError(attribute, found_rule, rule.name)
                    continue
                node = ProofNode(f"{attribute} == {assign.value}", rule.name, support)
                found = (assign.value, node)
                found_rule = rule.name
            self.memo[attribute] = found
            return found
        finally:
            self.in_progress.discard(attribute)

    def prove_condition(self, rule: Rule) -> tuple[ProofNode, ...] | None:
        support: dict[str, ProofNode] = {}

        def lookup(attr: str):
            resolved = self.resolve(attr)
            if resolved is None:
                return None
            support[attr] = resolved[1]
            return resolved[0]

        if eval_expr(rule.condition, lookup) is not True:
            return None
        return tuple(support[a] for a in sorted(support))

    def prove_eligible(self, rank: str) -> ProofResult:
        if rank in self.memory.eligible:
            return ProofResult(True, ProofNode(f"eligible contains {rank}", ASSERTED))
        for rule in self.ruleset:
            grant = next(
                (a for a in rule.actions if isinstance(a, Eligible) and rank in a.ranks),
                None,
            )
            if grant is None:
                continue
            support = self.prove_condition(rule)
            if support is not None:
                return ProofResult(
                    True, ProofNode(f"eligible contains {rank}", rule.name, support)
                )
        return ProofResult(False, None, (f"eligible contains {rank}",))


def backward_chain(ruleset: RuleSet, memory: WorkingMemory, goal: Goal) -> ProofResult:
    """Prove a goal by goal-driven search.

    A goal is proven exactly when forward_chain from the same memory
    would derive the corresponding fact.
    """
    search = _BackwardSearch(ruleset, memory)
    if isinstance(goal, EligibleGoal):
        return search.prove_eligible(goal.rank)
    resolved = search.resolve(goal.attribute)
    if resolved is None:
        return ProofResult(False, None, (str(goal),))
    value, node = resolved
    if value != goal.value:
        return ProofResult(False, None, (f"{goal} (actual value {value})",))
    return ProofResult(True, node)
