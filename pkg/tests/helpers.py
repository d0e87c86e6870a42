"""Shared generators for randomized suites (chaining equivalence, parser round-trip)."""

from __future__ import annotations

import random
from decimal import Decimal

from cadex.rules import (
    And,
    Assign,
    Comparison,
    Eligible,
    Not,
    Or,
    RANK_NAMES,
    Rule,
    RuleSet,
)

RELOPS = (">=", "<=", ">", "<", "==", "!=")
SYMBOLS = ("alpha", "beta", "gamma", "delta")

IN_ATTRS = [f"in{i}" for i in range(3)]
OUT_ATTRS = [f"out{i}" for i in range(3)]


def gen_chain_ruleset(rng: random.Random, max_rules: int = 20) -> RuleSet:
    """Random acyclic ruleset over small numeric/symbol domains.

    Stratified by construction: conditions read `in*` attributes or
    already-derived `out*` attributes of lower index than the target,
    so the dependency graph can never cycle.
    """
    rules = []
    n_rules = rng.randint(1, max_rules)
    for i in range(n_rules):
        target_idx = rng.randrange(len(OUT_ATTRS))
        readable = IN_ATTRS + OUT_ATTRS[:target_idx]
        condition = _gen_condition(rng, readable, depth=rng.randint(1, 2))
        if rng.random() < 0.2:
            ranks = rng.sample(RANK_NAMES, rng.randint(1, 3))
            action = Eligible(tuple(ranks))
        else:
            # mostly one canonical value per attribute; occasional clashes
            # exercise the conflict path
            if rng.random() < 0.1:
                value = Decimal(rng.randrange(10))
            else:
                value = Decimal(100 + target_idx)
            action = Assign(OUT_ATTRS[target_idx], value)
        rules.append(Rule(f"r{i}", condition, (action,)))
    return RuleSet(tuple(rules))


def _gen_condition(rng: random.Random, attrs: list[str], depth: int):
    if depth <= 0 or rng.random() < 0.5:
        attr = rng.choice(attrs)
        op = rng.choice(RELOPS)
        if rng.random() < 0.15:
            return Comparison(attr, rng.choice(("==", "!=")), rng.choice(SYMBOLS))
        return Comparison(attr, op, Decimal(rng.randrange(10)))
    kind = rng.randrange(3)
    if kind == 0:
        return Not(_gen_condition(rng, attrs, depth - 1))
    parts = tuple(_gen_condition(rng, attrs, depth - 1) for _ in range(rng.randint(2, 3)))
    return And(parts) if kind == 1 else Or(parts)


def gen_chain_memory(rng: random.Random) -> dict:
    values = {}
    for attr in IN_ATTRS:
        if rng.random() < 0.8:
            if rng.random() < 0.2:
                values[attr] = rng.choice(SYMBOLS)
            else:
                values[attr] = Decimal(rng.randrange(10))
    return values


# --- parser round-trip generator -----------------------------------------

def gen_parse_ruleset(rng: random.Random, max_rules: int = 6) -> RuleSet:
    """Random RuleSet exercising the full grammar surface."""
    rules = []
    for i in range(rng.randint(0, max_rules)):
        condition = _gen_parse_expr(rng, depth=rng.randint(1, 5))
        actions = []
        for _ in range(rng.randint(1, 3)):
            if rng.random() < 0.3:
                ranks = rng.sample(RANK_NAMES, rng.randint(1, len(RANK_NAMES)))
                actions.append(Eligible(tuple(ranks)))
            else:
                actions.append(Assign(_gen_write_attr(rng), _gen_literal(rng)))
        rules.append(Rule(f"rule_{i}", condition, tuple(actions)))
    return RuleSet(tuple(rules))


def _gen_read_attr(rng):
    return rng.choice(["src_a", "src_b", "src_c", "x1", "y2"])


def _gen_write_attr(rng):
    return rng.choice(["dst_a", "dst_b", "dst_c"])


def _gen_literal(rng):
    roll = rng.random()
    if roll < 0.4:
        return rng.choice(SYMBOLS + ("HIGH", "FAIL", "v_2"))
    if roll < 0.7:
        return Decimal(rng.randrange(-50, 200))
    return Decimal(f"{rng.randrange(100)}.{rng.randrange(100):02d}")


def _gen_parse_expr(rng: random.Random, depth: int):
    if depth <= 0 or rng.random() < 0.4:
        return Comparison(_gen_read_attr(rng), rng.choice(RELOPS), _gen_literal(rng))
    kind = rng.randrange(3)
    if kind == 0:
        return Not(_gen_parse_expr(rng, depth - 1))
    parts = tuple(_gen_parse_expr(rng, depth - 1) for _ in range(rng.randint(2, 3)))
    return And(parts) if kind == 1 else Or(parts)
