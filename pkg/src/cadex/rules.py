"""Rule language: lexer, recursive-descent parser, pretty printer, checks.

Grammar (EBNF):

    ruleset    = { rule } ;
    rule       = "RULE" , ident , "IF" , expr , "THEN" , action , { "," , action } ;
    expr       = term , { "OR" , term } ;
    term       = factor , { "AND" , factor } ;
    factor     = comparison | "(" , expr , ")" | "NOT" , factor ;
    comparison = ident , relop , literal ;
    relop      = ">=" | "<=" | ">" | "<" | "==" | "!=" ;
    action     = ident , "=" , literal | "ELIGIBLE" , "(" , rank , { "," , rank } , ")" ;
    literal    = number | symbol ;

Line comments start with `#`. Keywords are upper-case and case-sensitive.
Attributes match [a-z][a-z0-9_]*. Rule files use extension `.rules`.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from importlib import resources

KEYWORDS = frozenset({"RULE", "IF", "THEN", "AND", "OR", "NOT", "ELIGIBLE"})
RELOPS = (">=", "<=", "==", "!=", ">", "<")

RANK_NAMES = ("CadetOfficer", "LanceCorporal", "Corporal", "Sergeant", "JUO", "SUO")

# Pseudo-attribute written by ELIGIBLE actions (set-valued, union semantics).
ELIGIBLE_ATTR = "eligible"

DEFAULT_RULES_RESOURCE = "default.rules"


class ParseError(ValueError):
    """Positioned failure while reading a rule file (1-based line/column)."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class LexicalError(ParseError):
    pass


class SyntaxRuleError(ParseError):
    pass


class DuplicateRuleNameError(ParseError):
    pass


class UnknownRankError(ParseError):
    pass


class CyclicRulesError(ParseError):
    pass


# --- AST ------------------------------------------------------------------

Literal = Decimal | str  # numbers are Decimal, symbols are identifier strings


@dataclass(frozen=True)
class Comparison:
    attr: str
    op: str
    value: Literal


@dataclass(frozen=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True)
class And:
    parts: tuple["Expr", ...]


@dataclass(frozen=True)
class Or:
    parts: tuple["Expr", ...]


Expr = Comparison | Not | And | Or


@dataclass(frozen=True)
class Assign:
    attr: str
    value: Literal


@dataclass(frozen=True)
class Eligible:
    ranks: tuple[str, ...]


Action = Assign | Eligible


@dataclass(frozen=True)
class Rule:
    name: str
    condition: Expr
    actions: tuple[Action, ...]

    def reads(self) -> set[str]:
        return _expr_attrs(self.condition)

    def writes(self) -> set[str]:
        out = set()
        for action in self.actions:
            if isinstance(action, Assign):
                out.add(action.attr)
            else:
                out.add(ELIGIBLE_ATTR)
        return out


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    def by_name(self, name: str) -> Rule:
        for rule in self.rules:
            if rule.name == name:
                return rule
        raise KeyError(name)

    def attributes(self) -> set[str]:
        out = set()
        for rule in self.rules:
            out |= rule.reads() | rule.writes()
        return out


def _expr_attrs(expr: Expr) -> set[str]:
    if isinstance(expr, Comparison):
        return {expr.attr}
    if isinstance(expr, Not):
        return _expr_attrs(expr.operand)
    out = set()
    for part in expr.parts:
        out |= _expr_attrs(part)
    return out


# --- Lexer ----------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # NAME, NUMBER, OP, EOF
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        two = text[i : i + 2]
        if two in RELOPS[:4]:
            tokens.append(Token("OP", two, line, start_col))
            i += 2
            col += 2
            continue
        if ch in "><=(),":
            tokens.append(Token("OP", ch, line, start_col))
            i += 1
            col += 1
            continue
        if ch == "!":
            raise LexicalError(f"stray {ch!r} (did you mean '!='?)", line, start_col)
        if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            word = text[i:j]
            if word.endswith("."):
                raise LexicalError(f"malformed number {word!r}", line, start_col)
            tokens.append(Token("NUMBER", word, line, start_col))
            col += j - i
            i = j
            continue
        if ch.isascii() and (ch.isalpha() or ch == "_"):
            j = i + 1
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("NAME", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        raise LexicalError(f"unexpected character {ch!r}", line, start_col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


# --- Parser ---------------------------------------------------------------

_ATTR_OK = lambda s: s[0].islower() and all(c.islower() or c.isdigit() or c == "_" for c in s)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: str, tok: Token | None = None) -> None:
        tok = tok or self.peek()
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        raise SyntaxRuleError(f"expected {expected}, found {found}", tok.line, tok.col)

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "NUMBER":
            self.fail(repr(text))
        return self.next()

    def attribute(self) -> str:
        tok = self.peek()
        if tok.kind != "NAME" or tok.text in KEYWORDS or not _ATTR_OK(tok.text):
            self.fail("attribute name")
        return self.next().text

    def literal(self) -> Literal:
        tok = self.peek()
        if tok.kind == "NUMBER":
            return Decimal(self.next().text)
        if tok.kind == "NAME" and tok.text not in KEYWORDS:
            return self.next().text
        self.fail("literal (number or symbol)")

    def ruleset(self) -> RuleSet:
        rules = []
        names: dict[str, int] = {}
        while self.peek().kind != "EOF":
            tok = self.peek()
            if tok.text != "RULE":
                self.fail("'RULE'")
            self.next()
            name_tok = self.peek()
            if name_tok.kind != "NAME" or name_tok.text in KEYWORDS:
                self.fail("rule name")
            self.next()
            if name_tok.text in names:
                raise DuplicateRuleNameError(
                    f"duplicate rule name {name_tok.text!r} (first defined on line {names[name_tok.text]})",
                    name_tok.line,
                    name_tok.col,
                )
            names[name_tok.text] = name_tok.line
            self.expect("IF")
            condition = self.expr()
            self.expect("THEN")
            actions = [self.action()]
            while self.peek().text == "," and self.peek().kind == "OP":
                self.next()
                actions.append(self.action())
            rules.append(Rule(name_tok.text, condition, tuple(actions)))
        return RuleSet(tuple(rules))

    def expr(self) -> Expr:
        parts = [self.term()]
        while self.peek().text == "OR":
            self.next()
            parts.append(self.term())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def term(self) -> Expr:
        parts = [self.factor()]
        while self.peek().text == "AND":
            self.next()
            parts.append(self.factor())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def factor(self) -> Expr:
        tok = self.peek()
        if tok.text == "(" and tok.kind == "OP":
            self.next()
            inner = self.expr()
            self.expect(")")
            return inner
        if tok.text == "NOT":
            self.next()
            return Not(self.factor())
        attr = self.attribute()
        op_tok = self.peek()
        if op_tok.kind != "OP" or op_tok.text not in RELOPS:
            self.fail("comparison operator")
        self.next()
        return Comparison(attr, op_tok.text, self.literal())

    def action(self) -> Action:
        tok = self.peek()
        if tok.text == "ELIGIBLE":
            self.next()
            self.expect("(")
            ranks = [self.rank()]
            while self.peek().text == ",":
                self.next()
                ranks.append(self.rank())
            self.expect(")")
            seen = set()
            for rank in ranks:
                if rank in seen:
                    raise SyntaxRuleError(f"duplicate rank {rank!r} in ELIGIBLE", tok.line, tok.col)
                seen.add(rank)
            return Eligible(tuple(ranks))
        attr = self.attribute()
        self.expect("=")
        return Assign(attr, self.literal())

    def rank(self) -> str:
        tok = self.peek()
        if tok.kind != "NAME":
            self.fail("rank name")
        if tok.text not in RANK_NAMES:
            raise UnknownRankError(
                f"unknown rank {tok.text!r} (valid: {', '.join(RANK_NAMES)})",
                tok.line,
                tok.col,
            )
        return self.next().text


def _check_acyclic(ruleset: RuleSet) -> None:
    graph: dict[str, set[str]] = {}
    for rule in ruleset:
        for read in rule.reads():
            graph.setdefault(read, set()).update(rule.writes())
    # iterative DFS, colors: 0 unseen, 1 on stack, 2 done
    color: dict[str, int] = {}
    for root in graph:
        if color.get(root):
            continue
        stack = [(root, iter(graph.get(root, ())))]
        color[root] = 1
        path = [root]
        while stack:
            node, children = stack[-1]
            advanced = False
            for child in children:
                if color.get(child, 0) == 1:
                    cycle = " -> ".join(path[path.index(child):] + [child])
                    raise CyclicRulesError(f"cyclic attribute dependency: {cycle}", 1, 1)
                if color.get(child, 0) == 0:
                    color[child] = 1
                    path.append(child)
                    stack.append((child, iter(graph.get(child, ()))))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                path.pop()
                stack.pop()


def parse_rules(text: str) -> RuleSet:
    """Parse rule text into a validated RuleSet.

    Raises a ParseError subclass with 1-based line/column on any failure:
    lexical, syntactic, duplicate rule name, unknown rank, or a cyclic
    attribute dependency.
    """
    ruleset = _Parser(_tokenize(text)).ruleset()
    _check_acyclic(ruleset)
    return ruleset


# --- Pretty printer -------------------------------------------------------

def _fmt_literal(value: Literal) -> str:
    return str(value)


def _fmt_expr(expr: Expr) -> str:
    if isinstance(expr, Comparison):
        return f"{expr.attr} {expr.op} {_fmt_literal(expr.value)}"
    if isinstance(expr, Not):
        return f"NOT ({_fmt_expr(expr.operand)})"
    joiner = " AND " if isinstance(expr, And) else " OR "
    return joiner.join(f"({_fmt_expr(part)})" for part in expr.parts)


def _fmt_action(action: Action) -> str:
    if isinstance(action, Assign):
        return f"{action.attr} = {_fmt_literal(action.value)}"
    return "ELIGIBLE(" + ", ".join(action.ranks) + ")"


def pretty_print(ruleset: RuleSet) -> str:
    """Canonical text form; reparsing it yields a structurally equal RuleSet."""
    lines = []
    for rule in ruleset:
        cond = _fmt_expr(rule.condition)
        if isinstance(rule.condition, (And, Or, Not)):
            cond = f"({cond})"
        actions = ", ".join(_fmt_action(a) for a in rule.actions)
        lines.append(f"RULE {rule.name} IF {cond} THEN {actions}")
    return "\n".join(lines) + ("\n" if lines else "")


# --- Static validation ----------------------------------------------------

_Interval = tuple[Decimal | None, bool, Decimal | None, bool]  # lo, lo_closed, hi, hi_closed

_FULL: _Interval = (None, False, None, False)


def _narrow(iv: _Interval, op: str, value: Decimal) -> _Interval | None:
    lo, lc, hi, hc = iv
    if op in (">", ">="):
        closed = op == ">="
        if lo is None or value > lo or (value == lo and lc and not closed):
            lo, lc = value, closed
    elif op in ("<", "<="):
        closed = op == "<="
        if hi is None or value < hi or (value == hi and hc and not closed):
            hi, hc = value, closed
    elif op == "==":
        return _intersect(_narrow(iv, ">=", value), _narrow(iv, "<=", value))
    else:  # != carries no interval information
        return iv
    if lo is not None and hi is not None:
        if lo > hi or (lo == hi and not (lc and hc)):
            return None
    return (lo, lc, hi, hc)


def _intersect(a: _Interval | None, b: _Interval | None) -> _Interval | None:
    if a is None or b is None:
        return None
    out = a
    lo, lc, hi, hc = b
    if lo is not None:
        out = out and _narrow(out, ">=" if lc else ">", lo)
    if hi is not None:
        out = out and _narrow(out, "<=" if hc else "<", hi)
    return out


def _conjunction_profile(expr: Expr):
    """Flatten a pure conjunction of comparisons into per-attribute constraints.

    Returns (numeric_intervals, symbol_equalities) or None when the
    condition is not a plain conjunction (OR / NOT / mixed forms are
    skipped by the static checks rather than approximated).
    """
    leaves: list[Comparison] = []

    def collect(e: Expr) -> bool:
        if isinstance(e, Comparison):
            leaves.append(e)
            return True
        if isinstance(e, And):
            return all(collect(p) for p in e.parts)
        return False

    if not collect(expr):
        return None
    intervals: dict[str, _Interval | None] = {}
    symbols: dict[str, set[str]] = {}
    for leaf in leaves:
        if isinstance(leaf.value, Decimal):
            iv = intervals.get(leaf.attr, _FULL)
            intervals[leaf.attr] = None if iv is None else _narrow(iv, leaf.op, leaf.value)
        elif leaf.op == "==":
            symbols.setdefault(leaf.attr, set()).add(leaf.value)
    return intervals, symbols


def validate_ruleset(ruleset: RuleSet, vocabulary: set[str]) -> list[str]:
    """Static diagnostics: unknown attributes, unsatisfiable conditions,
    and pairs of rules assigning different values under overlapping
    numeric ranges. Returns an empty list when clean.
    """
    diagnostics = []
    for rule in ruleset:
        for attr in sorted(rule.reads() | rule.writes()):
            if attr not in vocabulary:
                diagnostics.append(f"rule {rule.name!r}: unknown attribute {attr!r}")
    profiles = {}
    for rule in ruleset:
        profile = _conjunction_profile(rule.condition)
        profiles[rule.name] = profile
        if profile is None:
            continue
        intervals, symbols = profile
        for attr, iv in intervals.items():
            if iv is None:
                diagnostics.append(f"rule {rule.name!r}: condition on {attr!r} is unsatisfiable")
        for attr, values in symbols.items():
            if len(values) > 1:
                diagnostics.append(f"rule {rule.name!r}: condition on {attr!r} is unsatisfiable")
    for i, first in enumerate(ruleset.rules):
        for second in ruleset.rules[i + 1 :]:
            clash = _assign_clash(first, second, profiles)
            if clash:
                diagnostics.append(clash)
    return diagnostics


def _assign_clash(first: Rule, second: Rule, profiles) -> str | None:
    targets = {
        a.attr: a.value for a in first.actions if isinstance(a, Assign)
    }.keys() & {a.attr: a.value for a in second.actions if isinstance(a, Assign)}.keys()
    conflicting = False
    for attr in targets:
        v1 = next(a.value for a in first.actions if isinstance(a, Assign) and a.attr == attr)
        v2 = next(a.value for a in second.actions if isinstance(a, Assign) and a.attr == attr)
        if v1 != v2:
            conflicting = True
    if not conflicting:
        return None
    p1, p2 = profiles.get(first.name), profiles.get(second.name)
    if p1 is None or p2 is None:
        return None
    iv1, sym1 = p1
    iv2, sym2 = p2
    if any(v is None for v in list(iv1.values()) + list(iv2.values())):
        return None
    for attr in iv1.keys() & iv2.keys():
        if _intersect(iv1[attr], iv2[attr]) is None:
            return None
    for attr in sym1.keys() & sym2.keys():
        if sym1[attr] != sym2[attr]:
            return None
    if not (iv1.keys() & iv2.keys() or sym1.keys() & sym2.keys()):
        return None
    return (
        f"rules {first.name!r} and {second.name!r} assign different values "
        "under overlapping conditions"
    )


# --- Default fixture ------------------------------------------------------

def default_rules_text() -> str:
    return (
        resources.files("cadex.fixtures").joinpath(DEFAULT_RULES_RESOURCE).read_text("utf-8")
    )


def default_ruleset() -> RuleSet:
    return parse_rules(default_rules_text())
