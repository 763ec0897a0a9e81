"""Labeled-BNF grammars, derivation trees, and structural analyses.

A grammar is an ordered sequence of uniquely labeled rewrite rules over
disjoint terminal/nonterminal vocabularies. Rule order is part of the
grammar value: positional heuristics index rules by declaration order,
so the same rules in a different order are a different grammar.

Text format, one rule per line::

    label. <Lhs> ::= item <Dep> other

Angle-bracketed tokens are nonterminals and must each appear as the
left-hand side of some rule; every other token is a terminal. Blank
lines and ``#`` comments are skipped. The first rule's left-hand side
is the start symbol.

Depth is counted in nodes: a single-node tree has height 1.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass
from random import Random
from typing import Iterable, Mapping


class GrammarError(ValueError):
    """Malformed grammar text or structurally inconsistent grammar."""


class EnumerationLimitError(GrammarError):
    """Tree enumeration exceeded its result-count guard."""


_NAME_RE = re.compile(r"^[^\s<>]+$")

TERMINAL = "terminal"
NONTERMINAL = "nonterminal"


@dataclass(frozen=True)
class GrammarSymbol:
    kind: str
    name: str

    def __post_init__(self) -> None:
        if self.kind not in (TERMINAL, NONTERMINAL):
            raise GrammarError(f"unknown symbol kind {self.kind!r}")
        if not _NAME_RE.match(self.name or ""):
            raise GrammarError(f"bad symbol name {self.name!r}")

    @property
    def is_nonterminal(self) -> bool:
        return self.kind == NONTERMINAL


def terminal(name: str) -> GrammarSymbol:
    return GrammarSymbol(TERMINAL, name)


def nonterminal(name: str) -> GrammarSymbol:
    return GrammarSymbol(NONTERMINAL, name)


@dataclass(frozen=True)
class RewriteRule:
    label: str
    lhs: str
    rhs: tuple[GrammarSymbol, ...]

    def __post_init__(self) -> None:
        if not _NAME_RE.match(self.label or ""):
            raise GrammarError(f"bad rule label {self.label!r}")
        object.__setattr__(self, "rhs", tuple(self.rhs))

    @property
    def child_sorts(self) -> tuple[str, ...]:
        """Nonterminal names on the right-hand side, left to right."""
        return tuple(s.name for s in self.rhs if s.is_nonterminal)


@dataclass(frozen=True)
class Grammar:
    terminals: frozenset[str]
    nonterminals: frozenset[str]
    start: str
    rules: tuple[RewriteRule, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        object.__setattr__(self, "nonterminals", frozenset(self.nonterminals))
        object.__setattr__(self, "rules", tuple(self.rules))
        overlap = self.terminals & self.nonterminals
        if overlap:
            raise GrammarError(f"terminals and nonterminals overlap: {sorted(overlap)}")
        if self.start not in self.nonterminals:
            raise GrammarError(f"start symbol {self.start!r} is not a declared nonterminal")
        seen: set[str] = set()
        for rule in self.rules:
            if rule.label in seen:
                raise GrammarError(f"duplicate label {rule.label!r}")
            seen.add(rule.label)
            if rule.lhs not in self.nonterminals:
                raise GrammarError(f"rule {rule.label!r}: lhs {rule.lhs!r} is not declared")
            for sym in rule.rhs:
                pool = self.nonterminals if sym.is_nonterminal else self.terminals
                if sym.name not in pool:
                    raise GrammarError(
                        f"rule {rule.label!r}: {sym.kind} {sym.name!r} is not declared"
                    )
        object.__setattr__(self, "_by_label", {r.label: r for r in self.rules})

    @classmethod
    def from_rules(cls, rules: Iterable[RewriteRule], start: str | None = None) -> "Grammar":
        """Build a grammar inferring the vocabularies from the rules.

        Every rhs nonterminal must appear as some rule's lhs; the start
        symbol defaults to the first rule's lhs.
        """
        rules = tuple(rules)
        if not rules:
            raise GrammarError("grammar has no rules")
        nonterms = {r.lhs for r in rules}
        terms: set[str] = set()
        for rule in rules:
            for sym in rule.rhs:
                if sym.is_nonterminal:
                    if sym.name not in nonterms:
                        raise GrammarError(f"undefined nonterminal {sym.name}")
                else:
                    terms.add(sym.name)
        return cls(frozenset(terms), frozenset(nonterms), start or rules[0].lhs, rules)

    def rule(self, label: str) -> RewriteRule:
        try:
            return self._by_label[label]  # type: ignore[attr-defined]
        except KeyError:
            raise GrammarError(f"unknown rule {label!r}") from None

    def rules_for(self, sort: str) -> tuple[RewriteRule, ...]:
        return tuple(r for r in self.rules if r.lhs == sort)


@dataclass(frozen=True)
class DerivationTree:
    rule_label: str
    children: tuple[DerivationTree, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(self.children))

    def height(self) -> int:
        if not self.children:
            return 1
        return 1 + max(c.height() for c in self.children)

    def node_count(self) -> int:
        return 1 + sum(c.node_count() for c in self.children)

    def render(self) -> str:
        """Canonical one-line rendering, e.g. ``add(15, add(22, empty))``."""
        if not self.children:
            return self.rule_label
        return f"{self.rule_label}({', '.join(c.render() for c in self.children)})"


_RULE_RE = re.compile(r"^(\S+?)\.\s+<([^\s<>]+)>\s*::=(.*)$")


def parse_bnf(text: str) -> Grammar:
    """Parse the line-oriented rule format described in the module docstring."""
    rules: list[RewriteRule] = []
    labels: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        match = _RULE_RE.match(line)
        if match is None:
            raise GrammarError(
                f"line {lineno}: expected 'label. <Sort> ::= ...', got {raw.strip()!r}"
            )
        label, lhs, rhs_text = match.group(1), match.group(2), match.group(3)
        if label in labels:
            raise GrammarError(f"line {lineno}: duplicate label {label!r}")
        labels.add(label)
        rhs: list[GrammarSymbol] = []
        for token in rhs_text.split():
            if token.startswith("<") and token.endswith(">") and len(token) > 2:
                inner = token[1:-1]
                if "<" in inner or ">" in inner:
                    raise GrammarError(f"line {lineno}: malformed nonterminal {token!r}")
                rhs.append(nonterminal(inner))
            elif "<" in token or ">" in token:
                raise GrammarError(f"line {lineno}: stray angle bracket in {token!r}")
            else:
                rhs.append(terminal(token))
        rules.append(RewriteRule(label, lhs, tuple(rhs)))
    return Grammar.from_rules(rules)


def format_bnf(grammar: Grammar) -> str:
    """Canonical pretty-printer; ``parse_bnf`` inverts it when the first
    rule's lhs is the start symbol."""
    lines = []
    for rule in grammar.rules:
        body = " ".join(f"<{s.name}>" if s.is_nonterminal else s.name for s in rule.rhs)
        lines.append(f"{rule.label}. <{rule.lhs}> ::= {body}".rstrip())
    return "\n".join(lines) + "\n"


def min_depth(grammar: Grammar) -> dict[str, int | float]:
    """Height of the shallowest derivation tree per sort (inf when none exists)."""
    depth: dict[str, int | float] = {x: math.inf for x in grammar.nonterminals}
    changed = True
    while changed:
        changed = False
        for rule in grammar.rules:
            kids = rule.child_sorts
            d = 1 if not kids else 1 + max(depth[s] for s in kids)
            if d < depth[rule.lhs]:
                depth[rule.lhs] = d
                changed = True
    return depth


def productive_sorts(grammar: Grammar) -> frozenset[str]:
    """Sorts admitting at least one finite derivation tree (least fixpoint)."""
    depths = min_depth(grammar)
    return frozenset(s for s, d in depths.items() if d != math.inf)


class GrammarIndex:
    """Derived lookup tables for one grammar, shared by the search operations.

    ``position`` maps labels to the rule's index in declaration order;
    ``rule_depth`` is the height of the shallowest tree rooted in that rule.
    """

    def __init__(self, grammar: Grammar):
        self.grammar = grammar
        self.position: dict[str, int] = {r.label: i for i, r in enumerate(grammar.rules)}
        by: dict[str, list[RewriteRule]] = {}
        for rule in grammar.rules:
            by.setdefault(rule.lhs, []).append(rule)
        self.by_sort: dict[str, tuple[RewriteRule, ...]] = {s: tuple(rs) for s, rs in by.items()}
        self.min_depth = min_depth(grammar)
        self.rule_depth: dict[str, int | float] = {}
        for rule in grammar.rules:
            kids = rule.child_sorts
            self.rule_depth[rule.label] = 1 if not kids else 1 + max(self.min_depth[s] for s in kids)
        self.full_rules: dict[str, tuple[RewriteRule, ...]] = {}
        self.full_positions: dict[str, tuple[int, ...]] = {}
        self.max_rule_depth: dict[str, int | float] = {}
        for sort in grammar.nonterminals:
            finite = tuple(
                r for r in self.by_sort.get(sort, ()) if self.rule_depth[r.label] != math.inf
            )
            self.full_rules[sort] = finite
            self.full_positions[sort] = tuple(self.position[r.label] for r in finite)
            self.max_rule_depth[sort] = (
                max(self.rule_depth[r.label] for r in finite) if finite else math.inf
            )

    def is_productive(self, sort: str) -> bool:
        return self.min_depth.get(sort, math.inf) != math.inf

    def feasible(self, sort: str, remaining: int | float) -> tuple[RewriteRule, ...]:
        """Rules of `sort` whose shallowest completion fits within `remaining`."""
        if remaining >= self.max_rule_depth.get(sort, math.inf):
            return self.full_rules.get(sort, ())
        return tuple(
            r for r in self.full_rules.get(sort, ()) if self.rule_depth[r.label] <= remaining
        )

    def first_minimal(self, sort: str) -> RewriteRule:
        """First-declared rule among those of minimal subtree depth."""
        best = None
        best_d: int | float = math.inf
        for rule in self.by_sort.get(sort, ()):
            d = self.rule_depth[rule.label]
            if d < best_d:
                best, best_d = rule, d
        if best is None:
            raise GrammarError(f"sort {sort!r} has no productive rule")
        return best

    def default_depth_cap(self, sort: str) -> int:
        return int(max(self.min_depth[sort] + 16, 32))

    def check_sort(self, sort: str, depth_cap: int) -> None:
        if not self.is_productive(sort):
            raise GrammarError(f"sort {sort!r} is unproductive")
        if depth_cap < self.min_depth[sort]:
            raise GrammarError(
                f"depth cap {depth_cap} is below the minimum depth "
                f"{self.min_depth[sort]} of sort {sort!r}"
            )


def min_depth_tree(grammar: Grammar, sort: str, *, _index: GrammarIndex | None = None) -> DerivationTree:
    """A shallowest tree of the sort; ties broken by declaration order."""
    idx = _index or GrammarIndex(grammar)
    if not idx.is_productive(sort):
        raise GrammarError(f"sort {sort!r} is unproductive")

    def build(s: str) -> DerivationTree:
        rule = idx.first_minimal(s)
        return DerivationTree(rule.label, tuple(build(c) for c in rule.child_sorts))

    return build(sort)


def random_tree(
    grammar: Grammar,
    sort: str,
    depth_cap: int,
    rng: Random,
    *,
    _index: GrammarIndex | None = None,
) -> DerivationTree:
    """Uniform rule choice among the rules that still fit under the cap."""
    idx = _index or GrammarIndex(grammar)
    idx.check_sort(sort, depth_cap)

    def build(s: str, remaining: int) -> DerivationTree:
        rules = idx.feasible(s, remaining)
        rule = rules[rng.randrange(len(rules))] if len(rules) > 1 else rules[0]
        return DerivationTree(rule.label, tuple(build(c, remaining - 1) for c in rule.child_sorts))

    return build(sort, depth_cap)


def enumerate_trees(
    grammar: Grammar,
    sort: str,
    max_depth: int,
    *,
    limit: int = 100_000,
) -> list[DerivationTree]:
    """All trees of the sort with height <= max_depth, in canonical order.

    Canonical order is rule-declaration order at each node with children
    varying lexicographically. Raises EnumerationLimitError past `limit`
    constructed trees, which signals misuse of the brute-force oracle.
    """
    if max_depth < 1:
        raise GrammarError("max_depth must be at least 1")
    idx = GrammarIndex(grammar)
    memo: dict[tuple[str, int], tuple[DerivationTree, ...]] = {}
    produced = 0

    def enum(s: str, d: int) -> tuple[DerivationTree, ...]:
        nonlocal produced
        if d <= 0:
            return ()
        key = (s, d)
        if key in memo:
            return memo[key]
        out: list[DerivationTree] = []
        for rule in idx.by_sort.get(s, ()):
            if idx.rule_depth[rule.label] > d:
                continue
            child_lists = []
            dead = False
            for child_sort in rule.child_sorts:
                trees = enum(child_sort, d - 1)
                if not trees:
                    dead = True
                    break
                child_lists.append(trees)
            if dead:
                continue
            for combo in itertools.product(*child_lists):
                out.append(DerivationTree(rule.label, combo))
                produced += 1
                if produced > limit:
                    raise EnumerationLimitError(
                        f"enumeration exceeded {limit} trees for sort {sort!r}"
                    )
        memo[key] = tuple(out)
        return memo[key]

    return list(enum(sort, max_depth))


@dataclass(frozen=True)
class TreeReport:
    """Outcome of validating a tree; `path` locates the first violation."""

    ok: bool
    path: tuple[int, ...] = ()
    reason: str = ""


def validate_tree(grammar: Grammar, tree: DerivationTree) -> TreeReport:
    """Check the inductive derivation-tree conditions against the grammar."""
    by_label: Mapping[str, RewriteRule] = {r.label: r for r in grammar.rules}

    def walk(node: DerivationTree, path: tuple[int, ...]) -> TreeReport:
        rule = by_label.get(node.rule_label)
        if rule is None:
            return TreeReport(False, path, f"unknown rule {node.rule_label!r}")
        kids = rule.child_sorts
        if len(node.children) != len(kids):
            return TreeReport(
                False,
                path,
                f"arity mismatch: rule {rule.label!r} expects {len(kids)} "
                f"children, got {len(node.children)}",
            )
        for i, (child, want) in enumerate(zip(node.children, kids)):
            child_rule = by_label.get(child.rule_label)
            if child_rule is not None and child_rule.lhs != want:
                return TreeReport(
                    False, path + (i,), f"expected sort {want!r}, got {child_rule.lhs!r}"
                )
            report = walk(child, path + (i,))
            if not report.ok:
                return report
        return TreeReport(True)

    return walk(tree, ())


def rules_used(tree: DerivationTree) -> Counter[str]:
    """Multiset of rule labels, one entry per node."""
    counts: Counter[str] = Counter()

    def walk(node: DerivationTree) -> None:
        counts[node.rule_label] += 1
        for child in node.children:
            walk(child)

    walk(tree)
    return counts
