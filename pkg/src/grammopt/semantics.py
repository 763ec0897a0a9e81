"""Compositional evaluation of derivation trees into domain values.

A semantic map binds every rule label of a grammar to an evaluation
function over the payloads of the node's nonterminal children. A tree's
meaning therefore depends only on its root rule and the meanings of its
direct subtrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from .grammar import DerivationTree, Grammar


class EvaluationError(Exception):
    """Evaluation failed at a node; `path` holds child indices from the root."""

    def __init__(self, message: str, path: tuple[int, ...] = ()):
        self.path = tuple(path)
        if self.path:
            message = f"{message} (at path {'/'.join(map(str, self.path))})"
        super().__init__(message)


@dataclass(frozen=True)
class SemanticValue:
    sort: str
    payload: Any


@dataclass(frozen=True)
class SemanticMap:
    """Total assignment of evaluation functions to a grammar's rule labels."""

    grammar: Grammar
    bindings: Mapping[str, Callable[..., Any]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        labels = {r.label for r in self.grammar.rules}
        missing = labels - set(self.bindings)
        if missing:
            raise ValueError(f"missing bindings for rules: {sorted(missing)}")
        extra = set(self.bindings) - labels
        if extra:
            raise ValueError(f"bindings for unknown rules: {sorted(extra)}")
        object.__setattr__(self, "bindings", dict(self.bindings))
        object.__setattr__(self, "_rule_by_label", {r.label: r for r in self.grammar.rules})


def evaluate(semantic_map: SemanticMap, tree: DerivationTree) -> SemanticValue:
    """Post-order evaluation; binding failures carry the offending tree path."""
    rule_of = semantic_map._rule_by_label  # type: ignore[attr-defined]
    bindings = semantic_map.bindings
    stack: list[int] = []

    def run(node: DerivationTree) -> Any:
        rule = rule_of.get(node.rule_label)
        if rule is None:
            raise EvaluationError(f"no binding for label {node.rule_label!r}", tuple(stack))
        args = []
        for i, child in enumerate(node.children):
            stack.append(i)
            args.append(run(child))
            stack.pop()
        try:
            return bindings[node.rule_label](*args)
        except EvaluationError:
            raise
        except Exception as exc:
            raise EvaluationError(
                f"binding {node.rule_label!r} failed: {exc}", tuple(stack)
            ) from exc

    payload = run(tree)
    return SemanticValue(rule_of[tree.rule_label].lhs, payload)


class CountingObjective:
    """Tree-level objective with budget accounting.

    Every invocation counts exactly once, including failed evaluations,
    which yield the -inf sentinel instead of raising.
    """

    __slots__ = ("semantics", "domain_objective", "evaluations")

    def __init__(self, semantics: SemanticMap, domain_objective: Callable[[Any], float]):
        self.semantics = semantics
        self.domain_objective = domain_objective
        self.evaluations = 0

    def __call__(self, tree: DerivationTree) -> float:
        self.evaluations += 1
        try:
            value = evaluate(self.semantics, tree)
        except EvaluationError:
            return float("-inf")
        return float(self.domain_objective(value.payload))


def compose_objective(
    semantic_map: SemanticMap, domain_objective: Callable[[Any], float]
) -> CountingObjective:
    """Lift a domain objective to derivation trees of the start sort."""
    return CountingObjective(semantic_map, domain_objective)
