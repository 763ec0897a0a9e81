"""Declarative constructor registries compiled to grammars.

A component module lists factories (constructors) and constants. Each
constructor `label(T1, ..., Tn) -> T` compiles to the rewrite rule
``label. <T> ::= label <T1> ... <Tn>`` and each constant to a
terminal-only rule, with the factory (or the constant value) as the
rule's semantics. Requesting an instance of the target sort then means
searching the compiled grammar's derivation trees.

Multiple constructors may share one result sort; that ambiguity is
exactly what the heuristics resolve.
"""

from __future__ import annotations

import inspect
from dataclasses import dataclass, field
from random import Random
from typing import Any, Callable, NamedTuple

from .grammar import (
    DerivationTree,
    Grammar,
    GrammarError,
    GrammarIndex,
    RewriteRule,
    min_depth_tree,
    nonterminal,
    terminal,
)
from .heuristics import (
    GrantParams,
    GrevoParams,
    SearchBudget,
    run_heuristic,
)
from .semantics import SemanticMap, SemanticValue, compose_objective, evaluate


@dataclass(frozen=True)
class ConstructorEntry:
    label: str
    result_sort: str
    param_sorts: tuple[str, ...]
    factory: Callable[..., Any]

    def __post_init__(self) -> None:
        object.__setattr__(self, "param_sorts", tuple(self.param_sorts))
        _check_factory_arity(self.factory, len(self.param_sorts), self.label)


@dataclass(frozen=True)
class ConstantEntry:
    label: str
    sort: str
    value: Any


def _check_factory_arity(factory: Callable[..., Any], arity: int, label: str) -> None:
    try:
        signature = inspect.signature(factory)
    except (TypeError, ValueError):
        return  # uninspectable callables are taken on trust
    positional = []
    for param in signature.parameters.values():
        if param.kind is inspect.Parameter.VAR_POSITIONAL:
            return
        if param.kind in (
            inspect.Parameter.POSITIONAL_ONLY,
            inspect.Parameter.POSITIONAL_OR_KEYWORD,
        ):
            positional.append(param)
    required = sum(1 for p in positional if p.default is inspect.Parameter.empty)
    if arity < required or arity > len(positional):
        raise ValueError(
            f"constructor {label!r}: factory accepts {len(positional)} positional "
            f"arguments but {arity} parameter sorts are declared"
        )


@dataclass(frozen=True)
class ComponentModule:
    """Immutable registry of constructors and constants plus a target sort."""

    constructors: tuple[ConstructorEntry, ...]
    constants: tuple[ConstantEntry, ...]
    target_sort: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "constructors", tuple(self.constructors))
        object.__setattr__(self, "constants", tuple(self.constants))
        if not self.constructors and not self.constants:
            raise ValueError("module declares no constructors and no constants")
        labels: set[str] = set()
        for entry in (*self.constructors, *self.constants):
            if entry.label in labels:
                raise ValueError(f"duplicate label {entry.label!r}")
            labels.add(entry.label)
        sorts = {c.result_sort for c in self.constructors} | {k.sort for k in self.constants}
        for ctor in self.constructors:
            for param in ctor.param_sorts:
                if param not in sorts:
                    raise ValueError(
                        f"constructor {ctor.label!r}: parameter sort {param!r} has no "
                        "constructor or constant"
                    )
        if self.target_sort not in sorts:
            raise ValueError(f"target sort {self.target_sort!r} has no constructor or constant")

    @property
    def sorts(self) -> frozenset[str]:
        return frozenset(
            {c.result_sort for c in self.constructors} | {k.sort for k in self.constants}
        )


def _constant_producer(value: Any) -> Callable[[], Any]:
    def produce() -> Any:
        return value

    return produce


def compile_grammar(module: ComponentModule) -> tuple[Grammar, SemanticMap]:
    """Translate a module into its grammar and semantics.

    Rule order is declaration order, constructors before constants; the
    start symbol is the module's target sort.
    """
    rules: list[RewriteRule] = []
    bindings: dict[str, Callable[..., Any]] = {}
    for ctor in module.constructors:
        rhs = (terminal(ctor.label),) + tuple(nonterminal(p) for p in ctor.param_sorts)
        rules.append(RewriteRule(ctor.label, ctor.result_sort, rhs))
        bindings[ctor.label] = ctor.factory
    for const in module.constants:
        rules.append(RewriteRule(const.label, const.sort, (terminal(const.label),)))
        bindings[const.label] = _constant_producer(const.value)
    grammar = Grammar(
        terminals=frozenset(r.label for r in rules),
        nonterminals=module.sorts,
        start=module.target_sort,
        rules=tuple(rules),
    )
    return grammar, SemanticMap(grammar, bindings)


def greedy_instantiate(module: ComponentModule, sort: str) -> SemanticValue | None:
    """Greedy instantiation: build and evaluate the shallowest derivation
    tree of the sort, or return None when its dependencies are unsatisfiable.
    """
    grammar, semantics = compile_grammar(module)
    index = GrammarIndex(grammar)
    if not index.is_productive(sort):
        return None
    tree = min_depth_tree(grammar, sort, _index=index)
    return evaluate(semantics, tree)


class CreateResult(NamedTuple):
    value: SemanticValue
    tree: DerivationTree
    fitness: float


def create(
    module: ComponentModule,
    objective: Callable[[Any], float],
    heuristic: str = "grant",
    budget: int = 1000,
    seed: int = 0,
    *,
    depth_cap: int | None = None,
    grant_params: GrantParams | None = None,
    grevo_params: GrevoParams | None = None,
) -> CreateResult:
    """Compile the module and search for the fittest instance of the
    target sort under an exact evaluation budget.

    The returned tree is a faithful witness: evaluating it reproduces the
    returned value. Deterministic for a fixed seed; pheromone state does
    not persist between calls.
    """
    grammar, semantics = compile_grammar(module)
    index = GrammarIndex(grammar)
    if not index.is_productive(module.target_sort):
        raise GrammarError(f"target sort {module.target_sort!r} is unproductive")
    counting = compose_objective(semantics, objective)
    result = run_heuristic(
        heuristic,
        grammar,
        counting,
        SearchBudget(budget),
        Random(seed),
        grant_params=grant_params,
        grevo_params=grevo_params,
        depth_cap=depth_cap,
    )
    value = evaluate(semantics, result.best_tree)
    return CreateResult(value, result.best_tree, result.best_fitness)
