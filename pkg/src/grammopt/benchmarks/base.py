"""Shared container for the bundled case studies."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from ..grammar import Grammar
from ..registry import ComponentModule, compile_grammar
from ..semantics import SemanticMap


@dataclass(frozen=True)
class BenchmarkCase:
    """One benchmark: a component module, its compiled grammar/semantics,
    and a non-negative domain objective over payloads of the start sort."""

    name: str
    module: ComponentModule
    grammar: Grammar
    semantics: SemanticMap
    objective: Callable[[Any], float]


def case_from_module(
    name: str, module: ComponentModule, objective: Callable[[Any], float]
) -> BenchmarkCase:
    grammar, semantics = compile_grammar(module)
    return BenchmarkCase(name, module, grammar, semantics, objective)
