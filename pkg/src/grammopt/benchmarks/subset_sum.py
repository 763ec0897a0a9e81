"""Subset sum as grammatical optimization.

Sets are built by `empty`/`add` rules over a pool of integer constants;
re-adding an element is idempotent (set union). Fitness is the inverse
distance to the target, with an exact hit scored as 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..registry import ComponentModule, ConstantEntry, ConstructorEntry
from .base import BenchmarkCase, case_from_module


@dataclass(frozen=True)
class SubsetSumInstance:
    weights: tuple[int, ...]
    target: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if not self.weights:
            raise ValueError("instance has no weights")


def parse_instance(text: str) -> SubsetSumInstance:
    """First line is the target; the rest are whitespace-separated weights."""
    lines = text.split("\n", 1)
    try:
        target = int(lines[0].strip())
        weights = tuple(int(tok) for tok in (lines[1] if len(lines) > 1 else "").split())
    except ValueError as exc:
        raise ValueError(f"malformed subset-sum instance: {exc}") from None
    return SubsetSumInstance(weights, target)


def load_instance(path: str | Path) -> SubsetSumInstance:
    return parse_instance(Path(path).read_text())


# Burkardt scientific-computing dataset instances.
P01 = SubsetSumInstance((15, 22, 14, 26, 32, 9, 16, 8), 53)
P02 = SubsetSumInstance(
    (267, 493, 869, 961, 1000, 1153, 1246, 1598, 1766, 1922), 5842
)
P03 = SubsetSumInstance(
    (
        518533, 1037066, 2074132, 1648264, 796528, 1593056, 686112,
        1372224, 244448, 488896, 977792, 1955584, 1411168, 322336,
        644672, 1289344, 78688, 157376, 314752, 629504, 1259008,
    ),
    2463098,
)
BUNDLED_INSTANCES = {"P01": P01, "P02": P02, "P03": P03}


def subset_objective(instance: SubsetSumInstance):
    def fitness(chosen: frozenset[int]) -> float:
        gap = instance.target - sum(chosen)
        return 2.0 if gap == 0 else 1.0 / abs(gap)

    return fitness


def subset_case(instance: SubsetSumInstance = P01) -> BenchmarkCase:
    seen: set[int] = set()
    constants = []
    for weight in instance.weights:
        if weight in seen:
            continue  # duplicates are invisible under set-union semantics
        seen.add(weight)
        constants.append(ConstantEntry(str(weight), "Int", weight))
    module = ComponentModule(
        constructors=(
            ConstructorEntry("empty", "Set", (), lambda: frozenset()),
            ConstructorEntry("add", "Set", ("Int", "Set"), lambda x, s: s | {x}),
        ),
        constants=tuple(constants),
        target_sort="Set",
    )
    return case_from_module("subset", module, subset_objective(instance))
