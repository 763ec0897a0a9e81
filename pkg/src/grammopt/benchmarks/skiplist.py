"""Skiplists parametrized by a maximum height and a promotion sequence.

The promotion probability at hierarchy level k is 1/P_k, where P is a
monotone sequence built from geometric and arithmetic generators and
termwise sums. The tuning objective fills a skiplist with 1000 seeded
random values, runs 100 random lookups, and counts key comparisons;
fitness is the reference configuration's count over the candidate's.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..registry import ComponentModule, ConstantEntry, ConstructorEntry
from .base import BenchmarkCase, case_from_module


@dataclass(frozen=True)
class GeometricSequence:
    a: float

    def __post_init__(self) -> None:
        if self.a <= 1:
            raise ValueError("geometric sequence needs a > 1")


@dataclass(frozen=True)
class ArithmeticSequence:
    a: float

    def __post_init__(self) -> None:
        if self.a <= 0:
            raise ValueError("arithmetic sequence needs a > 0")


@dataclass(frozen=True)
class SumSequence:
    left: "ProbabilitySequence"
    right: "ProbabilitySequence"


ProbabilitySequence = Union[GeometricSequence, ArithmeticSequence, SumSequence]


def seq_term(sequence: ProbabilitySequence, k: int) -> float:
    """Term k of the sequence; both generators start at 1 for k = 0."""
    if k < 0:
        raise ValueError("sequence index must be non-negative")
    if isinstance(sequence, GeometricSequence):
        return sequence.a**k
    if isinstance(sequence, ArithmeticSequence):
        return 1.0 + k * sequence.a
    if isinstance(sequence, SumSequence):
        return seq_term(sequence.left, k) + seq_term(sequence.right, k)
    raise TypeError(f"not a probability sequence: {sequence!r}")


@dataclass(frozen=True)
class SkiplistConfig:
    max_height: int
    sequence: ProbabilitySequence

    def __post_init__(self) -> None:
        if self.max_height < 1:
            raise ValueError("max height must be at least 1")


def draw_height(config: SkiplistConfig, rng: random.Random) -> int:
    """Promotion from level l succeeds while a uniform draw is < 1/P_l,
    stopping at the height cap (no draw is consumed once capped)."""
    height = 1
    level = 0
    while height < config.max_height and rng.random() < 1.0 / seq_term(config.sequence, level):
        height += 1
        level += 1
    return height


class Skiplist:
    """Reference structure for correctness tests; counts key comparisons."""

    def __init__(self, config: SkiplistConfig, rng: random.Random):
        self._config = config
        self._rng = rng
        self._head: list = [None] * (1 + config.max_height)
        self.comparisons = 0

    def _descend(self, value) -> list:
        node = self._head
        update = [self._head] * self._config.max_height
        for level in range(self._config.max_height - 1, -1, -1):
            while True:
                nxt = node[1 + level]
                if nxt is None:
                    break
                self.comparisons += 1
                if nxt[0] < value:
                    node = nxt
                else:
                    break
            update[level] = node
        return update

    def insert(self, value) -> None:
        update = self._descend(value)
        height = draw_height(self._config, self._rng)
        node = [value] + [None] * height
        for level in range(height):
            node[1 + level] = update[level][1 + level]
            update[level][1 + level] = node

    def __contains__(self, value) -> bool:
        update = self._descend(value)
        nxt = update[0][1]
        if nxt is None:
            return False
        self.comparisons += 1
        return nxt[0] == value

    def items(self) -> list:
        out = []
        node = self._head[1]
        while node is not None:
            out.append(node[0])
            node = node[1]
        return out


def _load_comparisons(
    values: np.ndarray, lookups: np.ndarray, heights: np.ndarray, max_height: int
) -> int:
    """Insert all values then look the queries up, counting comparisons.

    Slot 0 is the head sentinel; value i lives in slot i + 1; -1 is nil.
    """
    n = values.shape[0]
    nxt = np.full((max_height, n + 1), -1, dtype=np.int64)
    comparisons = 0
    update = np.zeros(max_height, dtype=np.int64)
    for i in range(n):
        v = values[i]
        node = 0
        for level in range(max_height - 1, -1, -1):
            j = nxt[level, node]
            while j != -1:
                comparisons += 1
                if values[j - 1] < v:
                    node = j
                    j = nxt[level, node]
                else:
                    break
            update[level] = node
        me = i + 1
        for level in range(heights[i]):
            prev = update[level]
            nxt[level, me] = nxt[level, prev]
            nxt[level, prev] = me
    for q in lookups:
        node = 0
        for level in range(max_height - 1, -1, -1):
            j = nxt[level, node]
            while j != -1:
                comparisons += 1
                if values[j - 1] < q:
                    node = j
                    j = nxt[level, node]
                else:
                    break
        j = nxt[0, node]
        if j != -1:
            comparisons += 1  # final equality check
    return comparisons


try:  # same algorithm either way; numba only removes interpreter overhead
    from numba import njit

    _load_comparisons_fast = njit(cache=True)(_load_comparisons)
except ImportError:  # pragma: no cover
    _load_comparisons_fast = _load_comparisons


def skiplist_run_load(
    config: SkiplistConfig,
    seed: int,
    *,
    n_values: int = 1000,
    n_lookups: int = 100,
    _fast: bool = True,
) -> int:
    """Seeded load run returning the total number of key comparisons.

    The value stream is independent of the configuration; promotion draws
    come from a separate stream so every configuration sees the same data.
    """
    value_rng = random.Random(seed)
    values = [value_rng.random() for _ in range(n_values)]
    queries = [value_rng.random() for _ in range(n_lookups)]
    promotion_rng = random.Random(f"{seed}-promotion")
    heights = [draw_height(config, promotion_rng) for _ in range(n_values)]
    kernel = _load_comparisons_fast if _fast else _load_comparisons
    return int(
        kernel(
            np.asarray(values, dtype=np.float64),
            np.asarray(queries, dtype=np.float64),
            np.asarray(heights, dtype=np.int64),
            config.max_height,
        )
    )


REFERENCE_CONFIG = SkiplistConfig(4, GeometricSequence(2.0))

DEFAULT_HEIGHTS = (1, 2, 3, 4, 6, 8, 12, 16)
DEFAULT_PARAMETERS = (1.25, 1.5, 2.0, 2.5, 3.0, 4.0)


def skiplist_case(
    load_seed: int = 0,
    *,
    heights: tuple[int, ...] = DEFAULT_HEIGHTS,
    parameters: tuple[float, ...] = DEFAULT_PARAMETERS,
) -> BenchmarkCase:
    if not heights or not parameters:
        raise ValueError("constant pools must be non-empty")
    if any(p <= 1 for p in parameters):
        raise ValueError("sequence parameters must exceed 1 to fit both generators")
    reference = skiplist_run_load(REFERENCE_CONFIG, load_seed)

    def fitness(config: SkiplistConfig) -> float:
        return reference / skiplist_run_load(config, load_seed)

    constants = [ConstantEntry(f"h{v}", "Height", v) for v in heights] + [
        ConstantEntry(f"a{v!r}", "Double", v) for v in parameters
    ]
    module = ComponentModule(
        constructors=(
            ConstructorEntry(
                "skiplist",
                "Skiplist",
                ("Height", "Prob"),
                lambda h, p: SkiplistConfig(h, p),
            ),
            ConstructorEntry("geom", "Prob", ("Double",), GeometricSequence),
            ConstructorEntry("arit", "Prob", ("Double",), ArithmeticSequence),
            ConstructorEntry("sum", "Prob", ("Prob", "Prob"), SumSequence),
        ),
        constants=tuple(constants),
        target_sort="Skiplist",
    )
    return case_from_module("skiplist", module, fitness)
