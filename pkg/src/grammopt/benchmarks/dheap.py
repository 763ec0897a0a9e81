"""Instrumented array-backed d-ary min-heap and its tuning case.

Every read or write of a backing-array cell bumps the access counter,
and a resize costs two accesses per copied index (the usual amortized
accounting for array lists). Fitness is the access count of a fixed
reference configuration divided by the candidate's count on the same
seeded load, so the reference scores exactly 1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..registry import ComponentModule, ConstantEntry, ConstructorEntry
from .base import BenchmarkCase, case_from_module


@dataclass(frozen=True)
class HeapConfig:
    arity: int
    initial_size: int
    growth_factor: float

    def __post_init__(self) -> None:
        if self.arity < 2:
            raise ValueError("arity must be at least 2")
        if self.initial_size < 1:
            raise ValueError("initial size must be at least 1")
        if self.growth_factor <= 1:
            raise ValueError("growth factor must exceed 1")


class DaryHeap:
    """Min-heap over (key, handle) entries with counted array accesses.

    Children of node i live at indices i*d + 1 .. i*d + d. The handle
    map used by decrease-key is bookkeeping outside the counted array.
    """

    def __init__(self, config: HeapConfig):
        self._d = config.arity
        self._growth = config.growth_factor
        self._cells: list[tuple[float, int] | None] = [None] * config.initial_size
        self._size = 0
        self._pos: dict[int, int] = {}
        self._next_handle = 0
        self.accesses = 0

    def __len__(self) -> int:
        return self._size

    def _read(self, index: int) -> tuple[float, int]:
        self.accesses += 1
        entry = self._cells[index]
        assert entry is not None
        return entry

    def _write(self, index: int, entry: tuple[float, int]) -> None:
        self.accesses += 1
        self._cells[index] = entry
        self._pos[entry[1]] = index

    def _resize(self) -> None:
        capacity = len(self._cells)
        new_capacity = max(self._size + 1, int(capacity * self._growth))
        self._cells = self._cells + [None] * (new_capacity - capacity)
        self.accesses += 2 * self._size

    def insert(self, key: float) -> int:
        if self._size == len(self._cells):
            self._resize()
        handle = self._next_handle
        self._next_handle += 1
        self._sift_up(self._size, (key, handle))
        self._size += 1
        return handle

    def extract_min(self) -> tuple[float, int]:
        if self._size == 0:
            raise ValueError("extract-min on empty heap")
        top = self._read(0)
        del self._pos[top[1]]
        self._size -= 1
        if self._size:
            last = self._read(self._size)
            self._sift_down(0, last)
        return top

    def decrease_key(self, handle: int, new_key: float) -> None:
        index = self._pos.get(handle)
        if index is None:
            raise ValueError(f"decrease-key on dead handle {handle}")
        entry = self._read(index)
        if new_key > entry[0]:
            raise ValueError("decrease-key must not increase the key")
        self._sift_up(index, (new_key, entry[1]))

    def _sift_up(self, index: int, entry: tuple[float, int]) -> None:
        while index > 0:
            parent = (index - 1) // self._d
            above = self._read(parent)
            if above[0] <= entry[0]:
                break
            self._write(index, above)
            index = parent
        self._write(index, entry)

    def _sift_down(self, index: int, entry: tuple[float, int]) -> None:
        d = self._d
        size = self._size
        while True:
            first = index * d + 1
            if first >= size:
                break
            best = first
            best_entry = self._read(first)
            for child in range(first + 1, min(first + d, size)):
                candidate = self._read(child)
                if candidate[0] < best_entry[0]:
                    best, best_entry = child, candidate
            if best_entry[0] < entry[0]:
                self._write(index, best_entry)
                index = best
            else:
                break
        self._write(index, entry)

    def heap_property_holds(self) -> bool:
        """Structural check for tests; does not touch the access counter."""
        for i in range(1, self._size):
            parent = (i - 1) // self._d
            cell, above = self._cells[i], self._cells[parent]
            assert cell is not None and above is not None
            if cell[0] < above[0]:
                return False
        return True


LoadOp = tuple  # ("insert", key) | ("decrease", fraction, delta) | ("extract",)


def generate_load(seed: int, ops: int = 5000) -> tuple[LoadOp, ...]:
    """Seeded mixture of 60% insert / 30% decrease-key / 10% extract-min.

    Decrease ops carry a fraction in [0, 1) picking among the live
    handles at application time, so one load drives every configuration.
    """
    rng = random.Random(seed)
    load: list[LoadOp] = []
    live = 0
    for _ in range(ops):
        r = rng.random()
        kind = "insert" if r < 0.6 else "decrease" if r < 0.9 else "extract"
        if kind != "insert" and live == 0:
            kind = "insert"
        if kind == "insert":
            load.append(("insert", rng.random()))
            live += 1
        elif kind == "decrease":
            load.append(("decrease", rng.random(), rng.random()))
        else:
            load.append(("extract",))
            live -= 1
    return tuple(load)


def heap_run_load(config: HeapConfig, load: tuple[LoadOp, ...]) -> int:
    """Run the load on a fresh heap and return the total array accesses."""
    heap = DaryHeap(config)
    handles: list[int] = []
    keys: dict[int, float] = {}
    for op in load:
        tag = op[0]
        if tag == "insert":
            handle = heap.insert(op[1])
            handles.append(handle)
            keys[handle] = op[1]
        elif tag == "decrease":
            if not handles:
                raise ValueError("decrease-key with no live elements")
            handle = handles[int(op[1] * len(handles))]
            new_key = keys[handle] - op[2]
            heap.decrease_key(handle, new_key)
            keys[handle] = new_key
        elif tag == "extract":
            if not handles:
                raise ValueError("extract-min on empty heap")
            _, handle = heap.extract_min()
            handles.remove(handle)
            del keys[handle]
        else:
            raise ValueError(f"unknown load operation {tag!r}")
    return heap.accesses


REFERENCE_CONFIG = HeapConfig(arity=2, initial_size=16, growth_factor=2.0)

DEFAULT_ARITIES = (2, 3, 4, 5, 6, 7, 8)
DEFAULT_INITIAL_SIZES = (4, 16, 64)
DEFAULT_GROWTH_FACTORS = (1.5, 2.0, 3.0)


def heap_case(
    load_seed: int = 0,
    *,
    arities: tuple[int, ...] = DEFAULT_ARITIES,
    initial_sizes: tuple[int, ...] = DEFAULT_INITIAL_SIZES,
    growth_factors: tuple[float, ...] = DEFAULT_GROWTH_FACTORS,
    ops: int = 5000,
) -> BenchmarkCase:
    if not arities or not initial_sizes or not growth_factors:
        raise ValueError("constant pools must be non-empty")
    load = generate_load(load_seed, ops)
    reference_accesses = heap_run_load(REFERENCE_CONFIG, load)

    def fitness(config: HeapConfig) -> float:
        return reference_accesses / heap_run_load(config, load)

    constants = (
        [ConstantEntry(f"d{v}", "Arity", v) for v in arities]
        + [ConstantEntry(f"grow{v!r}", "Growth", v) for v in growth_factors]
        + [ConstantEntry(f"init{v}", "InitialSize", v) for v in initial_sizes]
    )
    module = ComponentModule(
        constructors=(
            ConstructorEntry(
                "heap",
                "Heap",
                ("Arity", "Growth", "InitialSize"),
                lambda d, g, s: HeapConfig(arity=d, initial_size=s, growth_factor=g),
            ),
        ),
        constants=tuple(constants),
        target_sort="Heap",
    )
    return case_from_module("dheap", module, fitness)
