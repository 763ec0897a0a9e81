"""Bundled case studies, addressable by name for the harness and CLI."""

from __future__ import annotations

from typing import Any, Mapping

from .base import BenchmarkCase, case_from_module
from .branin import BraninGrid, branin_case, branin_value
from .dheap import (
    DaryHeap,
    HeapConfig,
    generate_load,
    heap_case,
    heap_run_load,
)
from .highlight import (
    contrast_ratio,
    parse_hex_color,
    relative_luminance,
    render_stylesheet,
    scheme_case,
    scheme_objective,
)
from .skiplist import (
    ArithmeticSequence,
    GeometricSequence,
    Skiplist,
    SkiplistConfig,
    SumSequence,
    draw_height,
    seq_term,
    skiplist_case,
    skiplist_run_load,
)
from .subset_sum import (
    BUNDLED_INSTANCES,
    SubsetSumInstance,
    load_instance,
    parse_instance,
    subset_case,
)

CASE_NAMES = ("branin", "subset", "dheap", "skiplist", "syntax")


def get_case(name: str, params: Mapping[str, Any] | None = None) -> BenchmarkCase:
    """Build a named case, honoring the relevant parameter overrides."""
    params = dict(params or {})
    if name == "branin":
        return branin_case(step=float(params.get("grid_step", 0.05)))
    if name == "subset":
        instance = params.get("instance", "P01")
        if isinstance(instance, str):
            instance = BUNDLED_INSTANCES.get(instance) or load_instance(instance)
        return subset_case(instance)
    if name == "dheap":
        return heap_case(
            load_seed=int(params.get("load_seed", 0)), ops=int(params.get("ops", 5000))
        )
    if name == "skiplist":
        return skiplist_case(load_seed=int(params.get("load_seed", 0)))
    if name == "syntax":
        background = params.get("background", (0, 0, 0))
        if isinstance(background, str):
            background = parse_hex_color(background)
        return scheme_case(background=background)
    raise ValueError(f"unknown case {name!r}; expected one of {CASE_NAMES}")
