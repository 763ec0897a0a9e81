"""Experiment runner: repeated seeded runs, summary statistics, rank
tests, and machine-readable result emission.

Everything except wall-clock fields is a pure function of the spec:
per-run seeds come from a 64-bit mix of the base seed, a SHA-256 hash of
the heuristic name, and the run index.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field
from random import Random
from typing import Any, Mapping, Sequence

from .benchmarks import CASE_NAMES, BenchmarkCase, get_case
from .heuristics import (
    HEURISTIC_NAMES,
    GrantParams,
    GrevoParams,
    SearchBudget,
    default_grevo_dimensions,
    run_heuristic,
)
from .semantics import compose_objective

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(base_seed: int, heuristic: str, run_index: int) -> int:
    """Per-run seed: splitmix64 over base seed, name hash, and run index."""
    name_hash = int.from_bytes(hashlib.sha256(heuristic.encode()).digest()[:8], "big")
    mixed = _splitmix64((base_seed & _MASK64) ^ name_hash)
    return _splitmix64((mixed + run_index * _GOLDEN) & _MASK64)


@dataclass(frozen=True)
class ExperimentSpec:
    case: str
    heuristics: tuple[str, ...] = ("grant", "grevo", "random")
    runs: int = 10
    budget: int = 1000
    base_seed: int = 0
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "heuristics", tuple(self.heuristics))
        object.__setattr__(self, "params", dict(self.params))
        if self.case not in CASE_NAMES:
            raise ValueError(f"unknown case {self.case!r}; expected one of {CASE_NAMES}")
        if not self.heuristics:
            raise ValueError("at least one heuristic is required")
        for name in self.heuristics:
            if name not in HEURISTIC_NAMES:
                raise ValueError(f"unknown heuristic {name!r}; expected one of {HEURISTIC_NAMES}")
        if len(set(self.heuristics)) != len(self.heuristics):
            raise ValueError("duplicate heuristic names")
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if self.budget < 1:
            raise ValueError("budget must be at least 1")

    def to_dict(self) -> dict[str, Any]:
        return {
            "case": self.case,
            "heuristics": list(self.heuristics),
            "runs": self.runs,
            "budget": self.budget,
            "base_seed": self.base_seed,
            "params": dict(self.params),
        }


@dataclass(frozen=True)
class RunRecord:
    heuristic: str
    run_index: int
    seed: int
    best_fitness: float
    best_tree: str
    evaluations: int
    wall_millis: int


@dataclass(frozen=True)
class SummaryStats:
    avg: float
    max: float
    var: float
    n: int


def summarize(records: Sequence[RunRecord]) -> SummaryStats:
    """Mean, maximum and sample variance (n-1 denominator, 0 when n = 1)
    of the best-of-run fitnesses."""
    if not records:
        raise ValueError("no records to summarize")
    values = [r.best_fitness for r in records]
    n = len(values)
    avg = sum(values) / n
    var = sum((v - avg) ** 2 for v in values) / (n - 1) if n > 1 else 0.0
    return SummaryStats(avg=avg, max=max(values), var=var, n=n)


def _fractional_ranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def _tie_correction(ranks: Sequence[float]) -> float:
    counts: dict[float, int] = {}
    for r in ranks:
        counts[r] = counts.get(r, 0) + 1
    n = len(ranks)
    return 1.0 - sum(t**3 - t for t in counts.values()) / (n**3 - n)


def rank_test(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sided Mann-Whitney rank-sum p-value.

    Normal approximation with tie correction and a continuity correction
    floored at zero, so identical samples report p = 1. Symmetric in its
    arguments; all-tied data also reports p = 1.
    """
    if len(a) < 3 or len(b) < 3:
        raise ValueError("rank test needs at least 3 samples per side")
    n1, n2 = len(a), len(b)
    ranks = _fractional_ranks(list(a) + list(b))
    w1 = sum(ranks[:n1])
    u1 = n1 * n2 + n1 * (n1 + 1) / 2.0 - w1
    u2 = n1 * n2 - u1
    tie = _tie_correction(ranks)
    if tie <= 0.0:
        return 1.0
    sd = math.sqrt(tie * n1 * n2 * (n1 + n2 + 1) / 12.0)
    deviation = max(0.0, abs(max(u1, u2) - n1 * n2 / 2.0) - 0.5)
    z = deviation / sd
    return min(1.0, 2.0 * 0.5 * math.erfc(z / math.sqrt(2.0)))


def _grevo_dimensions(budget: int, params: Mapping[str, Any]) -> tuple[int, int]:
    ratio = params.get("grevo_ratio")
    if ratio is None:
        return default_grevo_dimensions(budget)
    if isinstance(ratio, str):
        left, _, right = ratio.partition(":")
        try:
            population, generations = int(left), int(right)
        except ValueError:
            raise ValueError(f"malformed grevo ratio {ratio!r}; expected P:G") from None
    else:
        population, generations = ratio
    return population, generations


def _heuristic_kwargs(spec: ExperimentSpec) -> dict[str, Any]:
    params = spec.params
    depth_cap = params.get("depth_cap")
    grant_params = GrantParams(
        tau_min=float(params.get("tau_min", 0.01)),
        tau_init=float(params.get("tau_init", 1.0)),
        rho=float(params.get("rho", 0.1)),
        depth_cap=int(depth_cap) if depth_cap is not None else None,
    )
    grevo_params = None
    if "grevo" in spec.heuristics:
        population, generations = _grevo_dimensions(spec.budget, params)
        if population * generations > spec.budget:
            raise ValueError(
                f"grevo population {population} x generations {generations} "
                f"exceeds budget {spec.budget}"
            )
        grevo_params = GrevoParams(
            population_size=population,
            generations=generations,
            depth_cap=int(depth_cap) if depth_cap is not None else None,
        )
    return {
        "grant_params": grant_params,
        "grevo_params": grevo_params,
        "depth_cap": int(depth_cap) if depth_cap is not None else None,
    }


def run_single(
    case: BenchmarkCase,
    heuristic: str,
    budget: int,
    seed: int,
    run_index: int = 0,
    **kwargs: Any,
) -> RunRecord:
    objective = compose_objective(case.semantics, case.objective)
    started = time.perf_counter()
    result = run_heuristic(
        heuristic, case.grammar, objective, SearchBudget(budget), Random(seed), **kwargs
    )
    wall = int(round((time.perf_counter() - started) * 1000.0))
    return RunRecord(
        heuristic=heuristic,
        run_index=run_index,
        seed=seed,
        best_fitness=result.best_fitness,
        best_tree=result.best_tree.render(),
        evaluations=result.evaluations_used,
        wall_millis=wall,
    )


def case_params(spec: ExperimentSpec) -> dict[str, Any]:
    """Case-construction parameters; load-driven cases default their load
    seed to the experiment's base seed."""
    params = dict(spec.params)
    if spec.case in ("dheap", "skiplist"):
        params.setdefault("load_seed", spec.base_seed)
    return params


def run_experiment(spec: ExperimentSpec) -> list[RunRecord]:
    """Execute heuristics x runs, ordered by (heuristic, run index)."""
    kwargs = _heuristic_kwargs(spec)
    case = get_case(spec.case, case_params(spec))
    records: list[RunRecord] = []
    for heuristic in spec.heuristics:
        for index in range(spec.runs):
            seed = derive_seed(spec.base_seed, heuristic, index)
            records.append(run_single(case, heuristic, spec.budget, seed, index, **kwargs))
    return records


def _sig6(x: float) -> float:
    return float(f"{x:.6g}")


def group_records(records: Sequence[RunRecord]) -> dict[str, list[RunRecord]]:
    grouped: dict[str, list[RunRecord]] = {}
    for record in records:
        grouped.setdefault(record.heuristic, []).append(record)
    return grouped


def pairwise_pvalues(records: Sequence[RunRecord]) -> dict[str, float]:
    """Rank-test p-values for every heuristic pair with enough runs."""
    grouped = group_records(records)
    names = list(grouped)
    out: dict[str, float] = {}
    for i, first in enumerate(names):
        for second in names[i + 1 :]:
            a = [r.best_fitness for r in grouped[first]]
            b = [r.best_fitness for r in grouped[second]]
            if len(a) >= 3 and len(b) >= 3:
                out[f"{first}_vs_{second}"] = rank_test(a, b)
    return out


CSV_HEADER = "heuristic,run,seed,best_fitness,evaluations,wall_ms"


def emit_results(
    spec: ExperimentSpec, records: Sequence[RunRecord], fmt: str = "json"
) -> str:
    """Stable-order JSON document or CSV table; reals use 6 significant digits."""
    if fmt == "json":
        grouped = group_records(records)
        doc = {
            "spec": spec.to_dict(),
            "records": [
                {
                    "heuristic": r.heuristic,
                    "run": r.run_index,
                    "seed": r.seed,
                    "best_fitness": _sig6(r.best_fitness),
                    "best_tree": r.best_tree,
                    "evaluations": r.evaluations,
                    "wall_ms": r.wall_millis,
                }
                for r in records
            ],
            "summaries": {
                name: {
                    "avg": _sig6(stats.avg),
                    "max": _sig6(stats.max),
                    "var": _sig6(stats.var),
                    "n": stats.n,
                }
                for name, stats in (
                    (name, summarize(rs)) for name, rs in grouped.items()
                )
            },
            "pValues": {k: _sig6(v) for k, v in pairwise_pvalues(records).items()},
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        lines = [CSV_HEADER]
        for r in records:
            lines.append(
                f"{r.heuristic},{r.run_index},{r.seed},"
                f"{r.best_fitness:.6g},{r.evaluations},{r.wall_millis}"
            )
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}; expected json or csv")


def parse_results(text: str) -> dict[str, list[float]]:
    """Best-fitness samples per heuristic from an emitted JSON or CSV file."""
    stripped = text.lstrip()
    grouped: dict[str, list[float]] = {}
    if stripped.startswith("{"):
        doc = json.loads(text)
        for record in doc.get("records", []):
            grouped.setdefault(record["heuristic"], []).append(float(record["best_fitness"]))
        return grouped
    reader = csv.DictReader(io.StringIO(text))
    for row in reader:
        grouped.setdefault(row["heuristic"], []).append(float(row["best_fitness"]))
    return grouped
