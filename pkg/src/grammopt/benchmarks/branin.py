"""Branin surface minimization over a uniform coordinate grid.

The continuous domain is discretized into per-axis constant pools; the
objective is the reciprocal of the surface value, so lower surface
values mean higher fitness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..registry import ComponentModule, ConstantEntry, ConstructorEntry
from .base import BenchmarkCase, case_from_module

_B = 5.1 / (4.0 * math.pi**2)
_C = 5.0 / math.pi
_T = 1.0 / (8.0 * math.pi)


def branin_value(x1: float, x2: float) -> float:
    # Dixon-Szego parenthesization; global minima ~0.397887 at
    # (-pi, 12.275), (pi, 2.275) and (3*pi, 2.475).
    return (x2 - _B * x1 * x1 + _C * x1 - 6.0) ** 2 + 10.0 * (1.0 - _T) * math.cos(x1) + 10.0


def _axis_points(lo: float, hi: float, step: float) -> tuple[float, ...]:
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(round(lo + i * step, 9) for i in range(count))


@dataclass(frozen=True)
class BraninGrid:
    step: float = 0.05
    x1_range: tuple[float, float] = (-5.0, 10.0)
    x2_range: tuple[float, float] = (0.0, 15.0)

    def __post_init__(self) -> None:
        if self.step <= 0:
            raise ValueError("grid step must be positive")
        if len(self.x1_points) < 2 or len(self.x2_points) < 2:
            raise ValueError("grid step leaves fewer than 2 points on an axis")

    @property
    def x1_points(self) -> tuple[float, ...]:
        return _axis_points(self.x1_range[0], self.x1_range[1], self.step)

    @property
    def x2_points(self) -> tuple[float, ...]:
        return _axis_points(self.x2_range[0], self.x2_range[1], self.step)


def branin_fitness(point: tuple[float, float]) -> float:
    return 1.0 / branin_value(point[0], point[1])


def branin_case(grid: BraninGrid | None = None, *, step: float = 0.05) -> BenchmarkCase:
    grid = grid if grid is not None else BraninGrid(step=step)
    constants = [
        ConstantEntry(f"x1_{v!r}", "X1", v) for v in grid.x1_points
    ] + [
        ConstantEntry(f"x2_{v!r}", "X2", v) for v in grid.x2_points
    ]
    module = ComponentModule(
        constructors=(
            ConstructorEntry("point", "Point", ("X1", "X2"), lambda a, b: (a, b)),
        ),
        constants=tuple(constants),
        target_sort="Point",
    )
    return case_from_module("branin", module, branin_fitness)
