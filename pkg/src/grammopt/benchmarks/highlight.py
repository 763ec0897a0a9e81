"""Color-scheme synthesis for syntax highlighting on a fixed background.

A scheme assigns one RGB color to each of 27 abstract token classes;
colors come from the lattice spanned by a three-level channel pool,
giving 27 options per color. The objective rewards contrast against the
background (saturating at the 7:1 ratio) and penalizes palettes with
more than five distinct colors.
"""

from __future__ import annotations

from itertools import product

from ..registry import ComponentModule, ConstantEntry, ConstructorEntry
from .base import BenchmarkCase, case_from_module

Rgb = tuple[int, int, int]


def _check_rgb(color: Rgb) -> Rgb:
    if len(color) != 3 or any(not 0 <= int(c) <= 255 for c in color):
        raise ValueError(f"channels must lie in 0..255: {color!r}")
    return (int(color[0]), int(color[1]), int(color[2]))


def _linearize(channel: int) -> float:
    s = channel / 255.0
    return s / 12.92 if s <= 0.03928 else ((s + 0.055) / 1.055) ** 2.4


_LINEAR = tuple(_linearize(c) for c in range(256))


def relative_luminance(color: Rgb) -> float:
    r, g, b = _check_rgb(color)
    return 0.2126 * _LINEAR[r] + 0.7152 * _LINEAR[g] + 0.0722 * _LINEAR[b]


def contrast_ratio(a: Rgb, b: Rgb) -> float:
    """WCAG relative-luminance contrast, in [1, 21]."""
    la = relative_luminance(a)
    lb = relative_luminance(b)
    lighter, darker = (la, lb) if la >= lb else (lb, la)
    return (lighter + 0.05) / (darker + 0.05)


def parse_hex_color(text: str) -> Rgb:
    s = text.strip().lstrip("#")
    if len(s) != 6:
        raise ValueError(f"expected RRGGBB hex color, got {text!r}")
    try:
        return _check_rgb((int(s[0:2], 16), int(s[2:4], 16), int(s[4:6], 16)))
    except ValueError as exc:
        raise ValueError(f"expected RRGGBB hex color, got {text!r}") from exc


def _hex(color: Rgb) -> str:
    return "#%02x%02x%02x" % _check_rgb(color)


def scheme_objective(background: Rgb, saturation: float = 7.0, palette_limit: int = 5):
    def fitness(scheme: tuple[Rgb, ...]) -> float:
        contrast = sum(
            min(contrast_ratio(color, background), saturation) / saturation for color in scheme
        )
        distinct = len(set(scheme))
        return contrast - 0.5 * max(0, distinct - palette_limit)

    return fitness


DEFAULT_CLASS_COUNT = 27
DEFAULT_LEVELS = (0, 127, 255)


def scheme_case(
    background: Rgb = (0, 0, 0),
    class_count: int = DEFAULT_CLASS_COUNT,
    levels: tuple[int, ...] = DEFAULT_LEVELS,
) -> BenchmarkCase:
    if class_count < 1:
        raise ValueError("need at least one token class")
    background = _check_rgb(background)
    # One constant per lattice color rather than per channel level: with a
    # single shared level sort every level rule occurs in every scheme, so
    # pheromone deposits saturate all of them identically and the ant
    # cannot express any color preference at all.
    colors = tuple(_check_rgb(c) for c in product(levels, repeat=3))
    constants = tuple(ConstantEntry("c%02x%02x%02x" % c, "Color", c) for c in colors)
    module = ComponentModule(
        constructors=(
            ConstructorEntry(
                "scheme", "Scheme", ("Color",) * class_count, lambda *cs: tuple(cs)
            ),
        ),
        constants=constants,
        target_sort="Scheme",
    )
    return case_from_module("syntax", module, scheme_objective(background))


def render_stylesheet(scheme: tuple[Rgb, ...], background: Rgb) -> str:
    """One rule per token class plus a background rule, ordered by class
    index, lowercase hex colors."""
    lines = [f".background {{ background-color: {_hex(background)}; }}"]
    for i, color in enumerate(scheme):
        lines.append(f".tok{i:02d} {{ color: {_hex(color)}; }}")
    return "\n".join(lines) + "\n"
