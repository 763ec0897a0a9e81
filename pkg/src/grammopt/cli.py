"""Command-line interface.

Subcommands:
  bench      run one case study and write JSON/CSV results
  stats      recompute summaries and p-values from a results file
  highlight  search for a color scheme and write it as a style sheet

Exit codes: 0 success, 1 usage error (including bad parameter values),
2 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from random import Random

from .benchmarks import CASE_NAMES, get_case, parse_hex_color, render_stylesheet
from .harness import (
    ExperimentSpec,
    derive_seed,
    emit_results,
    parse_results,
    rank_test,
    run_experiment,
    summarize,
    group_records,
)
from .heuristics import HEURISTIC_NAMES, GrantParams, SearchBudget, run_heuristic
from .semantics import compose_objective, evaluate


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse default exits with code 2
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="grammopt", description=__doc__.split("\n\n")[0])
    commands = parser.add_subparsers(dest="command", required=True)

    bench = commands.add_parser("bench", help="run one case study")
    bench.add_argument("case", choices=CASE_NAMES)
    bench.add_argument(
        "--heuristics",
        default="grant,grevo,random",
        help="comma-separated subset of grant,grevo,random",
    )
    bench.add_argument("--runs", type=int, default=10)
    bench.add_argument("--budget", type=int, default=1000)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--grid-step", type=float, help="branin grid step (default 0.05)")
    bench.add_argument("--grevo-ratio", help="population:generations, e.g. 100:10")
    bench.add_argument("--depth-cap", type=int, help="derivation depth cap override")
    bench.add_argument("--instance", help="subset instance: P01, P02, P03 or a file path")
    bench.add_argument("--load-seed", type=int, help="load seed for dheap/skiplist")
    bench.add_argument("--ops", type=int, help="dheap load length (default 5000)")
    bench.add_argument("--background", help="syntax background color RRGGBB")
    bench.add_argument("--out", default="-", help="output path, '-' for stdout")
    bench.add_argument("--format", choices=("json", "csv"), default="json")

    stats = commands.add_parser("stats", help="recompute statistics from a results file")
    stats.add_argument("path")

    highlight = commands.add_parser("highlight", help="emit a color-scheme style sheet")
    highlight.add_argument("--background", default="000000", help="RRGGBB hex color")
    highlight.add_argument("--out", required=True, help="style sheet output path")
    highlight.add_argument("--heuristic", choices=HEURISTIC_NAMES, default="grant")
    highlight.add_argument("--runs", type=int, default=10)
    highlight.add_argument("--budget", type=int, default=1000)
    highlight.add_argument("--seed", type=int, default=0)
    return parser


def _bench_params(args: argparse.Namespace) -> dict:
    params: dict = {}
    if args.grid_step is not None:
        if args.grid_step <= 0:
            raise _UsageError("--grid-step must be positive")
        params["grid_step"] = args.grid_step
    if args.grevo_ratio is not None:
        left, sep, right = args.grevo_ratio.partition(":")
        if not sep or not left.isdigit() or not right.isdigit():
            raise _UsageError(f"malformed --grevo-ratio {args.grevo_ratio!r}; expected P:G")
        params["grevo_ratio"] = args.grevo_ratio
    if args.depth_cap is not None:
        params["depth_cap"] = args.depth_cap
    if args.instance is not None:
        params["instance"] = args.instance
    if args.load_seed is not None:
        params["load_seed"] = args.load_seed
    if args.ops is not None:
        params["ops"] = args.ops
    if args.background is not None:
        parse_hex_color(args.background)  # validate early
        params["background"] = args.background
    return params


def _cmd_bench(args: argparse.Namespace) -> int:
    heuristics = tuple(h.strip() for h in args.heuristics.split(",") if h.strip())
    spec = ExperimentSpec(
        case=args.case,
        heuristics=heuristics,
        runs=args.runs,
        budget=args.budget,
        base_seed=args.seed,
        params=_bench_params(args),
    )
    records = run_experiment(spec)
    payload = emit_results(spec, records, args.format)
    if args.out == "-":
        sys.stdout.write(payload)
    else:
        Path(args.out).write_text(payload)
        print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    grouped = parse_results(Path(args.path).read_text())
    if not grouped:
        print("no records")
        return 0
    for name, values in grouped.items():
        n = len(values)
        avg = sum(values) / n
        var = sum((v - avg) ** 2 for v in values) / (n - 1) if n > 1 else 0.0
        print(f"{name}: n={n} avg={avg:.6g} max={max(values):.6g} var={var:.6g}")
    names = list(grouped)
    for i, first in enumerate(names):
        for second in names[i + 1 :]:
            if len(grouped[first]) >= 3 and len(grouped[second]) >= 3:
                p = rank_test(grouped[first], grouped[second])
                print(f"p[{first}_vs_{second}] = {p:.6g}")
    return 0


def _cmd_highlight(args: argparse.Namespace) -> int:
    background = parse_hex_color(args.background)
    case = get_case("syntax", {"background": background})
    best_fitness = float("-inf")
    best_tree = None
    for index in range(args.runs):
        seed = derive_seed(args.seed, args.heuristic, index)
        objective = compose_objective(case.semantics, case.objective)
        result = run_heuristic(
            args.heuristic,
            case.grammar,
            objective,
            SearchBudget(args.budget),
            Random(seed),
            grant_params=GrantParams(),
        )
        if result.best_fitness > best_fitness:
            best_fitness, best_tree = result.best_fitness, result.best_tree
    assert best_tree is not None
    scheme = evaluate(case.semantics, best_tree).payload
    Path(args.out).write_text(render_stylesheet(scheme, background))
    print(f"best fitness {best_fitness:.6g}; wrote {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"grammopt: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        return int(exc.code or 0)
    try:
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "stats":
            return _cmd_stats(args)
        if args.command == "highlight":
            return _cmd_highlight(args)
        raise _UsageError(f"unknown command {args.command!r}")
    except _UsageError as exc:
        print(f"grammopt: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"grammopt: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"grammopt: runtime error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"grammopt: runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
