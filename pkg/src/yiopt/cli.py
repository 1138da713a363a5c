"""Command line entry point: ``yiopt <subcommand> ...``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from dataclasses import replace
from pathlib import Path

import yaml

from .benchmarks import BASE_FUNCTIONS, DEFAULT_SUITE, SMOKE_SUITE, read_manifest
from .harness import (ALGORITHMS, ConfigError, SweepSpec, export_traces, load_config,
                      load_results, run_experiment, run_sweep, write_summary)

SMOKE_BUDGET_MULTIPLIER = 200
SMOKE_REPETITIONS = 5


def _config(args):
    config = load_config(args.config)
    changes = {}
    if args.out:
        changes["output"] = Path(args.out)
    if args.workers:
        changes["workers"] = args.workers
    if args.smoke:
        changes["budget_multiplier"] = min(config.budget_multiplier, SMOKE_BUDGET_MULTIPLIER)
        changes["repetitions"] = min(config.repetitions, SMOKE_REPETITIONS)
    return replace(config, **changes)


def _number(text: str):
    value = yaml.safe_load(text)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    return value


def cmd_run(args) -> int:
    results = run_experiment(_config(args))
    if results.failures:
        print(f"{len(results.failures)} run(s) failed; see "
              f"{results.config.output / 'failures.json'}", file=sys.stderr)
        return 1
    print((results.config.output / "tables" / "summary.tsv").read_text(), end="")
    return 0


def cmd_sweep(args) -> int:
    values = tuple(_number(v) for v in args.values.split(","))
    report = run_sweep(_config(args), SweepSpec(args.param, values))
    print(report.to_tsv(), end="")
    return 0


def cmd_table(args) -> int:
    results = load_results(args.out)
    write_summary(results)
    print(results.table().to_tsv(), end="")
    return 0


def cmd_traces(args) -> int:
    mode = "fraction-of-budget" if args.normalize else "raw"
    for path in export_traces(load_results(args.out), mode, args.points):
        print(path)
    return 0


def cmd_list_problems(args) -> int:
    if args.manifest:
        entries = read_manifest(args.manifest)
    else:
        entries = DEFAULT_SUITE if args.suite == "default" else SMOKE_SUITE
    print("# problem_id base dim suite_seed bias transform")
    for e in entries:
        print(e.problem_id, e.base, e.dim, e.suite_seed, e.bias, e.transform)
    print("# base functions:", " ".join(BASE_FUNCTIONS))
    return 0


def cmd_list_algorithms(args) -> int:
    for name, (_, cls, fixed) in ALGORITHMS.items():
        defaults = {f.name: f.default for f in dataclasses.fields(cls) if f.name not in fixed}
        print(name, " ".join(f"{k}={v}" for k, v in defaults.items()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="yiopt", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def experiment_args(p):
        p.add_argument("--config", required=True, help="YAML experiment config")
        p.add_argument("--out", help="output directory (overrides the config)")
        p.add_argument("--workers", type=int, help="parallel worker processes")
        p.add_argument("--smoke", action="store_true",
                       help=f"cap budget at {SMOKE_BUDGET_MULTIPLIER}*D and reps at "
                            f"{SMOKE_REPETITIONS}")

    p = sub.add_parser("run", help="run an experiment")
    experiment_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="sensitivity sweep of one YI parameter")
    experiment_args(p)
    p.add_argument("--param", required=True)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("table", help="rebuild the summary table from records")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("traces", help="export convergence curves")
    p.add_argument("--out", required=True)
    p.add_argument("--normalize", action="store_true", help="abscissa as budget fraction")
    p.add_argument("--points", type=int, default=201)
    p.set_defaults(func=cmd_traces)

    p = sub.add_parser("list-problems", help="show a suite manifest")
    p.add_argument("--suite", choices=("default", "smoke"), default="default")
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_list_problems)

    p = sub.add_parser("list-algorithms", help="show algorithms and default parameters")
    p.set_defaults(func=cmd_list_algorithms)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
