"""
Command-line entry point for the coordinate-descent benchmark.

    python src/main.py run --spec experiment.toml [--out DIR] [--seeds a..b] [--threads K]
    python src/main.py gen spd --n 100 --spectrum geometric --cond 100 [--out DIR] [--seed S]
    python src/main.py summarize --out DIR [--tolerance T]

Exit codes: 0 success, 1 input error, 2 numerical abort.
"""

import sys
import os

# Path-style package imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import argparse
import logging
from pathlib import Path

import toml
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler

from config import SETTINGS
from core.errors import InvalidInputError, NumericalAbortError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2

console = Console()
logger = logging.getLogger("bench")


def _coerce(value: str):
    for kind in (int, float):
        try:
            return kind(value)
        except ValueError:
            pass
    lowered = value.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    return value


def parse_params(tokens: list[str]) -> dict:
    """Turn ['--n', '100', '--cond', '1e2'] into {'n': 100, 'cond': 100.0}."""
    params = {}
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if not token.startswith("--") or i + 1 >= len(tokens):
            raise InvalidInputError(f"expected '--name value' pairs, got {token!r}")
        params[token[2:].replace("-", "_")] = _coerce(tokens[i + 1])
        i += 2
    return params


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="acdm-bench", description="Coordinate descent benchmark harness")
    parser.add_argument("--log-level", default=SETTINGS.log_level)
    verbs = parser.add_subparsers(dest="verb", required=True)

    run = verbs.add_parser("run", help="run an experiment spec")
    run.add_argument("--spec", required=True, help="experiment TOML file")
    run.add_argument("--out", help="output directory (overrides the experiment file)")
    run.add_argument("--seeds", help="seed range a..b (overrides the experiment file)")
    run.add_argument("--threads", type=int, help="concurrent runs")

    gen = verbs.add_parser("gen", help="generate a problem; extra --name value pairs are generator parameters")
    gen.add_argument("generator")
    gen.add_argument("--out", default="problem", help="output directory")
    gen.add_argument("--seed", type=int, default=0)

    summarize = verbs.add_parser("summarize", help="recompute summary.csv from run files")
    summarize.add_argument("--out", required=True, help="directory holding the run CSVs")
    summarize.add_argument("--tolerance", type=float, default=SETTINGS.summary_tolerance)
    return parser


def cmd_run(args) -> int:
    from bench.runner import run_experiment
    from bench.spec import ExperimentSpec
    from bench.summary import render_summary

    spec = ExperimentSpec.from_toml(args.spec)
    if args.seeds:
        spec = ExperimentSpec(**{**spec.model_dump(), "seeds": args.seeds})
    console.print(f"[bold]Running[/bold] {len(spec.methods)} method(s) x {len(spec.seeds)} seed(s)")
    result = run_experiment(spec, output=args.out, threads=args.threads)
    render_summary(result.summary, console)
    console.print(f"Wrote {len(result.files)} trace(s) to {result.output}")
    return EXIT_OK


def cmd_gen(args, extra: list[str]) -> int:
    from bench.generators import generate_problem

    problem = generate_problem(args.generator, parse_params(extra), args.seed)
    paths = problem.write(Path(args.out))
    for path in paths:
        console.print(f"  {path}")
    return EXIT_OK


def cmd_summarize(args) -> int:
    from bench.summary import render_summary, summarize

    render_summary(summarize(Path(args.out), args.tolerance), console)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    if extra and args.verb != "gen":
        parser.error(f"unrecognized arguments: {' '.join(extra)}")

    logging.basicConfig(
        level=args.log_level.upper(),
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )

    try:
        if args.verb == "run":
            return cmd_run(args)
        if args.verb == "gen":
            return cmd_gen(args, extra)
        return cmd_summarize(args)
    except NumericalAbortError as e:
        logger.error("numerical abort: %s", e)
        return EXIT_NUMERICAL
    except (InvalidInputError, FileNotFoundError, ValidationError, toml.TomlDecodeError) as e:
        logger.error("%s", e)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
