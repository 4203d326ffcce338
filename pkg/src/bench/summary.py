"""
Summary tables computed from per-run trace CSVs alone.
"""

from pathlib import Path
import os
import re

import numpy as np
import pandas as pd
from rich.console import Console
from rich.table import Table

from acdm.trace import ConvergenceTrace
from config import SETTINGS

RUN_FILE = re.compile(r"^(?P<method>.+)__seed(?P<seed>-?\d+)\.csv$")
SUMMARY_FILE = "summary.csv"


def run_filename(method: str, seed: int) -> str:
    return f"{method}__seed{seed}.csv"


def run_rows(out_dir, tolerance: float) -> pd.DataFrame:
    """One row per run file: iterations to tolerance * initial gap, final gap, wall time."""
    rows = []
    for path in sorted(Path(out_dir).glob("*__seed*.csv")):
        match = RUN_FILE.match(path.name)
        if match is None:
            continue
        trace = ConvergenceTrace.from_csv(path)
        reached = trace.iterations_to(tolerance)
        rows.append(
            {
                "method": match.group("method"),
                "seed": int(match.group("seed")),
                "iterations": trace.k[-1] if len(trace) else 0,
                "iterations_to_tol": np.nan if reached is None else reached,
                "final_gap": trace.final_gap,
                "wall_s": (trace.wall_ns[-1] if len(trace) else 0) / 1e9,
            }
        )
    return pd.DataFrame(rows, columns=["method", "seed", "iterations", "iterations_to_tol", "final_gap", "wall_s"])


def summarize(out_dir, tolerance: float | None = None, write: bool = True) -> pd.DataFrame:
    """Aggregate per method and write summary.csv next to the run files."""
    tolerance = SETTINGS.summary_tolerance if tolerance is None else tolerance
    runs = run_rows(out_dir, tolerance)
    if runs.empty:
        raise FileNotFoundError(f"no run files (*__seed*.csv) in {out_dir}")
    grouped = runs.groupby("method", sort=True)
    summary = pd.DataFrame(
        {
            "runs": grouped.size(),
            "reached": grouped["iterations_to_tol"].count(),
            "mean_iterations_to_tol": grouped["iterations_to_tol"].mean(),
            "median_iterations_to_tol": grouped["iterations_to_tol"].median(),
            "mean_final_gap": grouped["final_gap"].mean(),
            "mean_wall_s": grouped["wall_s"].mean(),
        }
    ).reset_index()
    summary.insert(1, "tolerance", tolerance)
    if write:
        path = Path(out_dir) / SUMMARY_FILE
        tmp = path.with_name(f".{path.name}.tmp")
        summary.to_csv(tmp, index=False, float_format=f"%.{SETTINGS.csv_digits}g", na_rep="", lineterminator="\n")
        os.replace(tmp, path)
    return summary


def render_summary(summary: pd.DataFrame, console: Console | None = None) -> None:
    console = console or Console()
    table = Table(title=f"Iterations to {summary['tolerance'].iloc[0]:.0e} x initial gap")
    table.add_column("method", style="cyan")
    table.add_column("runs", justify="right")
    table.add_column("reached", justify="right")
    table.add_column("mean iters", justify="right")
    table.add_column("median iters", justify="right")
    table.add_column("mean final gap", justify="right")
    table.add_column("mean wall (s)", justify="right")
    for row in summary.itertuples(index=False):
        table.add_row(
            row.method,
            str(row.runs),
            str(row.reached),
            "-" if pd.isna(row.mean_iterations_to_tol) else f"{row.mean_iterations_to_tol:.1f}",
            "-" if pd.isna(row.median_iterations_to_tol) else f"{row.median_iterations_to_tol:.1f}",
            f"{row.mean_final_gap:.3e}",
            f"{row.mean_wall_s:.3f}",
        )
    console.print(table)
