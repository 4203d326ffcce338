"""
Experiment runner: every (method, seed) pair runs independently and writes
its own trace CSV atomically; the summary is recomputed from those files.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
import logging

import pandas as pd

from bench.loader import ProblemLoader
from bench.methods import RunRequest, check_method, run_method
from bench.spec import ExperimentSpec
from bench.summary import run_filename, summarize

logger = logging.getLogger(__name__)


@dataclass
class ExperimentResult:
    output: Path
    files: list[Path]
    summary: pd.DataFrame


def run_experiment(spec: ExperimentSpec, output=None, threads: int | None = None,
                   loader: ProblemLoader | None = None) -> ExperimentResult:
    loader = loader or ProblemLoader()
    problem = loader.load(spec.problem)
    # Reject unknown or inapplicable methods before writing anything
    for method in spec.methods:
        check_method(method.name, problem.kind)

    out_dir = Path(output) if output is not None else spec.output
    out_dir.mkdir(parents=True, exist_ok=True)
    threads = threads or spec.threads

    jobs = [(method, seed) for method in spec.methods for seed in spec.seeds]

    def execute(job) -> Path:
        method, seed = job
        request = RunRequest(problem, method.options, seed, spec.max_iters, spec.record_stride)
        trace = run_method(method.name, request)
        path = out_dir / run_filename(method.key, seed)
        trace.to_csv(path)
        logger.info("%s seed %d: %d records, final gap %.3e", method.key, seed, len(trace), trace.final_gap)
        return path

    if threads == 1:
        files = [execute(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            files = list(pool.map(execute, jobs))

    summary = summarize(out_dir, spec.tolerance)
    return ExperimentResult(out_dir, files, summary)
