import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd

from .config.settings import DEFAULT_THREADS, STEP_ERROR_SAMPLES, THREADS_ENV_VAR
from .exceptions import DivergenceError
from .models.grid import Grid, TimeGrid
from .models.problem import Method, MethodConfig, Problem, Trajectory
from .models.report import BenchRow, ErrorReport, RunConfig
from .services.benchmarks import table_rows
from .services.integrator import estimate_step_error
from .services.integrator import run as integrate
from .services.lattice import build_grid
from .services.metrics import evaluate, sigma_deviation
from .services.problems import get_problem
from .utils.json_utils import reports_to_frame, save_report, save_surface, surface_frame

logger = logging.getLogger(__name__)


def default_threads() -> int:
    """Thread count from the environment, DEFAULT_THREADS when unset or invalid."""
    value = os.environ.get(THREADS_ENV_VAR)
    if value is None:
        return DEFAULT_THREADS
    try:
        threads = int(value)
    except ValueError:
        logger.warning(f"Ignoring {THREADS_ENV_VAR}={value!r}, not an integer")
        return DEFAULT_THREADS
    return max(1, threads)


class SolverManager:
    """Manager class for solver runs."""

    def __init__(self, config: Optional[RunConfig] = None, threads: Optional[int] = None):
        """Initialize the solver manager."""
        self.config = config
        self.threads = threads if threads is not None else default_threads()
        self.problem: Optional[Problem] = None
        self.grid: Optional[Grid] = None
        self.method_config: Optional[MethodConfig] = None
        self.trajectory: Optional[Trajectory] = None
        self.last_report: Optional[ErrorReport] = None

    def build(self, config: Optional[RunConfig] = None) -> Tuple[Problem, Grid, MethodConfig]:
        """
        Resolve a run configuration into a problem, its grid and the method settings.

        Args:
            config: Configuration to resolve, the manager's own when None

        Returns:
            (problem, grid, method_config)
        """
        config = config or self.config
        if config is None:
            raise ValueError("No run configuration given")
        problem = get_problem(config.problem, config.boundary)
        points = config.points or problem.default_points
        steps = config.steps or problem.default_steps
        grid = build_grid(problem.interval, points, problem.boundary)
        t_start, t_end = problem.time_window
        method_config = MethodConfig(
            method=config.method,
            time=TimeGrid(t_start, t_end, steps, config.observe_every),
            iterations=config.iterations,
            ensemble_size=config.ensemble,
            rng_seed=config.seed,
            threads=self.threads,
        )
        return problem, grid, method_config

    def run(self, config: Optional[RunConfig] = None) -> ErrorReport:
        """
        Integrate one configuration and compare it with the exact result.

        A diverging run gives a report with diverged=True and an infinite error.
        """
        config = config or self.config
        problem, grid, method_config = self.build(config)
        report = dict(
            problem=problem.name,
            method=method_config.method.value,
            boundary=problem.boundary.label(),
            dt=method_config.time.dt,
            dx=grid.spacings[0],
        )
        try:
            trajectory = integrate(problem, grid, method_config)
        except DivergenceError as e:
            logger.warning(f"{problem.name} ({report['boundary']}, {report['method']}) diverged at step {e.step}")
            self.problem, self.grid, self.trajectory = problem, grid, e.partial
            self.method_config = method_config
            seconds = e.partial.wall_seconds if e.partial is not None else 0.0
            self.last_report = ErrorReport(error=float("inf"), seconds=seconds, diverged=True, **report)
            return self.last_report

        error = evaluate(problem, grid, trajectory, config.normalization)
        self.problem, self.grid, self.trajectory = problem, grid, trajectory
        self.method_config = method_config
        self.last_report = ErrorReport(error=error, seconds=trajectory.wall_seconds, **report)
        logger.info(f"{problem.name} ({report['boundary']}, {report['method']}): error {error:.3e}")
        return self.last_report

    def report(self) -> Optional[ErrorReport]:
        """The report of the last run, None before any run."""
        return self.last_report

    def surface(self) -> pd.DataFrame:
        """Solution surface of the last run."""
        if self.trajectory is None or self.grid is None:
            raise ValueError("No trajectory to tabulate, run first")
        return surface_frame(self.trajectory, self.grid)

    def save(self) -> None:
        """Save the last report, and the surface when the configuration names a path for it."""
        if self.last_report is None:
            raise ValueError("No report to save, run first")
        save_report(self.last_report, self.config.report_path if self.config else None)
        if self.config is not None and self.config.surface_path:
            save_surface(self.surface(), self.config.surface_path)

    def statistics(self) -> Dict[str, float]:
        """
        Ensemble statistics of the last stochastic run, empty for deterministic or diverged runs.

        Returns:
            sampling_error: largest standard error of the observable mean
            step_error: largest change of the observable series when the step is halved,
                over the first STEP_ERROR_SAMPLES trajectories
            sigma_deviation: largest |mean - expectation| in standard errors, for FIP runs
                of problems with a lattice expectation
        """
        if self.last_report is None or self.method_config is None:
            raise ValueError("No run to summarize, run first")
        trajectory = self.trajectory
        if self.last_report.diverged or trajectory is None or trajectory.sampling_error is None:
            return {}
        stats = {"sampling_error": float(np.max(trajectory.sampling_error))}
        subset = replace(self.method_config,
                         ensemble_size=min(self.method_config.ensemble_size, STEP_ERROR_SAMPLES))
        stats["step_error"] = estimate_step_error(self.problem, self.grid, subset)
        if self.problem.lattice_observable is not None and self.method_config.method == Method.FIP:
            expected = self.problem.lattice_observable(trajectory.times, self.grid, self.method_config.time.dt)
            stats["sigma_deviation"] = sigma_deviation(np.real(trajectory.observables), trajectory.sampling_error,
                                                       expected)
        logger.info(f"{self.problem.name}: sampling error {stats['sampling_error']:.3e}, "
                    f"step error {stats['step_error']:.3e}")
        return stats

    def bench(self, table_id: int, samples: Optional[int] = None,
              normalization: Optional[str] = None) -> pd.DataFrame:
        """
        Reproduce every row of a table.

        Args:
            table_id: Table number, 1 to 10
            samples: Trajectory count for the stochastic table
            normalization: Error normalization, the configured default when None

        Returns:
            DataFrame with one row per run, in table order
        """
        rows = table_rows(table_id, samples, normalization)
        workers = min(self.threads, len(rows))
        inner_threads = self.threads if workers == 1 else 1

        def run_row(row: BenchRow) -> BenchRow:
            manager = SolverManager(row.config, threads=inner_threads)
            report = manager.run()
            logger.info(f"Table {row.table} row {row.row} {row.config.method}: {report.error:.3e} "
                        f"in {report.seconds:.2f}s")
            return replace(row, dt=report.dt, report=report, statistics=manager.statistics())

        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            rows = list(pool.map(run_row, rows))
        return reports_to_frame([row.report for row in rows], rows)
