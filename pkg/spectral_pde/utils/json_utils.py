import json
import logging
import math
import os
from dataclasses import asdict, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from ..config.settings import BENCH_FILE, DATA_DIR, REPORT_FILE, SURFACE_FILE
from ..models.grid import Grid
from ..models.problem import Trajectory
from ..models.report import BenchRow, ErrorReport, RunConfig

logger = logging.getLogger(__name__)

REPORT_COLUMNS = [f.name for f in fields(ErrorReport)]
BENCH_COLUMNS = ["table", "row", "boundary", "dt", "method", "error", "seconds", "published"]
# Extra columns of stochastic rows: largest standard error, step-halving change, and the
# largest deviation of the ensemble mean from its lattice expectation in standard errors
STATISTIC_COLUMNS = ["sampling_error", "step_error", "sigma_deviation"]
SURFACE_COLUMNS = ["t", "x", "component", "re", "im"]


def _default_path(file_name: str) -> Path:
    data_dir = Path(DATA_DIR)
    data_dir.mkdir(exist_ok=True)
    return data_dir / file_name


def report_to_dict(report: ErrorReport) -> Dict[str, Any]:
    """
    Convert an ErrorReport to a dictionary for JSON serialization.

    A non-finite error (a diverged run) is written as null so that the output is strict JSON.
    """
    data = asdict(report)
    if not math.isfinite(data["error"]):
        data["error"] = None
    return data


def dict_to_report(data: Dict[str, Any]) -> ErrorReport:
    """Convert a dictionary to an ErrorReport."""
    return ErrorReport(
        problem=str(data["problem"]),
        method=str(data["method"]),
        boundary=str(data["boundary"]),
        dt=float(data["dt"]),
        dx=float(data["dx"]),
        error=float("inf") if data["error"] is None else float(data["error"]),
        seconds=float(data["seconds"]),
        diverged=bool(data.get("diverged", False)),
    )


def save_report(report: ErrorReport, file_path: Optional[str] = None) -> Path:
    """Save a report to a JSON file."""
    if file_path is None:
        file_path = _default_path(REPORT_FILE)

    with open(file_path, 'w', encoding='utf-8') as f:
        json.dump(report_to_dict(report), f, ensure_ascii=False, indent=4, allow_nan=False)
    return Path(file_path)


def load_report(file_path: Optional[str] = None) -> Optional[ErrorReport]:
    """Load a report from a JSON file, None if there is none."""
    if file_path is None:
        file_path = Path(DATA_DIR) / REPORT_FILE

    if not os.path.exists(file_path):
        return None

    with open(file_path, 'r', encoding='utf-8') as f:
        data = json.load(f)

    return dict_to_report(data)


def dict_to_run_config(data: Dict[str, Any]) -> RunConfig:
    """Build a RunConfig from a dictionary; unknown keys are ignored with a warning."""
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        logger.warning(f"Ignoring unknown config keys: {', '.join(unknown)}")
    return RunConfig(**{key: value for key, value in data.items() if key in known})


def save_run_config(config: RunConfig, file_path: str) -> None:
    with open(file_path, 'w', encoding='utf-8') as f:
        json.dump(asdict(config), f, ensure_ascii=False, indent=4)


def load_run_config(file_path: str, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Load a run configuration file.

    Args:
        file_path: JSON file whose keys are RunConfig field names
        overrides: Values that replace the file's (None values are skipped)

    Returns:
        RunConfig

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: If the file is not valid JSON or has invalid values
    """
    with open(file_path, 'r', encoding='utf-8') as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"Invalid config file {file_path}: {e}") from e
    if not isinstance(data, dict):
        raise ValueError(f"Config file {file_path} must hold a JSON object")
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    return dict_to_run_config(data)


def reports_to_frame(reports: List[ErrorReport], rows: Optional[List[BenchRow]] = None) -> pd.DataFrame:
    """
    Tabulate reports; with bench rows the table/row labels and published errors are added,
    followed by the ensemble statistics of stochastic rows.
    """
    frame = pd.DataFrame([asdict(r) for r in reports], columns=REPORT_COLUMNS)
    if rows is not None:
        frame.insert(0, "table", [row.table for row in rows])
        frame.insert(1, "row", [row.row for row in rows])
        frame["published"] = [row.published for row in rows]
        for column in STATISTIC_COLUMNS:
            if any(column in row.statistics for row in rows):
                frame[column] = [row.statistics.get(column, np.nan) for row in rows]
    return frame


def bench_columns(frame: pd.DataFrame) -> List[str]:
    """Printed columns of a reproduced table."""
    return BENCH_COLUMNS + [column for column in STATISTIC_COLUMNS if column in frame.columns]


def frame_to_reports(frame: pd.DataFrame) -> List[ErrorReport]:
    return [dict_to_report(record) for record in frame[REPORT_COLUMNS].to_dict(orient="records")]


def save_bench_table(frame: pd.DataFrame, file_path: Optional[str] = None) -> Path:
    if file_path is None:
        file_path = _default_path(BENCH_FILE)
    frame.to_csv(file_path, index=False)
    return Path(file_path)


def load_bench_table(file_path: Optional[str] = None) -> pd.DataFrame:
    if file_path is None:
        file_path = Path(DATA_DIR) / BENCH_FILE
    return pd.read_csv(file_path, float_precision="round_trip", dtype={"row": str, "boundary": str})


def surface_frame(trajectory: Trajectory, grid: Grid) -> pd.DataFrame:
    """Long-format solution surface with columns t, x, component, re, im."""
    history = np.asarray(trajectory.fields)
    n_times, n_components, n_points = history.shape[0], history.shape[1], grid.shape[0]
    t = np.repeat(trajectory.times, n_components * n_points)
    component = np.tile(np.repeat(np.arange(n_components), n_points), n_times)
    x = np.tile(grid.coordinates(0), n_times * n_components)
    values = history.reshape(-1)
    return pd.DataFrame({"t": t, "x": x, "component": component, "re": values.real, "im": values.imag},
                        columns=SURFACE_COLUMNS)


def save_surface(frame: pd.DataFrame, file_path: Optional[str] = None) -> Path:
    if file_path is None:
        file_path = _default_path(SURFACE_FILE)
    frame.to_csv(file_path, index=False)
    return Path(file_path)
