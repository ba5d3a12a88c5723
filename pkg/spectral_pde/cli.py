"""
Command line interface.

    python -m spectral_pde run --problem heat_zero --method fip --boundary DD --steps 10
    python -m spectral_pde bench 1 --csv data/table1.csv
    python -m spectral_pde selftest --quick

Exit codes: 0 success, 1 a failed run or check, 2 a usage or configuration error.
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

from .config.settings import LOG_FORMAT, SUPPORTED_NORMALIZATIONS
from .exceptions import UnknownProblemError
from .models.report import RunConfig
from .services.benchmarks import TABLE_TITLES
from .services.problems import PROBLEMS
from .services.selftest import run_selftest
from .solver_manager import SolverManager
from .utils.json_utils import bench_columns, load_run_config, report_to_dict, save_bench_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

_RUN_FLAGS = ["problem", "method", "boundary", "points", "steps", "iterations", "ensemble", "seed",
              "observe_every", "report_path", "surface_path", "normalization"]


def _fail(error: Exception) -> int:
    message = error.args[0] if isinstance(error, KeyError) and error.args else str(error)
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _run_config(args: argparse.Namespace) -> RunConfig:
    values = {name: getattr(args, name) for name in _RUN_FLAGS}
    if args.config:
        return load_run_config(args.config, values)
    if not args.problem:
        raise ValueError("--problem is required without --config")
    return RunConfig(**{name: value for name, value in values.items() if value is not None})


def cmd_run(args: argparse.Namespace) -> int:
    """Run one problem/method/boundary combination and write its report."""
    try:
        config = _run_config(args)
        manager = SolverManager(config, threads=args.threads)
        report = manager.run()
        manager.save()
    except (UnknownProblemError, ValueError, OSError) as e:
        return _fail(e)

    print(json.dumps(report_to_dict(report), indent=4, allow_nan=False))
    return EXIT_FAILED if report.diverged else EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    """Reproduce one table and print it."""
    try:
        manager = SolverManager(threads=args.threads)
        frame = manager.bench(args.table, samples=args.samples, normalization=args.normalization)
    except (UnknownProblemError, ValueError) as e:
        return _fail(e)

    print(f"Table {args.table}: {TABLE_TITLES[args.table]}")
    print(frame[bench_columns(frame)].to_string(index=False))
    if args.csv:
        try:
            save_bench_table(frame, args.csv)
        except OSError as e:
            return _fail(e)
        logger.info(f"Wrote {args.csv}")
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    """Run the property suites."""
    results = run_selftest(quick=args.quick)
    for result in results:
        status = "ok" if result.passed else "FAILED"
        print(f"{result.name:20s} {status:6s} {result.seconds:8.3f}s  {result.detail}")
    total = sum(r.seconds for r in results)
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed in {total:.3f}s")
    return EXIT_FAILED if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spectral_pde", description="Non-periodic Fourier PDE/SPDE solver")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run one problem")
    run.add_argument("--problem", choices=sorted(PROBLEMS), help="Problem id")
    run.add_argument("--method", choices=["fip", "fsd", "fd"], help="Integration method")
    run.add_argument("--boundary", help="Boundary label, e.g. DD, DN or DD;NN")
    run.add_argument("--points", type=int, help="Spatial points N")
    run.add_argument("--steps", type=int, help="Time steps")
    run.add_argument("--iterations", type=int, help="Midpoint iterations")
    run.add_argument("--ensemble", type=int, help="Trajectories for stochastic problems")
    run.add_argument("--seed", type=int, help="Noise seed")
    run.add_argument("--observe-every", dest="observe_every", type=int, help="Steps between stored samples")
    run.add_argument("--config", help="JSON file with RunConfig fields")
    run.add_argument("--report", dest="report_path", help="Report JSON path")
    run.add_argument("--surface", dest="surface_path", help="Solution surface CSV path")
    run.add_argument("--normalization", choices=SUPPORTED_NORMALIZATIONS, help="Error normalization")
    run.add_argument("--threads", type=int, help="Worker threads")
    run.set_defaults(handler=cmd_run)

    bench = commands.add_parser("bench", help="Reproduce an error table")
    bench.add_argument("table", type=int, help="Table number, 1 to 10")
    bench.add_argument("--samples", type=int, help="Trajectories for the stochastic table")
    bench.add_argument("--csv", help="Write the table to this CSV file")
    bench.add_argument("--threads", type=int, help="Worker threads")
    bench.add_argument("--normalization", choices=SUPPORTED_NORMALIZATIONS, help="Error normalization")
    bench.set_defaults(handler=cmd_bench)

    selftest = commands.add_parser("selftest", help="Run the property suites")
    selftest.add_argument("--quick", action="store_true", help="Smaller sizes")
    selftest.set_defaults(handler=cmd_selftest)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
