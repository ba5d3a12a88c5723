#!/usr/bin/env python3
"""
Example script comparing the three integration methods on the heat equation.
This script shows how to use the solver manager to run a problem and read back its error report.
"""

import logging
import json

from spectral_pde.solver_manager import SolverManager
from spectral_pde.models.report import RunConfig
from spectral_pde.utils.json_utils import report_to_dict

# Configure logging
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def main():
    manager = SolverManager()

    # Heat equation with zero Dirichlet ends, dt = 1/1000
    for method in ("fd", "fsd", "fip"):
        config = RunConfig(problem="heat_zero", method=method, boundary="DD", steps=1000)
        report = manager.run(config)
        logger.info(f"{method.upper()}: error {report.error:.3e} in {report.seconds:.3f}s")

    # Large steps: only the interaction picture stays stable
    report = manager.run(RunConfig(problem="heat_zero", method="fsd", boundary="DD", steps=10))
    logger.info(f"FSD at dt = 1/10 diverged: {report.diverged}")

    # A time-dependent boundary problem, saved with its solution surface
    config = RunConfig(problem="soliton", method="fsd", boundary="DN", steps=2000,
                       observe_every=20, surface_path="data/soliton_surface.csv")
    manager = SolverManager(config)
    report = manager.run()
    manager.save()

    logger.info("Soliton Report:")
    logger.info(json.dumps(report_to_dict(report), indent=4))


if __name__ == "__main__":
    main()
