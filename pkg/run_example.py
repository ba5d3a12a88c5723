#!/usr/bin/env python3
"""
Script to reproduce the error tables of the benchmark catalog.
Tables are given on the command line (all ten by default) and written to data/table<N>.csv.
"""

import os
import sys
import logging

# Add the project root to the Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from spectral_pde.services.benchmarks import TABLE_TITLES
from spectral_pde.solver_manager import SolverManager
from spectral_pde.utils.json_utils import BENCH_COLUMNS, save_bench_table

# Configure logging
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def main():
    tables = [int(arg) for arg in sys.argv[1:]] or sorted(TABLE_TITLES)
    manager = SolverManager()
    os.makedirs("data", exist_ok=True)

    for table_id in tables:
        logger.info(f"Reproducing table {table_id}: {TABLE_TITLES[table_id]}")
        frame = manager.bench(table_id)
        path = save_bench_table(frame, f"data/table{table_id}.csv")
        print(f"Table {table_id}: {TABLE_TITLES[table_id]}")
        print(frame[BENCH_COLUMNS].to_string(index=False))
        logger.info(f"Wrote {path}")


if __name__ == "__main__":
    main()
