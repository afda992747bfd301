"""Sweep the calibration and coarse-consistency checks over random observables.

Prints one line per dimension with the number of checks and failures, then
a summary. Exit status is 1 if any check failed.
"""

from __future__ import annotations

import argparse
import sys
import time

from overmeasure.audit import overmeasurement_suite
from overmeasure.cli import parse_dims


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", type=parse_dims, default=parse_dims("2..8"))
    parser.add_argument("--cases", type=int, default=50, help="observables per dimension")
    parser.add_argument("--trials", type=int, default=100, help="random sharp inputs per check")
    parser.add_argument("--max-terms", type=int, default=6)
    parser.add_argument("--seed", type=int, default=0)
    opts = parser.parse_args()

    failed = False
    start = time.perf_counter()
    for d in opts.dims:
        t = time.perf_counter()
        results = overmeasurement_suite([d], opts.cases, opts.seed, trials=opts.trials, max_terms=opts.max_terms)
        cells = "  ".join(f"{r.name}: {r.failures}/{r.cases}" for r in results)
        print(f"dim {d}: {cells}  ({time.perf_counter() - t:.2f} s)")
        failed |= not all(r.passed for r in results)
    print(f"total {time.perf_counter() - start:.1f} s; {'FAIL' if failed else 'PASS'}")
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
