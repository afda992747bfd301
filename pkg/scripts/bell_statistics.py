"""Joint-outcome frequencies for Z on each qubit of a Bell state, across seeds.

For every seed the simultaneous measurement is sampled ``--samples`` times;
the script reports the correlated frequencies, the count of mixed-sign
outcomes and how far the (+1, +1) frequency lies from 1/2 in units of the
binomial standard deviation.
"""

from __future__ import annotations

import argparse
import math

import numpy as np

from overmeasure.linalg import kron
from overmeasure.observables import from_matrix
from overmeasure.premeasurement import SimultaneousMeasurement
from overmeasure.rng import SplitMix64

Z = np.diag([1.0, -1.0])
I2 = np.eye(2)
BELL = np.array([1, 0, 0, 1]) / math.sqrt(2)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=10_000)
    parser.add_argument("--seeds", type=int, default=20, help="seeds 0..N-1")
    opts = parser.parse_args()

    sm = SimultaneousMeasurement(from_matrix(kron(Z, I2)), from_matrix(kron(I2, Z)), BELL)
    sigma = math.sqrt(0.25 / opts.samples)
    print(f"{'seed':>5} {'(+,+)':>8} {'(-,-)':>8} {'mixed':>6} {'z':>7}")
    zs = []
    for seed in range(opts.seeds):
        rng = SplitMix64(seed)
        counts: dict[tuple[float, float], int] = {}
        for _ in range(opts.samples):
            key = sm.values_of(sm.draw_index(rng))
            counts[key] = counts.get(key, 0) + 1
        pp = counts.get((1.0, 1.0), 0) / opts.samples
        mm = counts.get((-1.0, -1.0), 0) / opts.samples
        mixed = sum(n for (a, b), n in counts.items() if a != b)
        z = (pp - 0.5) / sigma
        zs.append(z)
        print(f"{seed:>5} {pp:>8.4f} {mm:>8.4f} {mixed:>6} {z:>7.2f}")
    print(f"mean z {np.mean(zs):.3f}, sd z {np.std(zs):.3f} (expect about 0 and 1)")


if __name__ == "__main__":
    main()
