"""Regenerate the CLI golden outputs in tests/golden.

Run from anywhere; commands execute with the repository root as the working
directory so that relative data paths match the ones the tests use.
"""

from __future__ import annotations

import argparse
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "tests" / "golden"

CASES = {
    "compat_z_x": ["compat", "data/pauli/z.yaml", "data/pauli/x.yaml"],
    "compat_zi_iz": ["compat", "data/pauli/zi.yaml", "data/pauli/iz.yaml"],
    "refine_zi_iz": ["refine", "data/pauli/zi.yaml", "data/pauli/iz.yaml"],
    "refine_zi_zz": ["refine", "data/pauli/zi.yaml", "data/pauli/zz.yaml"],
    "simulate_bell": [
        "simulate", "data/pauli/zi.yaml", "data/pauli/iz.yaml", "data/pauli/bell.yaml", "--seed", "42",
    ],
    "simulate_zero_plus": [
        "simulate", "data/pauli/zi.yaml", "data/pauli/iz.yaml", "data/pauli/zero_plus.yaml",
        "--seed", "42", "--samples", "1000",
    ],
}


def run(args: list[str]) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "overmeasure", *args], cwd=ROOT, capture_output=True, check=False
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--check", action="store_true", help="compare instead of writing")
    opts = parser.parse_args()
    GOLDEN.mkdir(parents=True, exist_ok=True)
    stale = []
    for name, args in CASES.items():
        out = run(args)
        path = GOLDEN / f"{name}.txt"
        body = out.stdout + f"[exit {out.returncode}]\n".encode()
        if opts.check:
            if not path.exists() or path.read_bytes() != body:
                stale.append(name)
        else:
            path.write_bytes(body)
            print(f"wrote {path.relative_to(ROOT)} (exit {out.returncode})")
    if stale:
        sys.exit(f"out of date: {', '.join(stale)}")


if __name__ == "__main__":
    main()
