"""Command-line front end.

Exit codes: 0 affirmative verdict, 1 negative verdict, 2 usage, parse or
other operational error.
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from .audit import SUITES, run_suite
from .compatibility import (
    are_compatible,
    commutator_norm,
    maximal_common_refinement,
    multi_common_refinement,
    projector_commutators,
)
from .errors import NotCompatible, OvermeasureError
from .fileformat import fmt_real, format_observable, read_observable, read_state
from .linalg import Tolerance
from .observables import bell_number, coarsen_by_function, enumerate_coarsenings
from .premeasurement import SimultaneousMeasurement
from .rng import SplitMix64

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2

COARSENING_FUNCTIONS = {
    "square": (0, lambda: lambda x: x * x),
    "abs": (0, lambda: abs),
    "sign": (0, lambda: lambda x: float(np.sign(x))),
    "affine": (2, lambda a, b: lambda x: a * x + b),
}


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
        print(f"wrote {out}")


def _fmt_norm(x: float, tol: Tolerance) -> str:
    # values inside the equality tolerance are reported as exact zeros
    return f"{0.0 if x <= tol.eps_eq else x:.6e}"


def cmd_compat(args: argparse.Namespace, tol: Tolerance) -> int:
    o1 = read_observable(args.first, tol).observable
    o2 = read_observable(args.second, tol).observable
    if o1.dim != o2.dim:
        raise OvermeasureError(f"dimensions {o1.dim} and {o2.dim} differ")
    norms = projector_commutators(o1, o2)
    print(f"dim {o1.dim}; first observable {len(o1)} terms, second {len(o2)} terms")
    print("projector commutator norms ||[E1_m, E2_n]||_F:")
    print(f"  {'m':>3} {'value':>12} {'n':>3} {'value':>12}  norm")
    for m, v1 in enumerate(o1.values):
        for n, v2 in enumerate(o2.values):
            print(f"  {m:>3} {fmt_real(v1):>12} {n:>3} {fmt_real(v2):>12}  {_fmt_norm(norms[m, n], tol)}")
    print(f"operator commutator norm ||[O1, O2]||_F: {_fmt_norm(commutator_norm(o1.matrix, o2.matrix), tol)}")
    ok = are_compatible(o1, o2, tol)
    print(f"verdict: {'compatible' if ok else 'incompatible'} (tolerance {tol.eps_eq:g})")
    return EXIT_YES if ok else EXIT_NO


def cmd_refine(args: argparse.Namespace, tol: Tolerance) -> int:
    o1 = read_observable(args.first, tol).observable
    o2 = read_observable(args.second, tol).observable
    try:
        r = maximal_common_refinement(o1, o2, tol)
    except NotCompatible as exc:
        print(f"not compatible: {exc}", file=sys.stderr)
        return EXIT_NO
    _emit(format_observable(r.refined, [r.onto_first, r.onto_second]), args.out)
    return EXIT_YES


def cmd_refine_multi(args: argparse.Namespace, tol: Tolerance) -> int:
    forms = [read_observable(p, tol).observable for p in args.files]
    try:
        refined, maps = multi_common_refinement(forms, tol)
    except NotCompatible as exc:
        print(f"not compatible: {exc}", file=sys.stderr)
        return EXIT_NO
    _emit(format_observable(refined, maps), args.out)
    return EXIT_YES


def cmd_coarsen(args: argparse.Namespace, tol: Tolerance) -> int:
    arity, make = COARSENING_FUNCTIONS[args.function]
    if len(args.params) != arity:
        raise OvermeasureError(f"function {args.function!r} takes {arity} parameter(s)")
    f = make(*(float(p) for p in args.params))
    o = read_observable(args.file, tol).observable
    coarse, s = coarsen_by_function(o, f, tol)
    _emit(format_observable(coarse, [s]), args.out)
    return EXIT_YES


def cmd_coarsenings(args: argparse.Namespace, tol: Tolerance) -> int:
    o = read_observable(args.file, tol).observable
    count = 0
    for part, form in enumerate_coarsenings(o, tol):
        count += 1
        print(f"{count:>6}  {str(part):<30} ranks {form.ranks()}")
    print(f"{count} coarsenings of a {len(o)}-term observable (Bell number {bell_number(len(o))})")
    return EXIT_YES


def cmd_simulate(args: argparse.Namespace, tol: Tolerance) -> int:
    o1 = read_observable(args.first, tol).observable
    o2 = read_observable(args.second, tol).observable
    psi = read_state(args.state)
    try:
        sm = SimultaneousMeasurement(o1, o2, psi, tol)
    except NotCompatible as exc:
        print(f"not compatible: {exc}", file=sys.stderr)
        return EXIT_NO

    rng = SplitMix64(args.seed)
    draws = [sm.draw_index(rng) for _ in range(args.samples)]
    joint = Counter(draws)
    n = max(args.samples, 1)
    r = sm.refinement
    fine_of = {(r.onto_first[k], r.onto_second[k]): k for k in range(len(r.refined))}

    print(f"seed {args.seed}; samples {args.samples}")
    if args.show and draws:
        shown = " ".join(
            "({}, {})".format(*map(fmt_real, sm.values_of(k))) for k in draws[: args.show]
        )
        print(f"first draws: {shown}")
    print("joint outcomes:")
    print(f"  {'first':>12} {'second':>12} {'count':>8} {'empirical':>10} {'born':>10}")
    for m, v1 in enumerate(o1.values):
        for nn, v2 in enumerate(o2.values):
            k = fine_of.get((m, nn))
            born = sm.probabilities[k] if k is not None else 0.0
            c = joint.get(k, 0) if k is not None else 0
            print(f"  {fmt_real(v1):>12} {fmt_real(v2):>12} {c:>8} {c / n:>10.6f} {born:>10.6f}")
    for label, o, onto in (("first", o1, r.onto_first), ("second", o2, r.onto_second)):
        print(f"marginal of {label} observable:")
        print(f"  {'value':>12} {'count':>8} {'empirical':>10} {'born':>10}")
        for m, (v, e) in enumerate(o.terms):
            c = sum(cnt for k, cnt in joint.items() if onto[k] == m)
            born = float(np.vdot(psi, e @ psi).real)
            print(f"  {fmt_real(v):>12} {c:>8} {c / n:>10.6f} {born:>10.6f}")
    return EXIT_YES


def parse_dims(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            dims = list(range(int(lo), int(hi) + 1))
        else:
            dims = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension range {text!r}; use e.g. 2..6 or 2,4") from None
    if not dims or min(dims) < 1:
        raise argparse.ArgumentTypeError(f"dimension range {text!r} is empty or non-positive")
    return dims


def cmd_verify(args: argparse.Namespace, tol: Tolerance) -> int:
    dims = args.dims
    print(f"suite {args.suite}; dims {','.join(map(str, dims))}; cases {args.cases}; seed {args.seed}")
    results = run_suite(args.suite, dims, args.cases, args.seed, tol)
    for res in results:
        print(res.line())
    ok = all(res.passed for res in results)
    print(f"result: {'PASS' if ok else 'FAIL'}")
    return EXIT_YES if ok else EXIT_NO


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags with SUPPRESS so they can follow the
    # subcommand name without clobbering values given before it
    def default(v):
        return argparse.SUPPRESS if suppress else v

    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol-eq", type=float, default=default(1e-9),
                   help="norm threshold for operator equality (default 1e-9)")
    p.add_argument("--tol-cluster", type=float, default=default(1e-6),
                   help="eigenvalue gap below which values are not distinct (default 1e-6)")
    p.add_argument("--seed", type=int, default=default(0), help="random seed (default 0)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="overmeasure",
        description="Observables, compatibility, common refinements and simulated measurement.",
        parents=[_global_flags(False)],
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_global_flags(True)]

    p = sub.add_parser("compat", parents=common, help="test two observables for compatibility")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_compat)

    p = sub.add_parser("refine", parents=common, help="maximal common refinement of two observables")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("refine-multi", parents=common, help="maximal common refinement of several")
    p.add_argument("files", nargs="+")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_refine_multi)

    p = sub.add_parser("coarsen", parents=common, help="function of an observable")
    p.add_argument("file")
    p.add_argument("function", choices=sorted(COARSENING_FUNCTIONS))
    p.add_argument("params", nargs="*", help="a b for 'affine' (x -> a x + b)")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_coarsen)

    p = sub.add_parser("coarsenings", parents=common, help="list every partition coarsening")
    p.add_argument("file")
    p.set_defaults(func=cmd_coarsenings)

    p = sub.add_parser("simulate", parents=common, help="sample a simultaneous measurement")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("state")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--show", type=int, default=10, help="number of individual draws to print")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", parents=common, help="run randomized property suites")
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    p.add_argument("--dims", type=parse_dims, default=parse_dims("2..6"))
    p.add_argument("--cases", type=int, default=100, help="random cases per dimension")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = Tolerance(args.tol_eq, args.tol_cluster)
        if getattr(args, "samples", 0) < 0 or getattr(args, "cases", 0) < 0:
            raise OvermeasureError("counts must be non-negative")
        return args.func(args, tol)
    except (OvermeasureError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
