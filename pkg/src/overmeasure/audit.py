"""Randomized property suites behind ``overmeasure verify``.

Each check draws its random objects from a generator seeded by
``(seed, check id, dim, case index)``, so results do not depend on the order
in which checks run.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np

from . import random_objects as ro
from .compatibility import are_compatible, claim1_witness, commutes
from .linalg import DEFAULT_TOL, Tolerance, approx_eq
from .observables import enumerate_coarsenings
from .premeasurement import (
    build_premeasurement,
    check_calibration,
    check_coarse_calibration,
    check_coarse_result_consistency,
    collapse,
    evolve,
)
from .projector_lattice import (
    brute_force_glb,
    glb_commuting,
    lub_orthogonal,
    orthogonality_propagates,
    span_lub,
    sum_dominates,
)

SUITES = ("lattice", "claims", "overmeasurement")


@dataclass
class CheckResult:
    name: str
    cases: int = 0
    failures: int = 0

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, ok: bool) -> None:
        self.cases += 1
        self.failures += not ok

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{self.name:<44} cases {self.cases:>7}  failures {self.failures:>5}  {verdict}"


def _rng(seed: int, check: int, d: int, i: int) -> np.random.Generator:
    return np.random.default_rng([seed, check, d, i])


def _run(
    name: str,
    check_id: int,
    dims: Iterable[int],
    cases: int,
    seed: int,
    one: Callable[[int, np.random.Generator], bool],
) -> CheckResult:
    res = CheckResult(name)
    for d in dims:
        for i in range(cases):
            res.record(one(d, _rng(seed, check_id, d, i)))
    return res


def lattice_suite(
    dims: Iterable[int], cases: int, seed: int = 0, tol: Tolerance = DEFAULT_TOL
) -> list[CheckResult]:
    dims = list(dims)

    def glb(d, rng):
        e, f = ro.commuting_projector_pair(d, rng)
        return approx_eq(glb_commuting(e, f, tol), brute_force_glb(e, f, tol), tol)

    def lub(d, rng):
        fam = ro.orthogonal_family(d, rng)
        return approx_eq(lub_orthogonal(fam, tol), span_lub(fam, tol), tol)

    def propagation(d, rng):
        e, f, g = ro.propagation_instance(d, rng)
        return orthogonality_propagates(e, f, g, tol)

    def domination(d, rng):
        gs, es, assignment = ro.domination_instance(d, rng)
        return sum_dominates(gs, es, assignment, tol)

    return [
        _run("meet of commuting projectors = intersection", 1, dims, cases, seed, glb),
        _run("join of orthogonal family = span", 2, dims, cases, seed, lub),
        _run("orthogonality passes to sub-projectors", 3, dims, cases, seed, propagation),
        _run("sum of dominated family is dominated", 4, dims, cases, seed, domination),
    ]


def claims_suite(
    dims: Iterable[int], cases: int, seed: int = 0, tol: Tolerance = DEFAULT_TOL
) -> list[CheckResult]:
    dims = list(dims)

    def three_way(commuting: bool):
        def one(d, rng):
            o = ro.random_observable(d, rng)
            x = ro.commuting_operator(o, rng) if commuting else ro.generic_operator(d, rng)
            return claim1_witness(o, x, tol).consistent

        return one

    def biconditional(commuting: bool):
        def one(d, rng):
            o = ro.random_observable(d, rng)
            o2 = ro.commuting_observable(o, rng) if commuting else ro.random_observable(d, rng)
            return commutes(o.matrix, o2.matrix, tol) == are_compatible(o, o2, tol)

        return one

    return [
        _run("commutant conditions agree (commuting X)", 11, dims, cases, seed, three_way(True)),
        _run("commutant conditions agree (generic X)", 12, dims, cases, seed, three_way(False)),
        _run("commuting iff compatible (commuting pair)", 13, dims, cases, seed, biconditional(True)),
        _run("commuting iff compatible (generic pair)", 14, dims, cases, seed, biconditional(False)),
    ]


def overmeasurement_suite(
    dims: Iterable[int],
    cases: int,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOL,
    trials: int = 100,
    max_terms: int = 6,
    states: int = 2,
) -> list[CheckResult]:
    """Calibration of every coarsening and coarse consistency of every collapse.

    ``cases`` random observables per dimension, each with at most
    ``max_terms`` terms; every set partition of its terms is a coarsening.
    """
    fine = CheckResult("fine calibration")
    coarse = CheckResult("coarse calibration for every coarsening")
    consistency = CheckResult("collapsed branch is coarse-sharp")
    for d in dims:
        for i in range(cases):
            rng = _rng(seed, 21, d, i)
            o = ro.random_observable(d, rng, max_terms=max_terms)
            setup = build_premeasurement(o, tol)
            for k in range(len(o)):
                fine.record(check_calibration(setup, k, trials, int(rng.integers(2**32))))
            finals = [evolve(setup, ro.random_state(d, rng)) for _ in range(states)]
            branches = [
                (phi, k) for phi in finals for k in range(len(o))
                if collapse(phi, setup, k) is not None
            ]
            for part, _ in enumerate_coarsenings(o, tol):
                s = part.to_surjection()
                for l in range(s.coarse_count):
                    coarse.record(
                        check_coarse_calibration(setup, s, l, trials, int(rng.integers(2**32)))
                    )
                for phi, k in branches:
                    consistency.record(check_coarse_result_consistency(setup, s, phi, k))
    return [fine, coarse, consistency]


def run_suite(
    name: str, dims: Iterable[int], cases: int, seed: int = 0, tol: Tolerance = DEFAULT_TOL
) -> list[CheckResult]:
    dims = list(dims)
    if name == "lattice":
        return lattice_suite(dims, cases, seed, tol)
    if name == "claims":
        return claims_suite(dims, cases, seed, tol)
    if name == "overmeasurement":
        return overmeasurement_suite(dims, cases, seed, tol)
    if name == "all":
        return [r for s in SUITES for r in run_suite(s, dims, cases, seed, tol)]
    raise ValueError(f"unknown suite {name!r}")
