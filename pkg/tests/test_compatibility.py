from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import I2, X, Z
from overmeasure import random_objects as ro
from overmeasure.compatibility import (
    are_compatible,
    claim1_witness,
    commutator_norm,
    commutes,
    is_common_refinement,
    maximal_common_refinement,
    multi_common_refinement,
    pinch,
    projector_commutators,
    verify_refinement_characterization,
)
from overmeasure.errors import DimMismatch, EmptyList, NotCompatible
from overmeasure.linalg import approx_eq, kron
from overmeasure.observables import (
    IndexSurjection,
    coarsen_by_map,
    complete_refinement,
    from_matrix,
    is_refinement,
    same_projectors,
)

seeds = st.integers(0, 2**32 - 1)

OZ, OX = from_matrix(Z), from_matrix(X)
ZI = from_matrix(kron(Z, I2))
IZ = from_matrix(kron(I2, Z))
ZZ = from_matrix(kron(Z, Z))
IX = kron(I2, X)
DEG = from_matrix(np.diag([2.0, 2.0, 5.0]))


def nonzero_products(o1, o2):
    """Oracle: every nonzero E1 E2 product, in (m, n) order."""
    out = []
    for (m, e), (n, f) in itertools.product(enumerate(o1.projectors), enumerate(o2.projectors)):
        p = e @ f
        if np.linalg.norm(p) > 1e-9:
            out.append((m, n, p))
    return out


class TestCommutes:
    def test_self(self):
        assert commutes(Z, Z)

    def test_z_x(self):
        assert not commutes(Z, X)
        # ZX - XZ = 2iY, whose Frobenius norm is 2 sqrt 2
        assert commutator_norm(Z, X) == pytest.approx(2 * np.sqrt(2))

    def test_different_factors(self):
        assert commutes(kron(Z, I2), IX)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            commutes(Z, np.eye(3))


class TestAreCompatible:
    def test_self(self):
        assert are_compatible(DEG, DEG)

    def test_z_x(self):
        assert not are_compatible(OZ, OX)
        norms = projector_commutators(OZ, OX)
        assert norms.shape == (2, 2)
        assert np.all(norms > 0.5)

    def test_two_qubits(self):
        assert are_compatible(ZI, IZ)
        assert np.all(projector_commutators(ZI, IZ) <= 1e-12)


class TestCommutantWitness:
    def test_identity(self):
        w = claim1_witness(DEG, np.eye(3))
        assert (w.commutes, w.block_diagonal, w.commutes_with_projectors) == (True, True, True)

    def test_z_x(self):
        w = claim1_witness(OZ, X)
        assert (w.commutes, w.block_diagonal, w.commutes_with_projectors) == (False, False, False)
        assert approx_eq(pinch(OZ, X), np.zeros((2, 2)))

    def test_different_factors(self):
        w = claim1_witness(ZI, IX)
        assert w.consistent and w.commutes


class TestMaximalCommonRefinement:
    def test_self(self):
        r = maximal_common_refinement(DEG, DEG)
        assert same_projectors(r.refined, DEG)
        assert r.onto_first == r.onto_second == IndexSurjection.identity(2)

    def test_two_qubits(self):
        r = maximal_common_refinement(ZI, IZ)
        assert r.refined.ranks() == [1, 1, 1, 1]
        assert r.onto_first.image == (0, 0, 1, 1)
        assert r.onto_second.image == (0, 1, 0, 1)
        # ZI values (-1, +1) pick |1x> then |0x>, IZ picks |x1> then |x0>
        expect = [np.diag(np.eye(4)[i]) for i in (3, 2, 1, 0)]
        assert all(approx_eq(p, q) for p, q in zip(r.refined.projectors, expect))

    def test_zero_products_dropped(self):
        r = maximal_common_refinement(ZI, ZZ)
        oracle = nonzero_products(ZI, ZZ)
        assert len(oracle) == len(r.refined) == 4
        for k, (m, n, p) in enumerate(oracle):
            assert (r.onto_first[k], r.onto_second[k]) == (m, n)
            assert approx_eq(r.refined.projectors[k], p)
        assert r.refined.values == (0.0, 1.0, 2.0, 3.0)

    def test_incompatible(self):
        with pytest.raises(NotCompatible):
            maximal_common_refinement(OZ, OX)


class TestMultiCommonRefinement:
    def test_single(self):
        out, maps = multi_common_refinement([DEG])
        assert out is DEG and maps == [IndexSurjection.identity(2)]

    def test_three_qubits(self):
        ops = [kron(kron(Z, I2), I2), kron(kron(I2, Z), I2), kron(kron(I2, I2), Z)]
        out, maps = multi_common_refinement([from_matrix(o) for o in ops])
        assert out.ranks() == [1] * 8
        assert approx_eq(sum(out.projectors), np.eye(8))
        for p in out.projectors:
            assert np.count_nonzero(np.abs(np.diag(p)) > 0.5) == 1

    def test_idempotent(self):
        out, maps = multi_common_refinement([DEG, DEG, DEG])
        assert same_projectors(out, DEG)
        assert all(m == IndexSurjection.identity(2) for m in maps)

    def test_names_offending_pair(self):
        with pytest.raises(NotCompatible, match="1 and 2"):
            multi_common_refinement([from_matrix(np.eye(2)), OZ, OX])

    def test_empty(self):
        with pytest.raises(EmptyList):
            multi_common_refinement([])


class TestIsCommonRefinement:
    def test_top(self):
        r = maximal_common_refinement(ZI, IZ)
        assert is_common_refinement(r.refined, ZI, IZ) == (r.onto_first, r.onto_second)

    def test_not_refining_second(self):
        assert is_common_refinement(ZI, ZI, IZ) is None

    def test_complete_refinement_of_top(self):
        r = maximal_common_refinement(ZI, ZZ)
        fine = complete_refinement(r.refined)
        maps = is_common_refinement(fine, ZI, ZZ)
        assert maps is not None
        via = is_refinement(fine, r.refined)
        assert maps == (via.then(r.onto_first), via.then(r.onto_second))


class TestCharacterization:
    def test_two_qubits(self):
        assert verify_refinement_characterization(ZI, IZ)

    def test_self(self):
        assert verify_refinement_characterization(DEG, DEG)

    def test_with_identity(self):
        assert maximal_common_refinement(OZ, from_matrix(I2)).refined.ranks() == [1, 1]
        assert verify_refinement_characterization(OZ, from_matrix(I2))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), seeds)
def test_refinement_matches_product_oracle(d, seed):
    o1, o2 = ro.compatible_family(d, 2, np.random.default_rng(seed))
    r = maximal_common_refinement(o1, o2)
    oracle = nonzero_products(o1, o2)
    assert [(r.onto_first[k], r.onto_second[k]) for k in range(len(r.refined))] == [
        (m, n) for m, n, _ in oracle
    ]
    assert all(approx_eq(p, q) for p, (_, _, q) in zip(r.refined.projectors, oracle))
    # every coarse projector is the sum of the fine ones sent to it
    for o, s in ((o1, r.onto_first), (o2, r.onto_second)):
        for m, e in enumerate(o.projectors):
            assert approx_eq(sum(r.refined.projectors[k] for k in s.classes()[m]), e)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), seeds)
def test_any_common_refinement_refines_top(d, seed):
    rng = np.random.default_rng(seed)
    o1, o2 = ro.compatible_family(d, 2, rng)
    top = maximal_common_refinement(o1, o2).refined
    fine = complete_refinement(top)
    assert is_common_refinement(fine, o1, o2) is not None
    assert is_refinement(fine, top) is not None
    # merging two distinct top terms gives a coarsening that refines neither
    # the top nor both inputs
    if len(top) > 1:
        s = IndexSurjection((0,) + tuple(range(len(top) - 1)), len(top) - 1)
        merged = coarsen_by_map(top, s, list(range(len(top) - 1)))
        assert is_refinement(merged, top) is None
        assert is_common_refinement(merged, o1, o2) is None


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), seeds)
def test_commuting_families_agree_on_every_condition(d, seed):
    rng = np.random.default_rng(seed)
    o = ro.random_observable(d, rng)
    w = claim1_witness(o, ro.commuting_operator(o, rng))
    assert w.commutes and w.block_diagonal and w.commutes_with_projectors
    o2 = ro.commuting_observable(o, rng)
    assert commutes(o.matrix, o2.matrix) and are_compatible(o, o2)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), seeds)
def test_generic_families_fail_every_condition(d, seed):
    rng = np.random.default_rng(seed)
    o = ro.random_observable(d, rng)
    w = claim1_witness(o, ro.generic_operator(d, rng))
    assert w.consistent
    if len(o) > 1:
        assert not (w.commutes or w.block_diagonal or w.commutes_with_projectors)
