from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import I2, X, Z
from overmeasure.errors import (
    CountMismatch,
    DimMismatch,
    DuplicateCoarseValues,
    InvalidSpectralForm,
    NonFiniteImage,
    TooManyTerms,
)
from overmeasure.linalg import approx_eq, is_projector, kron
from overmeasure.observables import (
    IndexSurjection,
    Partition,
    SpectralForm,
    bell_number,
    coarsen_by_function,
    coarsen_by_map,
    complete_refinement,
    enumerate_coarsenings,
    from_matrix,
    is_refinement,
    restricted_growth_strings,
    same_projectors,
    set_partitions,
)
from overmeasure.random_objects import random_observable

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 6)


def partitions_by_brute_force(n):
    """Distinct set partitions of range(n) read off all n**n maps."""
    seen = set()
    for f in itertools.product(range(max(n, 1)), repeat=n):
        blocks = {}
        for i, b in enumerate(f):
            blocks.setdefault(b, set()).add(i)
        seen.add(frozenset(frozenset(c) for c in blocks.values()))
    return seen


ZI = from_matrix(kron(Z, I2))


class TestIndexSurjection:
    def test_not_onto(self):
        with pytest.raises(ValueError):
            IndexSurjection((0, 0, 2), 3)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            IndexSurjection((0, 3), 2)

    def test_classes_and_compose(self):
        s = IndexSurjection((0, 1, 0, 2), 3)
        assert s.classes() == ((0, 2), (1,), (3,))
        t = IndexSurjection((1, 0, 1), 2)
        assert s.then(t).image == (1, 0, 1, 1)

    def test_compose_mismatch(self):
        with pytest.raises(CountMismatch):
            IndexSurjection((0, 1), 2).then(IndexSurjection((0, 0, 0), 1))


class TestPartitions:
    @pytest.mark.parametrize("n", range(0, 7))
    def test_bell_numbers_match_brute_force(self, n):
        oracle = partitions_by_brute_force(n)
        ours = {frozenset(frozenset(c) for c in p.classes) for p in set_partitions(n)}
        assert ours == oracle
        assert bell_number(n) == len(oracle) == len(list(set_partitions(n)))

    def test_known_bell_values(self):
        assert [bell_number(n) for n in range(8)] == [1, 1, 2, 5, 15, 52, 203, 877]

    def test_rgs_lexicographic(self):
        strings = list(restricted_growth_strings(4))
        assert strings == sorted(strings)
        assert strings[0] == (0, 0, 0, 0) and strings[-1] == (0, 1, 2, 3)
        for a in strings:
            assert a[0] == 0
            assert all(a[i] <= max(a[:i]) + 1 for i in range(1, len(a)))

    def test_partition_validation(self):
        with pytest.raises(ValueError):
            Partition(((0, 1), (1, 2)))
        with pytest.raises(ValueError):
            Partition(((0,), (2,)))

    def test_str(self):
        assert str(Partition.from_rgs((0, 1, 0))) == "{0,2}{1}"


class TestSpectralForm:
    def test_rejects_unsorted(self):
        with pytest.raises(InvalidSpectralForm):
            SpectralForm((1.0, 0.0), (np.diag([1, 0]), np.diag([0, 1])))

    def test_validate_catches_incompleteness(self):
        form = SpectralForm((0.0,), (np.diag([1, 0]),))
        with pytest.raises(InvalidSpectralForm):
            form.validate()

    def test_validate_catches_zero_term(self):
        form = SpectralForm((0.0, 1.0), (np.eye(2), np.zeros((2, 2))))
        with pytest.raises(InvalidSpectralForm):
            form.validate()

    def test_from_terms_duplicate(self):
        with pytest.raises(DuplicateCoarseValues):
            SpectralForm.from_terms([(1.0, np.diag([1, 0])), (1.0, np.diag([0, 1]))])

    def test_projectors_read_only(self):
        with pytest.raises(ValueError):
            ZI.projectors[0][0, 0] = 5


class TestFromMatrix:
    def test_pauli_z(self):
        o = from_matrix(Z)
        assert o.values == (-1.0, 1.0)
        assert approx_eq(o.projectors[0], np.diag([0, 1])) and approx_eq(o.projectors[1], np.diag([1, 0]))

    def test_identity_collapses(self):
        o = from_matrix(np.eye(3))
        assert o.values == (1.0,) and approx_eq(o.projectors[0], np.eye(3))

    def test_degenerate(self):
        o = from_matrix(np.diag([2.0, 2.0, 5.0]))
        assert o.values == (2.0, 5.0)
        assert o.ranks() == [2, 1]
        assert approx_eq(o.projectors[0], np.diag([1, 1, 0]))

    def test_reconstructs(self, rng):
        g = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        h = g + g.conj().T
        assert approx_eq(from_matrix(h).matrix, h)


class TestCoarsenByFunction:
    def test_square(self):
        o = from_matrix(np.diag([-1.0, 0.0, 1.0]))
        coarse, s = coarsen_by_function(o, lambda x: x * x)
        assert coarse.values == (0.0, 1.0)
        assert s.image == (1, 0, 1)
        assert approx_eq(coarse.projectors[1], np.diag([1, 0, 1]))

    def test_identity_function(self):
        o = from_matrix(np.diag([3.0, -1.0, 2.0]))
        coarse, s = coarsen_by_function(o, lambda x: x)
        assert s == IndexSurjection.identity(3)
        assert coarse.values == o.values and same_projectors(coarse, o)

    def test_constant(self):
        coarse, s = coarsen_by_function(ZI, lambda x: 7.0)
        assert coarse.values == (7.0,) and approx_eq(coarse.projectors[0], np.eye(4))
        assert s.image == (0, 0)

    def test_non_finite(self):
        with pytest.raises(NonFiniteImage):
            coarsen_by_function(from_matrix(np.diag([0.0, 1.0])), lambda x: 1 / x if x else math.inf)


class TestCoarsenByMap:
    def test_identity(self):
        o = from_matrix(np.diag([1.0, 2.0, 3.0]))
        out = coarsen_by_map(o, IndexSurjection.identity(3), list(o.values))
        assert out.values == o.values and same_projectors(out, o)

    def test_merge_complete_refinement_by_first_qubit(self):
        fine = complete_refinement(ZI)
        assert fine.ranks() == [1, 1, 1, 1]
        s = is_refinement(fine, ZI)
        out = coarsen_by_map(fine, s, [-1.0, 1.0])
        assert out.ranks() == [2, 2]
        assert approx_eq(out.projectors[0], np.diag([0, 0, 1, 1]))
        assert approx_eq(out.projectors[1], np.diag([1, 1, 0, 0]))

    def test_three_terms(self):
        o = from_matrix(np.diag([1.0, 2.0, 3.0]))
        out = coarsen_by_map(o, IndexSurjection((0, 0, 1), 2), [10.0, 20.0])
        assert out.values == (10.0, 20.0)
        assert approx_eq(out.projectors[0], np.diag([1, 1, 0]))

    def test_values_resorted(self):
        o = from_matrix(np.diag([1.0, 2.0, 3.0]))
        out = coarsen_by_map(o, IndexSurjection((0, 0, 1), 2), [5.0, -5.0])
        assert out.values == (-5.0, 5.0)
        assert approx_eq(out.projectors[0], np.diag([0, 0, 1]))

    def test_errors(self):
        o = from_matrix(np.diag([1.0, 2.0, 3.0]))
        with pytest.raises(DuplicateCoarseValues):
            coarsen_by_map(o, IndexSurjection((0, 0, 1), 2), [1.0, 1.0])
        with pytest.raises(CountMismatch):
            coarsen_by_map(o, IndexSurjection((0, 1), 2), [1.0, 2.0])
        with pytest.raises(CountMismatch):
            coarsen_by_map(o, IndexSurjection((0, 0, 1), 2), [1.0])


class TestIsRefinement:
    def test_improper(self):
        assert is_refinement(ZI, ZI) == IndexSurjection.identity(2)

    def test_complete_refinement_of_zi(self):
        s = is_refinement(complete_refinement(ZI), ZI)
        assert s is not None and sorted(s.image) == [0, 0, 1, 1]

    def test_z_does_not_refine_x(self):
        z, x = from_matrix(Z), from_matrix(X)
        # no eigenprojector of Z is below any eigenprojector of X
        for e in z.projectors:
            for f in x.projectors:
                assert not approx_eq(e @ f, e)
        assert is_refinement(z, x) is None

    def test_coarse_does_not_refine_fine(self):
        assert is_refinement(ZI, complete_refinement(ZI)) is None

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            is_refinement(ZI, from_matrix(Z))


class TestCompleteRefinement:
    def test_rank_one_input(self):
        o = from_matrix(np.diag([3.0, 1.0, 2.0]))
        out = complete_refinement(o)
        assert same_projectors(out, o)

    def test_identity_plane(self):
        out = complete_refinement(from_matrix(np.eye(2)))
        assert out.ranks() == [1, 1]
        assert approx_eq(sum(out.projectors), np.eye(2))
        assert approx_eq(out.projectors[0] @ out.projectors[1], np.zeros((2, 2)))

    def test_degenerate(self):
        out = complete_refinement(from_matrix(np.diag([2.0, 2.0, 5.0])))
        assert out.ranks() == [1, 1, 1]
        assert approx_eq(out.projectors[0] + out.projectors[1], np.diag([1, 1, 0]))
        assert len(set(out.values)) == 3

    def test_custom_values(self):
        out = complete_refinement(ZI, value_assigner=lambda i: 10.0 * i)
        assert out.values == (0.0, 10.0, 20.0, 30.0)
        with pytest.raises(DuplicateCoarseValues):
            complete_refinement(ZI, value_assigner=lambda i: 1.0)

    def test_deterministic(self, rng):
        o = random_observable(6, rng, max_terms=3)
        a, b = complete_refinement(o), complete_refinement(o)
        assert all(np.array_equal(p, q) for p, q in zip(a.projectors, b.projectors))


class TestEnumerateCoarsenings:
    @pytest.mark.parametrize("diag, count", [([1.0], 1), ([1.0, 2.0, 3.0], 5), ([1.0, 2.0, 3.0, 4.0], 15)])
    def test_counts(self, diag, count):
        o = from_matrix(np.diag(diag))
        assert len(list(enumerate_coarsenings(o))) == count

    def test_projectors_follow_partition(self):
        o = from_matrix(np.diag([1.0, 2.0, 3.0]))
        for part, form in enumerate_coarsenings(o):
            assert len(form) == len(part.classes)
            for l, cls in enumerate(part.classes):
                expect = np.diag([1.0 if k in cls else 0.0 for k in range(3)])
                assert approx_eq(form.projectors[l], expect)

    def test_guard_is_eager(self):
        o = from_matrix(np.diag(np.arange(13.0)))
        with pytest.raises(TooManyTerms):
            enumerate_coarsenings(o)


@settings(max_examples=40, deadline=None)
@given(dims, seeds)
def test_function_coarsening_is_recovered(d, seed):
    rng = np.random.default_rng(seed)
    o = random_observable(d, rng)
    table = {v: float(rng.integers(0, 3)) for v in o.values}
    coarse, s = coarsen_by_function(o, table.__getitem__)
    assert is_refinement(o, coarse) == s
    for k, v in enumerate(o.values):
        assert coarse.values[s[k]] == table[v]


@settings(max_examples=40, deadline=None)
@given(dims, seeds)
def test_coarse_projectors_kill_other_classes(d, seed):
    rng = np.random.default_rng(seed)
    o = random_observable(d, rng)
    for part, coarse in enumerate_coarsenings(o):
        s = part.to_surjection()
        for l, g in enumerate(coarse.projectors):
            for k, e in enumerate(o.projectors):
                if s[k] != l:
                    assert approx_eq(g @ e, np.zeros_like(e))
                else:
                    assert approx_eq(g @ e, e)


@settings(max_examples=30, deadline=None)
@given(dims, seeds)
def test_refinement_is_transitive(d, seed):
    rng = np.random.default_rng(seed)
    a = complete_refinement(random_observable(d, rng))
    parts = list(set_partitions(len(a)))
    ab = parts[int(rng.integers(len(parts)))].to_surjection()
    b = coarsen_by_map(a, ab, list(range(ab.coarse_count)))
    parts = list(set_partitions(len(b)))
    bc = parts[int(rng.integers(len(parts)))].to_surjection()
    c = coarsen_by_map(b, bc, list(range(bc.coarse_count)))
    s = is_refinement(a, c)
    assert s is not None
    assert s == is_refinement(a, b).then(is_refinement(b, c))


@settings(max_examples=30, deadline=None)
@given(dims, seeds)
def test_complete_refinement_refines(d, seed):
    o = random_observable(d, np.random.default_rng(seed))
    fine = complete_refinement(o)
    assert fine.ranks() == [1] * d
    assert is_refinement(fine, o) is not None


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 5), seeds)
def test_every_coarsening_is_valid(d, seed):
    o = random_observable(d, np.random.default_rng(seed))
    for _, form in enumerate_coarsenings(o):
        form.validate()
        assert all(is_projector(p) for p in form.projectors)
        assert list(form.values) == sorted(set(form.values))
