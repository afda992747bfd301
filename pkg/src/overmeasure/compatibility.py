"""Compatibility of observables and their common refinements."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .errors import DimMismatch, EmptyList, NotCompatible, TooManyTerms
from .linalg import DEFAULT_TOL, Tolerance, dagger, norm
from .observables import (
    MAX_ENUMERATION_TERMS,
    IndexSurjection,
    SpectralForm,
    complete_refinement,
    enumerate_coarsenings,
    is_refinement,
)


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimMismatch(f"shapes {a.shape} and {b.shape} are not equal square shapes")


def commutator_norm(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    _same_dim(a, b)
    return norm(a @ b - b @ a)


def commutes(a: npt.ArrayLike, b: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL) -> bool:
    return commutator_norm(a, b) <= tol.eps_eq


def projector_commutators(o1: SpectralForm, o2: SpectralForm) -> np.ndarray:
    """``out[m, n] = ||[E1^m, E2^n]||_F``."""
    if o1.dim != o2.dim:
        raise DimMismatch(f"dimensions {o1.dim} and {o2.dim} differ")
    return np.array([[commutator_norm(e, f) for f in o2.projectors] for e in o1.projectors])


def are_compatible(o1: SpectralForm, o2: SpectralForm, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Every eigen-projector of ``o1`` commutes with every one of ``o2``."""
    return bool(np.all(projector_commutators(o1, o2) <= tol.eps_eq))


@dataclass(frozen=True)
class Claim1Witness:
    """The three commutation conditions for an observable ``O`` and operator ``X``.

    ``commutes``: ``[O, X] = 0``; ``block_diagonal``: ``X = sum_k E_k X E_k``;
    ``commutes_with_projectors``: ``[E_k, X] = 0`` for every ``k``.
    """

    commutes: bool
    block_diagonal: bool
    commutes_with_projectors: bool

    @property
    def consistent(self) -> bool:
        return self.commutes == self.block_diagonal == self.commutes_with_projectors


def pinch(o: SpectralForm, x: npt.ArrayLike) -> np.ndarray:
    """``sum_k E_k X E_k``: the block-diagonal part of ``X`` in ``o``'s eigenspaces."""
    x = np.asarray(x, dtype=np.complex128)
    return sum(e @ x @ e for e in o.projectors)


def claim1_witness(o: SpectralForm, x: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL) -> Claim1Witness:
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (o.dim, o.dim):
        raise DimMismatch(f"operator shape {x.shape}, observable dim {o.dim}")
    return Claim1Witness(
        commutes=commutes(o.matrix, x, tol),
        block_diagonal=norm(x - pinch(o, x)) <= tol.eps_eq,
        commutes_with_projectors=all(commutes(e, x, tol) for e in o.projectors),
    )


@dataclass(frozen=True)
class CommonRefinement:
    refined: SpectralForm
    onto_first: IndexSurjection
    onto_second: IndexSurjection


def _product_refinement(
    os: Sequence[SpectralForm], tol: Tolerance
) -> tuple[SpectralForm, list[IndexSurjection]]:
    # Terms are grown one observable at a time; extending each surviving
    # prefix by n_q in order keeps the full index tuples lexicographic, and a
    # zero prefix stays zero so it can be dropped early.
    terms: list[tuple[tuple[int, ...], np.ndarray]] = [((), np.eye(os[0].dim, dtype=np.complex128))]
    for o in os:
        grown = []
        for idx, p in terms:
            for n, e in enumerate(o.projectors):
                q = p @ e
                if norm(q) > tol.eps_eq:
                    grown.append((idx + (n,), 0.5 * (q + dagger(q))))
        terms = grown
    refined = SpectralForm(tuple(float(i) for i in range(len(terms))), tuple(p for _, p in terms))
    refined.validate(tol)
    maps = [
        IndexSurjection(tuple(idx[q] for idx, _ in terms), len(o)) for q, o in enumerate(os)
    ]
    return refined, maps


def maximal_common_refinement(
    o1: SpectralForm, o2: SpectralForm, tol: Tolerance = DEFAULT_TOL
) -> CommonRefinement:
    """The observable whose eigen-projectors are the nonzero products ``E1^m E2^n``.

    Products are listed in lexicographic ``(m, n)`` order and labelled
    ``0, 1, 2, ...`` in that order.
    """
    if not are_compatible(o1, o2, tol):
        raise NotCompatible("observables have non-commuting eigen-projectors")
    refined, (first, second) = _product_refinement([o1, o2], tol)
    return CommonRefinement(refined, first, second)


def multi_common_refinement(
    os: Sequence[SpectralForm], tol: Tolerance = DEFAULT_TOL
) -> tuple[SpectralForm, list[IndexSurjection]]:
    """Maximal common refinement of any number of pairwise compatible observables."""
    os = list(os)
    if not os:
        raise EmptyList("need at least one observable")
    if len(os) == 1:
        return os[0], [IndexSurjection.identity(len(os[0]))]
    for i in range(len(os)):
        for j in range(i + 1, len(os)):
            if not are_compatible(os[i], os[j], tol):
                raise NotCompatible(f"observables {i} and {j} are not compatible")
    return _product_refinement(os, tol)


def is_common_refinement(
    candidate: SpectralForm, o1: SpectralForm, o2: SpectralForm, tol: Tolerance = DEFAULT_TOL
) -> tuple[IndexSurjection, IndexSurjection] | None:
    if not (candidate.dim == o1.dim == o2.dim):
        raise DimMismatch("observables act on spaces of different dimension")
    first = is_refinement(candidate, o1, tol)
    if first is None:
        return None
    second = is_refinement(candidate, o2, tol)
    if second is None:
        return None
    return first, second


def verify_refinement_characterization(
    o1: SpectralForm, o2: SpectralForm, tol: Tolerance = DEFAULT_TOL
) -> bool:
    """Check "common refinement of (o1, o2) iff refinement of their maximal one".

    Candidates are every coarsening of the maximal common refinement plus
    its complete refinement.
    """
    top = maximal_common_refinement(o1, o2, tol).refined
    if len(top) > MAX_ENUMERATION_TERMS:
        raise TooManyTerms(f"maximal common refinement has {len(top)} terms")
    candidates = [form for _, form in enumerate_coarsenings(top, tol)]
    candidates.append(complete_refinement(top, tol=tol))
    for c in candidates:
        common = is_common_refinement(c, o1, o2, tol) is not None
        below_top = is_refinement(c, top, tol) is not None
        if common != below_top:
            return False
    return True
