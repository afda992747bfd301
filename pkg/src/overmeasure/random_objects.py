"""Random projectors, observables and operators for property checks.

Everything takes an explicit ``numpy.random.Generator``. Commuting objects
are built from a shared eigenbasis, generic ones from independent bases.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .linalg import DEFAULT_TOL, Matrix, Tolerance, dagger
from .observables import SpectralForm, orthonormal_columns, projector_from_columns
from .projector_lattice import ProjectorSet


def haar_unitary(d: int, rng: np.random.Generator) -> Matrix:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def surjective_labels(d: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Length-``d`` labels using every value in ``0..k-1``."""
    labels = np.concatenate([np.arange(k), rng.integers(0, k, size=d - k)])
    return rng.permutation(labels)


def compact(labels: Sequence[int]) -> np.ndarray:
    _, inv = np.unique(np.asarray(labels), return_inverse=True)
    return inv


def distinct_values(k: int, rng: np.random.Generator) -> list[float]:
    # half-integers spaced at least 0.5 apart, far beyond any clustering gap
    return sorted(float(x) / 2 for x in rng.choice(np.arange(-20, 21), size=k, replace=False))


def observable_from_basis(
    basis: Matrix, labels: Sequence[int], values: Sequence[float], tol: Tolerance = DEFAULT_TOL
) -> SpectralForm:
    """Observable with eigenvalue ``values[labels[i]]`` on column ``i`` of ``basis``."""
    labels = np.asarray(labels)
    terms = [
        (values[k], projector_from_columns(basis[:, labels == k]))
        for k in range(int(labels.max()) + 1)
    ]
    return SpectralForm.from_terms(terms, tol)


def random_observable(
    d: int,
    rng: np.random.Generator,
    max_terms: int | None = None,
    basis: Matrix | None = None,
) -> SpectralForm:
    """Random observable with a random number of terms (degenerate when fewer than ``d``)."""
    top = d if max_terms is None else min(d, max_terms)
    k = int(rng.integers(1, top + 1))
    basis = haar_unitary(d, rng) if basis is None else basis
    return observable_from_basis(basis, surjective_labels(d, k, rng), distinct_values(k, rng))


def random_projector(d: int, rng: np.random.Generator, rank: int | None = None) -> Matrix:
    r = int(rng.integers(0, d + 1)) if rank is None else rank
    return projector_from_columns(haar_unitary(d, rng)[:, :r])


def commuting_projector_pair(d: int, rng: np.random.Generator) -> tuple[Matrix, Matrix]:
    v = haar_unitary(d, rng)
    a = rng.integers(0, 2, size=d).astype(bool)
    b = rng.integers(0, 2, size=d).astype(bool)
    return projector_from_columns(v[:, a]), projector_from_columns(v[:, b])


def _random_blocks(d: int, rng: np.random.Generator, max_blocks: int | None = None) -> np.ndarray:
    """Block label per basis vector; label ``-1`` means unused."""
    nblocks = int(rng.integers(1, (max_blocks or d) + 1))
    return rng.integers(-1, nblocks, size=d)


def orthogonal_family(d: int, rng: np.random.Generator) -> ProjectorSet:
    """Pairwise orthogonal projectors from disjoint column sets of one unitary.

    Members may be zero and need not sum to the identity.
    """
    v = haar_unitary(d, rng)
    blocks = _random_blocks(d, rng)
    members = [projector_from_columns(v[:, blocks == b]) for b in range(int(blocks.max()) + 1)]
    if not members:
        members = [np.zeros((d, d), dtype=np.complex128)]
    return ProjectorSet(tuple(members), d)


def random_subprojector(e: Matrix, rng: np.random.Generator, rank: int | None = None) -> Matrix:
    """Random projector ``G <= E`` onto a Haar-random subspace of ``range(E)``."""
    q = orthonormal_columns(e)
    r_e = q.shape[1]
    r = int(rng.integers(0, r_e + 1)) if rank is None else rank
    if r_e == 0 or r == 0:
        return np.zeros_like(e)
    return projector_from_columns(q @ haar_unitary(r_e, rng)[:, :r])


def propagation_instance(d: int, rng: np.random.Generator) -> tuple[Matrix, Matrix, Matrix]:
    """``(E, F, G)`` with ``EF = 0`` and ``G <= E``, G generic inside ``range(E)``."""
    v = haar_unitary(d, rng)
    side = rng.integers(0, 3, size=d)  # 0 -> E, 1 -> F, 2 -> neither
    e = projector_from_columns(v[:, side == 0])
    f = projector_from_columns(v[:, side == 1])
    return e, f, random_subprojector(e, rng)


def domination_instance(
    d: int, rng: np.random.Generator
) -> tuple[ProjectorSet, ProjectorSet, list[int]]:
    """Orthogonal families ``gs``, ``es`` and a map with ``gs[l] <= es[map[l]]``.

    Each ``E_k`` receives zero or more mutually orthogonal ``G``'s cut from a
    random orthonormal frame of its range; the map is generally not onto.
    """
    es = orthogonal_family(d, rng)
    gs: list[Matrix] = []
    assignment: list[int] = []
    for k, e in enumerate(es.members):
        q = orthonormal_columns(e)
        r = q.shape[1]
        if r == 0:
            continue
        frame = q @ haar_unitary(r, rng)
        pieces = _random_blocks(r, rng)
        for b in range(int(pieces.max()) + 1):
            gs.append(projector_from_columns(frame[:, pieces == b]))
            assignment.append(k)
    if not gs:
        gs, assignment = [np.zeros((d, d), dtype=np.complex128)], [0]
    return ProjectorSet(tuple(gs), d), es, assignment


def commuting_operator(o: SpectralForm, rng: np.random.Generator) -> Matrix:
    """Random non-Hermitian operator that is block diagonal in ``o``'s eigenspaces."""
    x = np.zeros((o.dim, o.dim), dtype=np.complex128)
    for e in o.projectors:
        q = orthonormal_columns(e)
        r = q.shape[1]
        block = rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))
        x += q @ block @ dagger(q)
    return x


def generic_operator(d: int, rng: np.random.Generator) -> Matrix:
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def commuting_observable(o: SpectralForm, rng: np.random.Generator) -> SpectralForm:
    """Random observable compatible with ``o``.

    Its eigenbasis is a random unitary mixing inside each eigenspace of
    ``o``, so it is generally not diagonal in any basis chosen for ``o``.
    """
    cols = []
    for e in o.projectors:
        q = orthonormal_columns(e)
        cols.append(q @ haar_unitary(q.shape[1], rng))
    basis = np.hstack(cols)
    k = int(rng.integers(1, o.dim + 1))
    return observable_from_basis(basis, surjective_labels(o.dim, k, rng), distinct_values(k, rng))


def compatible_family(
    d: int, count: int, rng: np.random.Generator, max_cells: int | None = None
) -> list[SpectralForm]:
    """``count`` pairwise compatible observables sharing one random eigenbasis.

    Basis vectors are grouped into at most ``max_cells`` cells and every
    observable is constant on cells, which bounds the number of terms of the
    maximal common refinement by the cell count.
    """
    top = d if max_cells is None else min(d, max_cells)
    cells = surjective_labels(d, int(rng.integers(1, top + 1)), rng)
    ncells = int(cells.max()) + 1
    v = haar_unitary(d, rng)
    out = []
    for _ in range(count):
        per_cell = compact(rng.integers(0, ncells, size=ncells))
        labels = per_cell[cells]
        out.append(observable_from_basis(v, labels, distinct_values(int(labels.max()) + 1, rng)))
    return out
