"""Discrete observables in unique spectral form, coarsenings and refinements."""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .errors import (
    CountMismatch,
    DimMismatch,
    DuplicateCoarseValues,
    InvalidSpectralForm,
    NonFiniteImage,
    TooManyTerms,
)
from .linalg import (
    DEFAULT_TOL,
    Matrix,
    Tolerance,
    dagger,
    frozen,
    hermitian_eigendecomposition,
    is_projector,
    norm,
)

MAX_ENUMERATION_TERMS = 12


@dataclass(frozen=True)
class IndexSurjection:
    """Map from fine indices ``0..fine_count-1`` onto ``0..coarse_count-1``."""

    image: tuple[int, ...]
    coarse_count: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "image", tuple(int(i) for i in self.image))
        if any(i < 0 or i >= self.coarse_count for i in self.image):
            raise ValueError(f"image {self.image} leaves range 0..{self.coarse_count - 1}")
        if len(set(self.image)) != self.coarse_count:
            raise ValueError(f"map {self.image} is not onto 0..{self.coarse_count - 1}")

    @classmethod
    def identity(cls, n: int) -> IndexSurjection:
        return cls(tuple(range(n)), n)

    @classmethod
    def constant(cls, n: int) -> IndexSurjection:
        return cls((0,) * n, 1)

    @property
    def fine_count(self) -> int:
        return len(self.image)

    def __getitem__(self, k: int) -> int:
        return self.image[k]

    def classes(self) -> tuple[tuple[int, ...], ...]:
        """Preimage of each coarse index, in coarse order."""
        out: list[list[int]] = [[] for _ in range(self.coarse_count)]
        for k, l in enumerate(self.image):
            out[l].append(k)
        return tuple(tuple(c) for c in out)

    def then(self, outer: IndexSurjection) -> IndexSurjection:
        """Composition ``outer o self``."""
        if outer.fine_count != self.coarse_count:
            raise CountMismatch(
                f"cannot compose: inner has {self.coarse_count} targets, outer "
                f"expects {outer.fine_count}"
            )
        return IndexSurjection(tuple(outer.image[l] for l in self.image), outer.coarse_count)


@dataclass(frozen=True)
class Partition:
    """Set partition of ``0..n-1`` into disjoint nonempty classes."""

    classes: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        classes = tuple(tuple(sorted(int(i) for i in c)) for c in self.classes)
        object.__setattr__(self, "classes", classes)
        flat = [i for c in classes for i in c]
        if any(len(c) == 0 for c in classes):
            raise ValueError("partition has an empty class")
        if sorted(flat) != list(range(len(flat))):
            raise ValueError(f"classes {classes} do not partition 0..{len(flat) - 1}")

    @property
    def size(self) -> int:
        return sum(len(c) for c in self.classes)

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> Partition:
        blocks: list[list[int]] = []
        for i, b in enumerate(rgs):
            if b == len(blocks):
                blocks.append([])
            blocks[b].append(i)
        return cls(tuple(tuple(b) for b in blocks))

    def to_surjection(self) -> IndexSurjection:
        image = [0] * self.size
        for l, c in enumerate(self.classes):
            for k in c:
                image[k] = l
        return IndexSurjection(tuple(image), len(self.classes))

    def __str__(self) -> str:
        return "".join("{" + ",".join(map(str, c)) + "}" for c in self.classes)


def restricted_growth_strings(n: int) -> Iterator[tuple[int, ...]]:
    """All restricted growth strings of length ``n`` in lexicographic order.

    ``a[0] = 0`` and ``a[i] <= 1 + max(a[:i])``; each string encodes one set
    partition (element ``i`` goes to block ``a[i]``).
    """
    if n == 0:
        yield ()
        return
    a = [0] * n
    m = [0] * n  # m[i] = max(a[:i+1])
    while True:
        yield tuple(a)
        i = n - 1
        while i > 0 and a[i] == m[i - 1] + 1:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        m[i] = max(m[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            m[j] = m[i]


def set_partitions(n: int) -> Iterator[Partition]:
    for rgs in restricted_growth_strings(n):
        yield Partition.from_rgs(rgs)


def bell_number(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


@dataclass(frozen=True, eq=False)
class SpectralForm:
    """Observable ``sum_k values[k] * projectors[k]`` with strictly increasing values.

    The constructor checks shapes, finiteness and ordering only. The algebraic
    invariants (projector, orthogonality, completeness, no zero term) are
    checked by :meth:`validate`, which every library constructor calls.
    """

    values: tuple[float, ...]
    projectors: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        projectors = tuple(frozen(p) for p in self.projectors)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "projectors", projectors)
        if not values:
            raise InvalidSpectralForm("a spectral form needs at least one term")
        if len(values) != len(projectors):
            raise InvalidSpectralForm(f"{len(values)} values but {len(projectors)} projectors")
        if not all(math.isfinite(v) for v in values):
            raise InvalidSpectralForm("eigenvalues must be finite")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise InvalidSpectralForm(f"eigenvalues {values} are not strictly increasing")
        d = projectors[0].shape[0]
        for p in projectors:
            if p.shape != (d, d):
                raise InvalidSpectralForm(f"projector shape {p.shape}, expected {(d, d)}")

    @classmethod
    def from_terms(
        cls, terms: Sequence[tuple[float, npt.ArrayLike]], tol: Tolerance = DEFAULT_TOL
    ) -> SpectralForm:
        """Sort ``(value, projector)`` pairs by value and validate."""
        terms = sorted(((float(v), p) for v, p in terms), key=lambda t: t[0])
        for (a, _), (b, _) in zip(terms, terms[1:]):
            if a == b:
                raise DuplicateCoarseValues(f"eigenvalue {a!r} appears twice")
        form = cls(tuple(v for v, _ in terms), tuple(p for _, p in terms))
        form.validate(tol)
        return form

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def __len__(self) -> int:
        return len(self.values)

    @property
    def terms(self) -> list[tuple[float, np.ndarray]]:
        return list(zip(self.values, self.projectors))

    @property
    def matrix(self) -> Matrix:
        return sum(v * p for v, p in self.terms)

    def ranks(self) -> list[int]:
        return [int(round(np.trace(p).real)) for p in self.projectors]

    def validate(self, tol: Tolerance = DEFAULT_TOL) -> None:
        for k, p in enumerate(self.projectors):
            if not is_projector(p, tol):
                raise InvalidSpectralForm(f"term {k} is not a projector")
            if norm(p) <= 0.5:
                raise InvalidSpectralForm(f"term {k} is the zero projector")
        for k in range(len(self)):
            for j in range(k + 1, len(self)):
                if norm(self.projectors[k] @ self.projectors[j]) > tol.eps_eq:
                    raise InvalidSpectralForm(f"terms {k} and {j} are not orthogonal")
        if norm(sum(self.projectors) - np.eye(self.dim)) > tol.eps_eq:
            raise InvalidSpectralForm("projectors do not sum to the identity")

    def relabel(self, values: Sequence[float], tol: Tolerance = DEFAULT_TOL) -> SpectralForm:
        """Same projectors with new eigenvalues, re-sorted."""
        if len(values) != len(self):
            raise CountMismatch(f"{len(values)} values for {len(self)} terms")
        return SpectralForm.from_terms(list(zip(values, self.projectors)), tol)


def same_projectors(a: SpectralForm, b: SpectralForm, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Structural equality: same projector set, ignoring eigenvalues and term order."""
    if a.dim != b.dim or len(a) != len(b):
        return False
    unused = list(range(len(b)))
    for p in a.projectors:
        hit = next((j for j in unused if norm(p - b.projectors[j]) <= tol.eps_eq), None)
        if hit is None:
            return False
        unused.remove(hit)
    return True


def from_matrix(m: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL) -> SpectralForm:
    form = SpectralForm(*zip(*hermitian_eigendecomposition(m, tol)))
    form.validate(tol)
    return form


def _merge_close(values: Sequence[float], gap: float) -> tuple[list[float], list[int]]:
    """Group values whose sorted neighbours lie within ``gap``.

    Returns the ascending distinct representatives (group means) and, for
    every input position, the index of its group.
    """
    order = sorted(range(len(values)), key=lambda i: values[i])
    groups: list[list[int]] = []
    for i in order:
        if groups and values[i] - values[groups[-1][-1]] <= gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    reps = [float(np.mean([values[i] for i in g])) for g in groups]
    where = [0] * len(values)
    for l, g in enumerate(groups):
        for i in g:
            where[i] = l
    return reps, where


def _class_sum(o: SpectralForm, cls: Sequence[int]) -> Matrix:
    return sum(o.projectors[k] for k in cls)


def coarsen_by_function(
    o: SpectralForm, f: Callable[[float], float], tol: Tolerance = DEFAULT_TOL
) -> tuple[SpectralForm, IndexSurjection]:
    """Apply ``f`` to the eigenvalues and regroup equal images.

    Image values closer than ``eps_cluster`` are identified; the coarse
    eigenvalue is their mean.
    """
    images = [float(f(v)) for v in o.values]
    if not all(math.isfinite(x) for x in images):
        raise NonFiniteImage(f"f produced non-finite values {images}")
    reps, where = _merge_close(images, tol.eps_cluster)
    s = IndexSurjection(tuple(where), len(reps))
    coarse = SpectralForm(tuple(reps), tuple(_class_sum(o, c) for c in s.classes()))
    coarse.validate(tol)
    return coarse, s


def coarsen_by_map(
    o: SpectralForm,
    s: IndexSurjection,
    coarse_values: Sequence[float],
    tol: Tolerance = DEFAULT_TOL,
) -> SpectralForm:
    """Coarsening in the broad sense: merge the projectors of each class of ``s``.

    ``coarse_values[l]`` labels class ``l``; the values are free apart from
    being distinct. The result is re-sorted by value.
    """
    if s.fine_count != len(o):
        raise CountMismatch(f"surjection covers {s.fine_count} indices, observable has {len(o)}")
    if len(coarse_values) != s.coarse_count:
        raise CountMismatch(f"{len(coarse_values)} values for {s.coarse_count} classes")
    if len(set(float(v) for v in coarse_values)) != len(coarse_values):
        raise DuplicateCoarseValues(f"coarse values {list(coarse_values)} repeat")
    return SpectralForm.from_terms(
        [(v, _class_sum(o, c)) for v, c in zip(coarse_values, s.classes())], tol
    )


def is_refinement(
    fine: SpectralForm, coarse: SpectralForm, tol: Tolerance = DEFAULT_TOL
) -> IndexSurjection | None:
    """The surjection exhibiting ``fine`` as a refinement of ``coarse``, if any.

    For every fine projector exactly one coarse projector must dominate it
    (``E_k E^l = E_k``); the induced map must be onto and each coarse
    projector must equal the sum over its class.
    """
    if fine.dim != coarse.dim:
        raise DimMismatch(f"dimensions {fine.dim} and {coarse.dim} differ")
    image = []
    for e in fine.projectors:
        hits = [l for l, g in enumerate(coarse.projectors) if norm(e @ g - e) <= tol.eps_eq]
        if len(hits) != 1:
            return None
        image.append(hits[0])
    if len(set(image)) != len(coarse):
        return None
    s = IndexSurjection(tuple(image), len(coarse))
    for g, cls in zip(coarse.projectors, s.classes()):
        if norm(_class_sum(fine, cls) - g) > tol.eps_eq:
            return None
    return s


def orthonormal_columns(p: npt.ArrayLike, rank: int | None = None) -> Matrix:
    """Orthonormal basis of the column space of a projector.

    Gram-Schmidt with pivoting: at each step the remaining column of largest
    norm is normalised and projected out of the others. The rank defaults to
    the rounded trace.
    """
    a = np.array(p, dtype=np.complex128)
    if rank is None:
        rank = int(round(np.trace(a).real))
    basis = []
    for _ in range(rank):
        j = int(np.argmax(np.linalg.norm(a, axis=0)))
        q = a[:, j] / np.linalg.norm(a[:, j])
        for b in basis:  # re-orthogonalise against earlier vectors
            q = q - b * np.vdot(b, q)
        q = q / np.linalg.norm(q)
        basis.append(q)
        a = a - np.outer(q, q.conj() @ a)
    if not basis:
        return np.zeros((a.shape[0], 0), dtype=np.complex128)
    return np.column_stack(basis)


def complete_refinement(
    o: SpectralForm,
    value_assigner: Callable[[int], float] | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> SpectralForm:
    """Split every eigen-projector into rank-1 pieces.

    Pieces are produced term by term, basis vector by basis vector; piece
    number ``i`` in that order gets value ``value_assigner(i)`` (default
    ``i`` itself).
    """
    assign = value_assigner or float
    pieces = []
    for p in o.projectors:
        q = orthonormal_columns(p)
        for j in range(q.shape[1]):
            pieces.append(np.outer(q[:, j], q[:, j].conj()))
    return SpectralForm.from_terms([(assign(i), e) for i, e in enumerate(pieces)], tol)


def enumerate_coarsenings(
    o: SpectralForm, tol: Tolerance = DEFAULT_TOL
) -> Iterator[tuple[Partition, SpectralForm]]:
    """One coarsening per set partition of the term indices.

    Partitions come in restricted-growth-string order; class ``l`` of each
    partition gets eigenvalue ``l``. Raises :class:`TooManyTerms` right away
    (not on first iteration) above :data:`MAX_ENUMERATION_TERMS` terms.
    """
    if len(o) > MAX_ENUMERATION_TERMS:
        raise TooManyTerms(f"{len(o)} terms; Bell({len(o)}) coarsenings is too many")

    def gen() -> Iterator[tuple[Partition, SpectralForm]]:
        for part in set_partitions(len(o)):
            s = part.to_surjection()
            yield part, coarsen_by_map(o, s, list(range(s.coarse_count)), tol)

    return gen()


def projector_from_columns(q: npt.ArrayLike) -> Matrix:
    q = np.asarray(q, dtype=np.complex128)
    p = q @ dagger(q)
    return 0.5 * (p + dagger(p))
