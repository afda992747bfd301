"""Partial order and lattice operations on orthogonal projectors.

``E <= F`` means ``EF = E`` (range of ``E`` inside range of ``F``). The
closed-form meet of commuting projectors and join of orthogonal families are
checked against subspace oracles computed from singular value decompositions.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .errors import DimMismatch, NotAProjector, NotCommuting, NotOrthogonal, PreconditionViolated
from .linalg import DEFAULT_TOL, Matrix, Tolerance, dagger, frozen, is_projector, norm


@dataclass(frozen=True)
class ProjectorSet:
    members: tuple[np.ndarray, ...]
    dim: int

    def __post_init__(self) -> None:
        members = tuple(frozen(m) for m in self.members)
        object.__setattr__(self, "members", members)
        for m in members:
            if m.shape != (self.dim, self.dim):
                raise DimMismatch(f"member of shape {m.shape} in a dim-{self.dim} set")

    @classmethod
    def of(cls, members: Sequence[npt.ArrayLike], tol: Tolerance = DEFAULT_TOL) -> ProjectorSet:
        members = [np.asarray(m, dtype=np.complex128) for m in members]
        if not members:
            raise ValueError("use ProjectorSet((), dim) for an empty set")
        out = cls(tuple(members), members[0].shape[0])
        out.check(tol)
        return out

    def check(self, tol: Tolerance = DEFAULT_TOL) -> None:
        for i, m in enumerate(self.members):
            if not is_projector(m, tol):
                raise NotAProjector(f"member {i} is not a projector")

    def __len__(self) -> int:
        return len(self.members)

    def pairwise_orthogonal(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        ms = self.members
        return all(
            norm(ms[i] @ ms[j]) <= tol.eps_eq
            for i in range(len(ms))
            for j in range(i + 1, len(ms))
        )

    def total(self) -> Matrix:
        return sum(self.members, np.zeros((self.dim, self.dim), dtype=np.complex128))


def _check_pair(*ps: np.ndarray, tol: Tolerance) -> list[np.ndarray]:
    out = [np.asarray(p, dtype=np.complex128) for p in ps]
    shape = out[0].shape
    for p in out:
        if p.shape != shape:
            raise DimMismatch(f"shapes {shape} and {p.shape} differ")
        if not is_projector(p, tol):
            raise NotAProjector("argument is not a projector")
    return out


def is_zero(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
    return norm(m) <= tol.eps_eq


def leq(e: npt.ArrayLike, f: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Quantum-logical implication ``E <= F``, i.e. ``EF = E``."""
    e, f = _check_pair(e, f, tol=tol)
    return norm(e @ f - e) <= tol.eps_eq


def glb_commuting(e: npt.ArrayLike, f: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL) -> Matrix:
    """Meet of two commuting projectors, which is simply their product."""
    e, f = _check_pair(e, f, tol=tol)
    ef = e @ f
    if norm(ef - f @ e) > tol.eps_eq:
        raise NotCommuting(f"||[E, F]|| = {norm(ef - f @ e):.3e}")
    return 0.5 * (ef + dagger(ef))


def lub_orthogonal(s: ProjectorSet, tol: Tolerance = DEFAULT_TOL) -> Matrix:
    """Join of a pairwise orthogonal family, which is simply its sum."""
    s.check(tol)
    if not s.pairwise_orthogonal(tol):
        raise NotOrthogonal("members are not pairwise orthogonal")
    return s.total()


def orthogonality_propagates(
    e: npt.ArrayLike, f: npt.ArrayLike, g: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL
) -> bool:
    """Instance of: ``EF = 0`` and ``G <= E`` imply ``GF = 0``.

    True whenever the hypotheses fail.
    """
    e, f, g = _check_pair(e, f, g, tol=tol)
    if not (is_zero(e @ f, tol) and leq(g, e, tol)):
        return True
    return is_zero(g @ f, tol)


def sum_dominates(
    gs: ProjectorSet,
    es: ProjectorSet,
    assignment: Sequence[int],
    tol: Tolerance = DEFAULT_TOL,
) -> bool:
    """Whether ``sum(gs) <= sum(es)`` given ``gs[l] <= es[assignment[l]]``.

    Both families must be pairwise orthogonal; ``assignment`` need not be
    onto. Under valid preconditions the answer is always True.
    """
    gs.check(tol)
    es.check(tol)
    if gs.dim != es.dim:
        raise DimMismatch(f"dimensions {gs.dim} and {es.dim} differ")
    if len(assignment) != len(gs):
        raise PreconditionViolated(f"assignment has {len(assignment)} entries for {len(gs)} members")
    if not gs.pairwise_orthogonal(tol):
        raise PreconditionViolated("lower family is not pairwise orthogonal")
    if not es.pairwise_orthogonal(tol):
        raise PreconditionViolated("upper family is not pairwise orthogonal")
    for l, k in enumerate(assignment):
        if not 0 <= k < len(es):
            raise PreconditionViolated(f"assignment sends {l} to missing index {k}")
        if not leq(gs.members[l], es.members[k], tol):
            raise PreconditionViolated(f"member {l} is not below its assigned member {k}")
    return leq(gs.total(), es.total(), tol)


def _rank_cutoff(n: int, tol: Tolerance) -> float:
    return tol.eps_eq * max(1, n)


def range_projector(columns: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL) -> Matrix:
    """Projector onto the column space of an arbitrary matrix."""
    a = np.asarray(columns, dtype=np.complex128)
    if a.size == 0:
        return np.zeros((a.shape[0], a.shape[0]), dtype=np.complex128)
    u, sv, _ = np.linalg.svd(a, full_matrices=False)
    q = u[:, sv > _rank_cutoff(a.shape[0], tol)]
    return q @ dagger(q)


def kernel_projector(m: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL) -> Matrix:
    """Projector onto the null space of ``m``."""
    m = np.asarray(m, dtype=np.complex128)
    n = m.shape[1]
    _, sv, vh = np.linalg.svd(m, full_matrices=True)
    sv = np.concatenate([sv, np.zeros(n - len(sv))])
    q = dagger(vh)[:, sv <= _rank_cutoff(n, tol)]
    return q @ dagger(q)


def brute_force_glb(e: npt.ArrayLike, f: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL) -> Matrix:
    """Projector onto ``range(E) & range(F)``, for any two projectors.

    The intersection is the common kernel of ``I - E`` and ``I - F``.
    """
    e, f = _check_pair(e, f, tol=tol)
    eye = np.eye(e.shape[0])
    return kernel_projector(np.vstack([eye - e, eye - f]), tol)


def span_lub(s: ProjectorSet, tol: Tolerance = DEFAULT_TOL) -> Matrix:
    """Projector onto the span of all member ranges, for any family."""
    if len(s) == 0:
        return np.zeros((s.dim, s.dim), dtype=np.complex128)
    return range_projector(np.hstack(s.members), tol)
