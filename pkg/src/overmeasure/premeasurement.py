"""Unitary premeasurement, calibration checks, collapse and joint sampling.

The measurement unitary is the projector-controlled cyclic shift
``U = sum_k E^k (x) S^k`` acting on object (x) pointer, with the pointer
starting in ``|0>``. An object vector inside ``range(E^k)`` therefore ends
up next to pointer state ``|k>``.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .compatibility import CommonRefinement, maximal_common_refinement
from .errors import CountMismatch, DimMismatch, IndexOutOfRange, NotUnit, ZeroProbabilityBranch
from .linalg import (
    DEFAULT_TOL,
    Matrix,
    Tolerance,
    Vector,
    as_vector,
    frozen,
    is_unitary,
    kron,
    norm,
)
from .observables import IndexSurjection, SpectralForm, coarsen_by_map
from .rng import SplitMix64


@dataclass(frozen=True, eq=False)
class PremeasurementSetup:
    """Object observable, co-indexed pointer observable, ready state and unitary.

    Construction checks shapes, unit norm, unitarity and term co-indexing.
    Calibration is a property of the unitary that is tested by
    :func:`check_calibration`, not enforced here, so that deliberately
    broken setups can be represented.
    """

    object_observable: SpectralForm
    pointer_observable: SpectralForm
    initial_pointer: np.ndarray
    unitary: np.ndarray
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self) -> None:
        object.__setattr__(self, "initial_pointer", frozen(self.initial_pointer))
        object.__setattr__(self, "unitary", frozen(self.unitary))
        da, db = self.object_observable.dim, self.pointer_observable.dim
        if len(self.pointer_observable) != len(self.object_observable):
            raise CountMismatch(
                f"{len(self.pointer_observable)} pointer positions for "
                f"{len(self.object_observable)} outcomes"
            )
        if self.initial_pointer.shape != (db,):
            raise DimMismatch(f"initial pointer has shape {self.initial_pointer.shape}, expected ({db},)")
        if abs(norm(self.initial_pointer) - 1.0) > self.tol.eps_eq:
            raise NotUnit("initial pointer state is not normalised")
        if self.unitary.shape != (da * db, da * db):
            raise DimMismatch(f"unitary has shape {self.unitary.shape}, expected {(da * db,) * 2}")
        if not is_unitary(self.unitary, self.tol):
            raise ValueError("measurement operator is not unitary")

    @property
    def dims(self) -> tuple[int, int]:
        return self.object_observable.dim, self.pointer_observable.dim

    @property
    def outcomes(self) -> int:
        return len(self.object_observable)

    def lifted_pointer(self, f: npt.ArrayLike) -> Matrix:
        """``I_A (x) F`` on the composite space."""
        return kron(np.eye(self.dims[0]), f)


@dataclass(frozen=True, eq=False)
class CompositeState:
    vector: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vector", frozen(self.vector))
        if self.vector.shape != (self.dims[0] * self.dims[1],):
            raise DimMismatch(f"vector shape {self.vector.shape} does not match dims {self.dims}")

    def object_marginal_vector(self) -> Vector | None:
        """Object factor if the state is a product with a pointer basis vector."""
        block = self.vector.reshape(self.dims)
        cols = [j for j in range(self.dims[1]) if norm(block[:, j]) > 1e-12]
        return block[:, cols[0]] if len(cols) == 1 else None


@dataclass(frozen=True)
class MeasurementOutcome:
    fine_index: int
    fine_value: float
    probability: float
    post_state: CompositeState


def _cyclic_shift(k: int) -> Matrix:
    return np.roll(np.eye(k, dtype=np.complex128), 1, axis=0)


def build_premeasurement(o: SpectralForm, tol: Tolerance = DEFAULT_TOL) -> PremeasurementSetup:
    k = len(o)
    pointer = SpectralForm(
        tuple(float(i) for i in range(k)),
        tuple(np.diag(np.eye(k)[i]).astype(np.complex128) for i in range(k)),
    )
    shift = _cyclic_shift(k)
    u = sum(kron(e, np.linalg.matrix_power(shift, i)) for i, e in enumerate(o.projectors))
    ready = np.zeros(k, dtype=np.complex128)
    ready[0] = 1.0
    return PremeasurementSetup(o, pointer, ready, u, tol)


def _require_unit(v: np.ndarray, tol: Tolerance) -> None:
    if abs(norm(v) - 1.0) > tol.eps_eq:
        raise NotUnit(f"state norm {norm(v)!r} differs from 1 by more than {tol.eps_eq:g}")


def evolve(setup: PremeasurementSetup, object_state: npt.ArrayLike) -> CompositeState:
    psi = as_vector(object_state)
    if psi.shape != (setup.dims[0],):
        raise DimMismatch(f"object state has dim {psi.shape[0]}, observable has {setup.dims[0]}")
    _require_unit(psi, setup.tol)
    return CompositeState(setup.unitary @ kron(psi, setup.initial_pointer), setup.dims)


def _evolve_batch(setup: PremeasurementSetup, psis: np.ndarray) -> np.ndarray:
    # columns of psis are object vectors; returns composite vectors as columns
    da, db = setup.dims
    joint = np.einsum("at,b->abt", psis, setup.initial_pointer).reshape(da * db, -1)
    return setup.unitary @ joint


def random_unit_vectors_in(
    projector: npt.ArrayLike, count: int, rng: np.random.Generator, tol: Tolerance = DEFAULT_TOL
) -> np.ndarray:
    """``count`` random unit vectors in ``range(projector)``, as columns.

    Complex Gaussian vectors are projected and normalised; draws that
    project to (numerically) zero are redrawn.
    """
    p = np.asarray(projector, dtype=np.complex128)
    d = p.shape[0]
    out = np.empty((d, count), dtype=np.complex128)
    filled = 0
    while filled < count:
        need = count - filled
        g = rng.standard_normal((d, need)) + 1j * rng.standard_normal((d, need))
        v = p @ g
        norms = np.linalg.norm(v, axis=0)
        ok = norms > 1e-6
        v = v[:, ok] / norms[ok]
        out[:, filled : filled + v.shape[1]] = v
        filled += v.shape[1]
    return out


def _sharpness_holds(
    setup: PremeasurementSetup,
    object_projector: np.ndarray,
    pointer_projector: np.ndarray,
    trials: int,
    seed: int,
) -> bool:
    if trials <= 0:
        return True
    rng = np.random.default_rng(seed)
    psis = random_unit_vectors_in(object_projector, trials, rng, setup.tol)
    phis = _evolve_batch(setup, psis)
    residual = setup.lifted_pointer(pointer_projector) @ phis - phis
    return bool(np.all(np.linalg.norm(residual, axis=0) <= setup.tol.eps_eq))


def _check_index(i: int, n: int, what: str) -> None:
    if not 0 <= i < n:
        raise IndexOutOfRange(f"{what} index {i} outside 0..{n - 1}")


def check_calibration(setup: PremeasurementSetup, k: int, trials: int = 100, seed: int = 0) -> bool:
    """Inputs sharp in ``E^k`` must come out sharp in pointer position ``F^k``."""
    _check_index(k, setup.outcomes, "outcome")
    return _sharpness_holds(
        setup,
        setup.object_observable.projectors[k],
        setup.pointer_observable.projectors[k],
        trials,
        seed,
    )


def coarse_pointer(
    setup: PremeasurementSetup, s: IndexSurjection, coarse_values: Sequence[float]
) -> SpectralForm:
    return coarsen_by_map(setup.pointer_observable, s, coarse_values, setup.tol)


def _class_projectors(form: SpectralForm, s: IndexSurjection, l: int) -> np.ndarray:
    return sum(form.projectors[k] for k in s.classes()[l])


def check_coarse_calibration(
    setup: PremeasurementSetup, s: IndexSurjection, l: int, trials: int = 100, seed: int = 0
) -> bool:
    """Inputs sharp in the coarse projector ``E^l`` come out sharp in ``F^l``.

    ``E^l`` and ``F^l`` are the sums over class ``l`` of ``s`` of the fine
    object and pointer projectors.
    """
    if s.fine_count != setup.outcomes:
        raise CountMismatch(f"surjection covers {s.fine_count} outcomes, setup has {setup.outcomes}")
    _check_index(l, s.coarse_count, "coarse")
    return _sharpness_holds(
        setup,
        _class_projectors(setup.object_observable, s, l),
        _class_projectors(setup.pointer_observable, s, l),
        trials,
        seed,
    )


def branch_probabilities(state: CompositeState, setup: PremeasurementSetup) -> np.ndarray:
    """Born probability of every pointer position."""
    block = state.vector.reshape(setup.dims)
    return np.array(
        [norm(block @ f.T) ** 2 for f in setup.pointer_observable.projectors]
    )


def collapse(
    state: CompositeState, setup: PremeasurementSetup, k: int
) -> MeasurementOutcome | None:
    """Project onto pointer position ``k`` and renormalise.

    Returns None for a branch of probability at most ``eps_eq``.
    """
    _check_index(k, setup.outcomes, "outcome")
    # (I (x) F) acting on the row-major (object, pointer) block is block @ F^T
    block = state.vector.reshape(setup.dims)
    branch = (block @ setup.pointer_observable.projectors[k].T).ravel()
    p = norm(branch) ** 2
    if p <= setup.tol.eps_eq:
        return None
    return MeasurementOutcome(
        fine_index=k,
        fine_value=setup.object_observable.values[k],
        probability=float(p),
        post_state=CompositeState(branch / np.sqrt(p), state.dims),
    )


def check_coarse_result_consistency(
    setup: PremeasurementSetup, s: IndexSurjection, state: CompositeState, k: int
) -> bool:
    """A collapsed fine branch ``k`` is sharp in the coarse pointer position ``s(k)``."""
    if s.fine_count != setup.outcomes:
        raise CountMismatch(f"surjection covers {s.fine_count} outcomes, setup has {setup.outcomes}")
    out = collapse(state, setup, k)
    if out is None:
        raise ZeroProbabilityBranch(f"branch {k} has zero probability")
    f = setup.lifted_pointer(_class_projectors(setup.pointer_observable, s, s[k]))
    phi = out.post_state.vector
    return norm(f @ phi - phi) <= setup.tol.eps_eq


class SimultaneousMeasurement:
    """Joint measurement of two compatible observables through their maximal common refinement.

    Building this once and calling :meth:`sample` repeatedly is the cheap
    way to draw many outcomes for one input state.
    """

    def __init__(
        self,
        o1: SpectralForm,
        o2: SpectralForm,
        object_state: npt.ArrayLike,
        tol: Tolerance = DEFAULT_TOL,
    ) -> None:
        self.first = o1
        self.second = o2
        self.refinement: CommonRefinement = maximal_common_refinement(o1, o2, tol)
        self.setup = build_premeasurement(self.refinement.refined, tol)
        self.final_state = evolve(self.setup, object_state)
        probs = branch_probabilities(self.final_state, self.setup)
        probs[probs <= tol.eps_eq] = 0.0
        self.probabilities = probs / probs.sum()
        self._cumulative = np.cumsum(self.probabilities)

    def values_of(self, k: int) -> tuple[float, float]:
        r = self.refinement
        return self.first.values[r.onto_first[k]], self.second.values[r.onto_second[k]]

    def draw_index(self, rng: SplitMix64) -> int:
        u = rng.random() * self._cumulative[-1]
        # first index whose cumulative mass exceeds u; zero-mass entries never qualify
        k = int(np.searchsorted(self._cumulative, u, side="right"))
        return min(k, len(self._cumulative) - 1)

    def sample(self, rng: SplitMix64) -> tuple[MeasurementOutcome, float, float]:
        k = self.draw_index(rng)
        outcome = collapse(self.final_state, self.setup, k)
        assert outcome is not None
        return (outcome, *self.values_of(k))


def simultaneous_measure(
    o1: SpectralForm,
    o2: SpectralForm,
    object_state: npt.ArrayLike,
    seed: int | SplitMix64,
    tol: Tolerance = DEFAULT_TOL,
) -> tuple[MeasurementOutcome, float, float]:
    """One joint outcome ``(fine outcome, value of o1, value of o2)``.

    ``seed`` may be an integer or a live :class:`SplitMix64`, which is
    advanced in place so that repeated calls continue the same stream.
    """
    global _last_prepared
    rng = seed if isinstance(seed, SplitMix64) else SplitMix64(seed)
    psi = as_vector(object_state)
    key = (psi.tobytes(), tol)
    cached = _last_prepared
    if cached is not None and cached[0] is o1 and cached[1] is o2 and cached[2] == key:
        sm = cached[3]
    else:
        sm = SimultaneousMeasurement(o1, o2, psi, tol)
        _last_prepared = (o1, o2, key, sm)
    return sm.sample(rng)


# Spectral forms are immutable, so the prepared measurement for the most
# recent (o1, o2, state) can be reused when a caller draws repeatedly.
_last_prepared: tuple | None = None
