"""Dense complex linear algebra on small matrices.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Functions here
never mutate their inputs; arrays they hand out are marked read-only when
they end up stored inside immutable containers elsewhere in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .errors import (
    ClusterAmbiguity,
    NotHermitian,
    NotSquare,
    OvermeasureError,
    ShapeMismatch,
)

Matrix = npt.NDArray[np.complex128]
Vector = npt.NDArray[np.complex128]

_MAX_SWEEPS = 100


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds shared by every predicate.

    ``eps_eq`` bounds the Frobenius (or vector 2-) norm of a difference that
    still counts as equality. ``eps_cluster`` is the eigenvalue gap below
    which two eigenvalues are refused as distinct.
    """

    eps_eq: float = 1e-9
    eps_cluster: float = 1e-6

    def __post_init__(self) -> None:
        if not (0.0 < self.eps_eq < self.eps_cluster):
            raise ValueError(
                f"need 0 < eps_eq < eps_cluster, got {self.eps_eq!r}, {self.eps_cluster!r}"
            )


DEFAULT_TOL = Tolerance()


def as_matrix(m: npt.ArrayLike) -> Matrix:
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeMismatch(f"expected a 2-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise OvermeasureError("matrix has non-finite entries")
    return a


def as_vector(v: npt.ArrayLike) -> Vector:
    a = np.array(v, dtype=np.complex128)
    if a.ndim != 1:
        raise ShapeMismatch(f"expected a 1-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise OvermeasureError("vector has non-finite entries")
    return a


def frozen(a: npt.ArrayLike) -> np.ndarray:
    """Read-only complex copy of ``a``."""
    out = np.array(a, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


def _require_square(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"matrix of shape {m.shape} is not square")


def dagger(m: Matrix) -> Matrix:
    return m.conj().T


def norm(m: np.ndarray) -> float:
    """Frobenius norm for matrices, 2-norm for vectors."""
    flat = np.ravel(m)
    return math.sqrt(np.vdot(flat, flat).real)


def kron(a: npt.ArrayLike, b: npt.ArrayLike) -> Matrix:
    """Kronecker product of two vectors or two matrices."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim == 1 and b.ndim == 1:
        return np.outer(a, b).ravel()
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeMismatch(f"kron of shapes {a.shape} and {b.shape}")
    (p, q), (r, s) = a.shape, b.shape
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(p * r, q * s)


def approx_eq(a: npt.ArrayLike, b: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes {a.shape} and {b.shape} differ")
    return norm(a - b) <= tol.eps_eq


def is_hermitian(m: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL) -> bool:
    m = np.asarray(m, dtype=np.complex128)
    _require_square(m)
    return norm(m - dagger(m)) <= tol.eps_eq


def is_projector(m: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL) -> bool:
    m = np.asarray(m, dtype=np.complex128)
    _require_square(m)
    return norm(m - dagger(m)) <= tol.eps_eq and norm(m @ m - m) <= tol.eps_eq


def is_unitary(m: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL) -> bool:
    m = np.asarray(m, dtype=np.complex128)
    _require_square(m)
    return norm(dagger(m) @ m - np.eye(m.shape[0])) <= tol.eps_eq


def jacobi_eigh(m: npt.ArrayLike) -> tuple[np.ndarray, Matrix]:
    """Eigenvalues and eigenvectors of a Hermitian matrix by cyclic Jacobi sweeps.

    Each off-diagonal entry ``a[p, q] = r e^{i phi}`` is first rotated to a
    real number by a diagonal phase and then annihilated by a real Givens
    rotation, so the combined 2x2 transformation is unitary. Sweeps repeat
    until the off-diagonal mass is at rounding level.

    Returns
    -------
    (w, v)
        Real eigenvalues sorted ascending and the unitary ``v`` whose columns
        are the matching eigenvectors, ``m = v diag(w) v^dagger``.
    """
    a = np.array(m, dtype=np.complex128)
    _require_square(a)
    n = a.shape[0]
    a = 0.5 * (a + dagger(a))
    v = np.eye(n, dtype=np.complex128)
    scale = max(norm(a), 1e-300)

    for _ in range(_MAX_SWEEPS):
        off = norm(a - np.diag(np.diag(a)))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-18 * scale:
                    a[p, q] = a[q, p] = 0.0
                    continue
                phase = apq / r
                alpha = a[p, p].real
                beta = a[q, q].real
                theta = (beta - alpha) / (2.0 * r)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # columns p, q of the unitary: diag(1, conj(phase)) @ [[c, s], [-s, c]]
                j = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ j
                a[idx, :] = dagger(j) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = alpha - t * r
                a[q, q] = beta + t * r
                v[:, idx] = v[:, idx] @ j
    else:
        raise OvermeasureError("Jacobi iteration did not converge")

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_eigendecomposition(
    m: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL
) -> list[tuple[float, Matrix]]:
    """Unique spectral decomposition ``[(eigenvalue, eigen-projector), ...]``.

    Raw eigenvalues within ``eps_eq`` of their neighbour are merged into one
    cluster (value = cluster mean, projector = sum of the rank-1 pieces).
    A neighbour gap in ``(eps_eq, eps_cluster]`` is neither noise nor a clear
    separation and raises :class:`ClusterAmbiguity`.
    """
    a = as_matrix(m)
    _require_square(a)
    if norm(a - dagger(a)) > tol.eps_eq:
        raise NotHermitian(f"matrix is not Hermitian: ||m - m^dagger|| = {norm(a - dagger(a)):.3e} > {tol.eps_eq:g}")
    w, v = jacobi_eigh(a)

    clusters: list[list[int]] = [[0]]
    for i in range(1, len(w)):
        gap = w[i] - w[i - 1]
        if gap <= tol.eps_eq:
            clusters[-1].append(i)
        elif gap <= tol.eps_cluster:
            raise ClusterAmbiguity(
                f"eigenvalues {w[i - 1]!r} and {w[i]!r} differ by {gap:.3e}, "
                f"inside the ambiguous band ({tol.eps_eq:g}, {tol.eps_cluster:g}]"
            )
        else:
            clusters.append([i])

    out = []
    for idx in clusters:
        vecs = v[:, idx]
        proj = vecs @ dagger(vecs)
        out.append((float(np.mean(w[idx])), 0.5 * (proj + dagger(proj))))
    return out
