"""Hermitian covariance construction and dense linear-algebra kernels."""

from __future__ import annotations

import logging
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg as la

from .arraymodel import ArrayGeometry, SourceSpec, steering_vector
from .errors import ConditioningError, DomainError

log = logging.getLogger(__name__)

HERMITIAN_RTOL = 1e-12
# smallest admissible eigenvalue of a "positive definite" matrix, relative to the largest
PD_RTOL = 1e-14


def H(A):
    """Conjugate transpose."""
    return np.conj(np.swapaxes(A, -1, -2))


def as_hermitian(A, rtol=None) -> np.ndarray:
    """Return ``(A + A^H) / 2`` as a complex array.

    If ``rtol`` is given, raise :class:`DomainError` when the skew part
    exceeds ``rtol`` times the Frobenius norm of ``A``.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {A.shape}")
    if rtol is not None:
        scale = np.linalg.norm(A)
        skew = np.linalg.norm(A - H(A))
        if skew > rtol * max(scale, np.finfo(float).tiny):
            raise DomainError(f"matrix is not Hermitian (relative skew {skew / scale:.3g})")
    return 0.5 * (A + H(A))


class EigenDecomposition(NamedTuple):
    """Eigenvalues in descending order and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def sample_covariance(snapshots) -> np.ndarray:
    """Sample covariance ``(1/K) X X^H`` of an ``M x K`` snapshot matrix."""
    X = np.asarray(snapshots, dtype=complex)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[1] < 1:
        raise DomainError("snapshot matrix must be M x K with K >= 1")
    return as_hermitian(X @ H(X) / X.shape[1])


def hermitian_eig(A, rtol=HERMITIAN_RTOL) -> EigenDecomposition:
    A = as_hermitian(A, rtol=rtol)
    w, V = np.linalg.eigh(A)
    return EigenDecomposition(w[::-1].copy(), V[:, ::-1].copy())


def hermitian_solve(A, b) -> np.ndarray:
    """Solve ``A x = b`` for Hermitian positive definite ``A``.

    Uses a Cholesky factorization; if that fails the eigendecomposition is
    used instead, and a :class:`ConditioningError` is raised when the
    smallest eigenvalue is not safely positive. ``b`` may be a vector or a
    matrix of right-hand sides.
    """
    A = as_hermitian(A, rtol=HERMITIAN_RTOL)
    b = np.asarray(b, dtype=complex)
    try:
        return la.cho_solve(la.cho_factor(A, lower=True, check_finite=True), b)
    except la.LinAlgError:
        pass
    w, V = np.linalg.eigh(A)
    if w[0] <= PD_RTOL * max(abs(w[-1]), np.finfo(float).tiny):
        raise ConditioningError(
            f"matrix is not positive definite (eigenvalue range [{w[0]:.3g}, {w[-1]:.3g}])"
        )
    log.debug("Cholesky failed, solved through eigendecomposition (cond %.3g)", w[-1] / w[0])
    return V @ ((H(V) @ b) / (w if b.ndim == 1 else w[:, None]))


class HermitianSolver:
    """Factor a Hermitian PD matrix once and solve for many right-hand sides."""

    def __init__(self, A):
        A = as_hermitian(A, rtol=HERMITIAN_RTOL)
        self._cho = None
        self._eig = None
        try:
            self._cho = la.cho_factor(A, lower=True)
        except la.LinAlgError:
            w, V = np.linalg.eigh(A)
            if w[0] <= PD_RTOL * max(abs(w[-1]), np.finfo(float).tiny):
                raise ConditioningError(
                    f"matrix is not positive definite (eigenvalue range [{w[0]:.3g}, {w[-1]:.3g}])"
                )
            self._eig = (w, V)

    def solve(self, b):
        b = np.asarray(b, dtype=complex)
        if self._cho is not None:
            return la.cho_solve(self._cho, b)
        w, V = self._eig
        return V @ ((H(V) @ b) / (w if b.ndim == 1 else w[:, None]))


def noise_power_estimate(R) -> float:
    """Smallest eigenvalue of ``R``, the usual white-noise floor estimate."""
    return float(np.linalg.eigvalsh(as_hermitian(R))[0])


def true_ipncm(geometry: ArrayGeometry, interferers: Sequence[SourceSpec], noise_power: float,
               steering_vectors=None) -> np.ndarray:
    """Interference-plus-noise covariance ``sum_p s_p a_p a_p^H + noise * I``.

    ``steering_vectors`` optionally overrides the nominal interferer steering
    vectors (mismatched ground truth).
    """
    M = geometry.num_sensors
    R = noise_power * np.eye(M, dtype=complex)
    if steering_vectors is None:
        steering_vectors = [steering_vector(geometry, s.angle) for s in interferers]
    for src, a in zip(interferers, steering_vectors):
        if src.kind == "desired":
            raise DomainError("true_ipncm takes interferers only")
        R += src.power * np.outer(a, np.conj(a))
    return as_hermitian(R)
