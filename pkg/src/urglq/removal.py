"""Desired-signal removal: projector construction and quasi-covariance."""

from __future__ import annotations

import numpy as np

from .covariance import H, as_hermitian, hermitian_eig
from .errors import DegeneracyError, DomainError

MIN_ALPHA = 10.0
RECORDED_DATA_ALPHA = 1e4


def default_alpha(R_hat) -> float:
    """Construction scale used in simulations: ``100 * trace(R_hat)``."""
    return 100.0 * float(np.real(np.trace(R_hat)))


def build_covariance_like(a0, alpha: float) -> np.ndarray:
    """``C = alpha * a0 a0^H + I`` with ``alpha >= 10``."""
    if not alpha >= MIN_ALPHA:
        raise DomainError(f"alpha must be >= {MIN_ALPHA:g}, got {alpha!r}")
    a0 = np.asarray(a0, dtype=complex)
    return as_hermitian(alpha * np.outer(a0, np.conj(a0)) + np.eye(a0.shape[0]))


def projection_matrix(C, gap_rtol=1e-6) -> np.ndarray:
    """``B = I - p1 p1^H`` where ``p1`` is the dominant eigenvector of ``C``.

    Raises :class:`DegeneracyError` if the top eigenvalue is not separated
    from the second one by at least ``gap_rtol`` (relative).
    """
    mu, P = hermitian_eig(C)
    if mu[0] - mu[1] < gap_rtol * abs(mu[0]):
        raise DegeneracyError(f"top eigenvalue of C is not simple ({mu[0]:.6g} vs {mu[1]:.6g})")
    p1 = P[:, 0]
    # fix the global phase so that p1[0] is real and nonnegative
    k = np.flatnonzero(np.abs(p1) > 0)[0]
    p1 = p1 * np.exp(-1j * np.angle(p1[k]))
    return as_hermitian(np.eye(C.shape[0]) - np.outer(p1, np.conj(p1)))


def quasi_covariance(R_hat, B, noise_est: float) -> np.ndarray:
    """``B^H R_hat B + noise_est * I``."""
    if not noise_est > 0:
        raise DomainError(f"noise estimate must be positive, got {noise_est!r}")
    B = np.asarray(B, dtype=complex)
    R_t = H(B) @ np.asarray(R_hat, dtype=complex) @ B
    return as_hermitian(R_t + noise_est * np.eye(B.shape[0]))
