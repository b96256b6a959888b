"""Output SINR, beampatterns and deviation from the optimal beamformer."""

from __future__ import annotations

import numpy as np

from .arraymodel import ArrayGeometry, steering_matrix
from .errors import DegenerateWeightError, DomainError

# returned instead of -inf when the weights null the desired signal exactly
SINR_FLOOR_DB = -300.0


def _weights(w):
    return np.asarray(getattr(w, "weights", w), dtype=complex)


def output_sinr(w, desired_power: float, true_ipncm, true_desired_sv) -> float:
    """Output SINR in dB, ``sigma_s^2 |w^H a|^2 / (w^H R w)``.

    ``desired_power`` may also be a :class:`~urglq.arraymodel.SourceSpec`.
    """
    w = _weights(w)
    power = getattr(desired_power, "power", desired_power)
    denom = float(np.real(np.vdot(w, np.asarray(true_ipncm) @ w)))
    if not denom > 0:
        raise DegenerateWeightError("weights pass no interference-plus-noise power")
    num = power * abs(np.vdot(w, true_desired_sv)) ** 2
    if num <= 0:
        return SINR_FLOOR_DB
    return max(SINR_FLOOR_DB, float(10.0 * np.log10(num / denom)))


def beampattern(w, geometry: ArrayGeometry, grid):
    """Normalized power pattern ``20 log10 |w^H a(theta)|`` (peak at 0 dB).

    Returns ``(angles, power_db)`` arrays.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("beampattern grid is empty")
    response = np.abs(np.conj(_weights(w)) @ steering_matrix(geometry, grid))
    with np.errstate(divide="ignore"):
        power_db = 20.0 * np.log10(response / response.max())
    return grid, np.maximum(power_db, SINR_FLOOR_DB)


def deviation_from_optimal(sinr_db, sinr_opt_db):
    return np.subtract(sinr_opt_db, sinr_db)
