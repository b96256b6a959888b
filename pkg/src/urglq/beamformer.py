"""Weight synthesis: MVDR, SMI, the LINEAR reconstruction baseline and URGLQ.

URGLQ runs, in order: sample covariance, covariance-like matrix
``alpha a0 a0^H + I``, projector off its dominant eigenvector,
quasi-covariance ``B^H R B + noise I``, Gauss-Legendre reconstruction over the
interference sectors, steering-vector correction, and finally MVDR weights
from the reconstructed covariance and the corrected vector.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .arraymodel import ArrayGeometry, steering_vector
from .correction import CorrectionResult, correct_steering
from .covariance import HermitianSolver, noise_power_estimate, sample_covariance
from .errors import ConditioningError, ConfigurationError, StageError
from .reconstruction import Riemann, interference_sectors, reconstruct_ipncm
from .removal import build_covariance_like, default_alpha, projection_matrix, quasi_covariance

log = logging.getLogger(__name__)

LOADING = 1e-12


@dataclass(frozen=True)
class BeamformerWeights:
    weights: np.ndarray
    label: str
    steering: np.ndarray  # the vector the weights are distortionless against

    def response(self, a) -> complex:
        return complex(np.vdot(self.weights, a))


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs of the URGLQ pipeline.

    alpha
        ``None`` scales the covariance-like matrix by ``100 trace(R_hat)``;
        a number is used as-is (``1e4`` is the choice for recorded data).
    half_width
        Half width in degrees of each interference interval.
    quadrature
        ``"glq3"`` for the 3-point rule; a :class:`Riemann` instance swaps in
        midpoint summation (used to compare the two integrators).
    correction
        Run the steering-vector correction step.
    noise_floor
        Add the noise estimate times the identity to the reconstruction.
        Off by default: the quasi-covariance already carries the noise
        estimate, and the reconstruction is used exactly as integrated.
    """

    alpha: Optional[float] = None
    half_width: float = 8.0
    quadrature: Union[str, Riemann] = "glq3"
    correction: bool = True
    noise_floor: bool = False

    def __post_init__(self):
        if not self.half_width > 0:
            raise ConfigurationError(f"half_width must be positive, got {self.half_width!r}")


@dataclass
class PipelineResult:
    weights: BeamformerWeights
    R_hat: np.ndarray
    B: np.ndarray
    R_tilde: np.ndarray
    R_inf: np.ndarray
    noise_est: float
    correction: Optional[CorrectionResult] = None
    stages: dict = field(default_factory=dict)


def _loaded_solver(R, label):
    try:
        return HermitianSolver(R)
    except ConditioningError:
        M = R.shape[0]
        load = LOADING * float(np.real(np.trace(R))) / M
        log.info("%s: covariance is singular, loading the diagonal by %.3g", label, load)
        return HermitianSolver(R + load * np.eye(M))


def mvdr_weights(R, a, label="mvdr") -> BeamformerWeights:
    """``w = R^-1 a / (a^H R^-1 a)``."""
    a = np.asarray(a, dtype=complex)
    Ria = _loaded_solver(np.asarray(R, dtype=complex), label).solve(a)
    # dividing by conj(Ria^H a) makes w^H a == 1 even when rounding leaves
    # a^H R^-1 a with a small imaginary part
    w = Ria / np.conj(np.vdot(Ria, a))
    return BeamformerWeights(w, label, a)


def optimal_weights(true_ipncm, true_sv) -> BeamformerWeights:
    return mvdr_weights(true_ipncm, true_sv, label="optimal")


def smi_weights(snapshots, a0) -> BeamformerWeights:
    R_hat = sample_covariance(snapshots)
    M, K = np.shape(snapshots)
    if K < M:
        R_hat = R_hat + LOADING * float(np.real(np.trace(R_hat))) / M * np.eye(M)
    return mvdr_weights(R_hat, a0, label="smi")


def _geometry_for(snapshots, geometry):
    if geometry is None:
        geometry = ArrayGeometry(np.shape(snapshots)[0], 0.5)
    if geometry.num_sensors != np.shape(snapshots)[0]:
        raise ConfigurationError(
            f"geometry has {geometry.num_sensors} sensors but snapshots have {np.shape(snapshots)[0]} rows"
        )
    return geometry


def _noise_floor(R_hat):
    """Smallest SCM eigenvalue, held at the loading level when the SCM is singular (K < M)."""
    M = R_hat.shape[0]
    est = noise_power_estimate(R_hat)
    floor = LOADING * float(np.real(np.trace(R_hat))) / M
    if est <= floor:
        log.info("sample covariance is singular, noise estimate raised from %.3g to %.3g", est, floor)
        return floor
    return est


class _Stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and not isinstance(exc, StageError):
            raise StageError(self.name, exc) from exc
        return False


def urglq_pipeline(
    snapshots,
    desired_doa: float,
    interference_doas: Sequence[float],
    geometry: ArrayGeometry | None = None,
    config: PipelineConfig | None = None,
) -> PipelineResult:
    """Run every URGLQ stage and keep the intermediate matrices."""
    config = config or PipelineConfig()
    geometry = _geometry_for(snapshots, geometry)
    M = geometry.num_sensors

    with _Stage("scm"):
        a0 = steering_vector(geometry, desired_doa)
        R_hat = sample_covariance(snapshots)
        noise_est = _noise_floor(R_hat)
    with _Stage("projection"):
        alpha = default_alpha(R_hat) if config.alpha is None else config.alpha
        B = projection_matrix(build_covariance_like(a0, alpha))
    with _Stage("quasi-covariance"):
        R_tilde = quasi_covariance(R_hat, B, noise_est)
    with _Stage("reconstruction"):
        if interference_doas:
            sectors = interference_sectors(interference_doas, config.half_width, desired_doa)
            R_inf = reconstruct_ipncm(R_tilde, sectors, geometry, config.quadrature)
            if config.noise_floor:
                R_inf = R_inf + noise_est * np.eye(M)
        else:
            # nothing to integrate; the quasi-covariance noise floor is all that is left
            R_inf = noise_est * np.eye(M, dtype=complex)
    correction = None
    a_hat = a0
    if config.correction:
        with _Stage("correction"):
            correction = correct_steering(a0, R_inf)
            a_hat = correction.corrected
    with _Stage("weights"):
        weights = mvdr_weights(R_inf, a_hat, label="urglq")
    return PipelineResult(weights, R_hat, B, R_tilde, R_inf, noise_est, correction)


def urglq_weights(snapshots, desired_doa, interference_doas, geometry=None, config=None) -> BeamformerWeights:
    return urglq_pipeline(snapshots, desired_doa, interference_doas, geometry, config).weights


def linear_baseline_weights(
    snapshots,
    desired_doa: float,
    interference_doas: Sequence[float],
    L: int = 20,
    geometry: ArrayGeometry | None = None,
    half_width: float = 8.0,
    noise_floor: bool = False,
) -> BeamformerWeights:
    """Midpoint-sum reconstruction from the raw sample covariance, presumed ``a0``."""
    geometry = _geometry_for(snapshots, geometry)
    M = geometry.num_sensors
    a0 = steering_vector(geometry, desired_doa)
    R_hat = sample_covariance(snapshots)
    with _Stage("reconstruction"):
        if interference_doas:
            sectors = interference_sectors(interference_doas, half_width, desired_doa)
            R_inf = reconstruct_ipncm(R_hat, sectors, geometry, Riemann(L))
            if noise_floor:
                R_inf = R_inf + noise_power_estimate(R_hat) * np.eye(M)
        else:
            R_inf = noise_power_estimate(R_hat) * np.eye(M, dtype=complex)
    with _Stage("weights"):
        return mvdr_weights(R_inf, a0, label="linear")
