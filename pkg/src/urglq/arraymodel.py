"""Uniform linear array model, steering vectors and array mismatch models.

Angles are in degrees at every public boundary. A steering vector is a plain
complex ``numpy`` vector of length ``M``; snapshot matrices are ``M x K``
with one snapshot per column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence, Union

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array.

    Parameters
    ----------
    num_sensors : int
        Number of sensors ``M`` (at least 2).
    spacing : float
        Inter-sensor spacing in wavelengths (``d / lambda``).
    """

    num_sensors: int = 10
    spacing: float = 0.5

    def __post_init__(self):
        if int(self.num_sensors) != self.num_sensors or self.num_sensors < 2:
            raise DomainError(f"num_sensors must be an integer >= 2, got {self.num_sensors!r}")
        if not self.spacing > 0:
            raise DomainError(f"spacing must be positive, got {self.spacing!r}")

    def steering_vector(self, angle: float) -> np.ndarray:
        return steering_vector(self, angle)

    def steering_matrix(self, angles) -> np.ndarray:
        return steering_matrix(self, angles)


@dataclass(frozen=True)
class SourceSpec:
    """A far-field narrowband source: DOA in degrees and linear power."""

    angle: float
    power: float
    kind: Literal["desired", "interference"] = "interference"

    def __post_init__(self):
        _check_angle(self.angle)
        if not self.power >= 0:
            raise DomainError(f"source power must be >= 0, got {self.power!r}")
        if self.kind not in ("desired", "interference"):
            raise DomainError(f"unknown source kind {self.kind!r}")


# -- mismatch models ---------------------------------------------------------


@dataclass(frozen=True)
class NoMismatch:
    name = "none"


@dataclass(frozen=True)
class RandomDoa:
    """DOA of every source shifted by ``U[-bound, bound]`` degrees per trial."""

    bound: float = 4.0
    name = "random_doa"

    def __post_init__(self):
        if not self.bound >= 0:
            raise DomainError("bound must be >= 0")


@dataclass(frozen=True)
class GainPhase:
    """Per-sensor gain ``N(0, gain_std^2)`` and phase ``N(0, phase_std^2)`` errors."""

    gain_std: float = 0.05
    phase_std: float = 0.025 * math.pi
    name = "gain_phase"

    def __post_init__(self):
        if not (self.gain_std >= 0 and self.phase_std >= 0):
            raise DomainError("gain_std and phase_std must be >= 0")


@dataclass(frozen=True)
class SvRandomError:
    """Additive error of norm ``U[0, rho_max]`` with uniform random phases."""

    rho_max: float = math.sqrt(0.3)
    name = "sv_random_error"

    def __post_init__(self):
        if not self.rho_max >= 0:
            raise DomainError("rho_max must be >= 0")


MismatchModel = Union[NoMismatch, RandomDoa, GainPhase, SvRandomError]

_MISMATCH_TYPES = {cls.name: cls for cls in (NoMismatch, RandomDoa, GainPhase, SvRandomError)}


def mismatch_from_dict(spec) -> MismatchModel:
    """Build a mismatch model from ``{"kind": name, **params}`` or a bare name."""
    if spec is None:
        return NoMismatch()
    if isinstance(spec, str):
        spec = {"kind": spec}
    spec = dict(spec)
    kind = spec.pop("kind", "none")
    try:
        cls = _MISMATCH_TYPES[kind]
    except KeyError:
        raise DomainError(f"unknown mismatch model {kind!r}; expected one of {sorted(_MISMATCH_TYPES)}")
    return cls(**spec)


def mismatch_to_dict(model: MismatchModel) -> dict:
    out = {"kind": model.name}
    out.update({k: v for k, v in vars(model).items()})
    return out


# -- steering vectors --------------------------------------------------------


def _check_angle(angle):
    if not -90.0 < angle < 90.0:
        raise DomainError(f"angle must lie in (-90, 90) degrees, got {angle!r}")


def steering_vector(geometry: ArrayGeometry, angle: float) -> np.ndarray:
    """Nominal ULA steering vector ``exp(j 2 pi d m sin(theta))``, ``m = 0..M-1``."""
    _check_angle(angle)
    return _steering(geometry, math.radians(angle))


def steering_matrix(geometry: ArrayGeometry, angles) -> np.ndarray:
    """Stack steering vectors for several angles (degrees) as columns."""
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    if np.any(angles <= -90.0) or np.any(angles >= 90.0):
        raise DomainError("angles must lie in (-90, 90) degrees")
    return _steering(geometry, np.deg2rad(angles))


def _steering(geometry, theta_rad):
    """Steering vector(s) for angle(s) in radians; no range check."""
    m = np.arange(geometry.num_sensors)
    theta_rad = np.asarray(theta_rad, dtype=float)
    phase = 2.0 * np.pi * geometry.spacing * np.multiply.outer(m, np.sin(theta_rad))
    return np.exp(1j * phase)


# -- snapshots ---------------------------------------------------------------


def complex_gaussian(rng: np.random.Generator, shape, power=1.0) -> np.ndarray:
    """Circular complex Gaussian samples with variance ``power``."""
    scale = math.sqrt(power / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def generate_snapshots(
    geometry: ArrayGeometry,
    sources: Sequence[SourceSpec],
    noise_power: float,
    K: int,
    rng_seed=None,
    steering_vectors: Sequence[np.ndarray] | None = None,
) -> np.ndarray:
    """Draw ``K`` array snapshots ``x(k) = sum_p a_p s_p(k) + n(k)``.

    Source waveforms and noise are i.i.d. circular complex Gaussian. By default
    each source uses its nominal steering vector; ``steering_vectors`` replaces
    them one-for-one (this is how mismatched truth is injected).

    ``rng_seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    if int(K) != K or K <= 0:
        raise DomainError(f"K must be a positive integer, got {K!r}")
    if not noise_power > 0:
        raise DomainError(f"noise_power must be positive, got {noise_power!r}")
    rng = np.random.default_rng(rng_seed)
    M = geometry.num_sensors
    if steering_vectors is None:
        steering_vectors = [steering_vector(geometry, s.angle) for s in sources]
    if len(steering_vectors) != len(sources):
        raise DomainError("one steering vector per source is required")

    x = complex_gaussian(rng, (M, K), noise_power)
    for src, a in zip(sources, steering_vectors):
        a = np.asarray(a, dtype=complex)
        if a.shape != (M,):
            raise DomainError(f"steering vector has shape {a.shape}, expected ({M},)")
        s = complex_gaussian(rng, K, src.power)
        x += np.outer(a, s)
    return x


# -- mismatch primitives -----------------------------------------------------


def apply_gain_phase_perturbation(sv, gains, phases) -> np.ndarray:
    """Scale element ``m`` by ``(1 + gains[m]) * exp(j phases[m])``."""
    sv = np.asarray(sv, dtype=complex)
    gains = np.asarray(gains, dtype=float)
    phases = np.asarray(phases, dtype=float)
    if gains.shape != sv.shape or phases.shape != sv.shape:
        raise DomainError(
            f"gains {gains.shape} and phases {phases.shape} must match the steering vector {sv.shape}"
        )
    return (1.0 + gains) * np.exp(1j * phases) * sv


def draw_gain_phase(model: GainPhase, M: int, rng: np.random.Generator):
    return model.gain_std * rng.standard_normal(M), model.phase_std * rng.standard_normal(M)


def apply_sv_random_error(sv, rho, phases=None, rng=None) -> np.ndarray:
    """Add ``xi`` with ``xi_m = rho / sqrt(M) * exp(j phases[m])``, so ``||xi|| = rho``.

    When ``phases`` is omitted they are drawn uniformly on ``[0, 2 pi)`` from ``rng``.
    """
    sv = np.asarray(sv, dtype=complex)
    if not rho >= 0:
        raise DomainError(f"rho must be >= 0, got {rho!r}")
    M = sv.shape[0]
    if phases is None:
        rng = np.random.default_rng(rng)
        phases = rng.uniform(0.0, 2.0 * np.pi, M)
    phases = np.asarray(phases, dtype=float)
    if phases.shape != sv.shape:
        raise DomainError(f"phases {phases.shape} must match the steering vector {sv.shape}")
    return sv + (rho / math.sqrt(M)) * np.exp(1j * phases)


def perturb_doa(angle: float, bound: float, rng) -> float:
    """Return ``angle + u`` with ``u ~ U[-bound, bound]`` (degrees)."""
    if not bound >= 0:
        raise DomainError(f"bound must be >= 0, got {bound!r}")
    if bound == 0:
        return float(angle)
    rng = np.random.default_rng(rng)
    return float(angle + rng.uniform(-bound, bound))
