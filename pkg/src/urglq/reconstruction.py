"""Capon spectrum and interference-plus-noise covariance reconstruction.

The reconstruction integrates ``a(t) a(t)^H / (a(t)^H R^-1 a(t))`` over the
interference sector, with ``t`` in radians. Each interval of the sector is
integrated separately and the pieces are summed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from .arraymodel import ArrayGeometry, _steering, steering_matrix
from .covariance import HermitianSolver, as_hermitian
from .errors import ConfigurationError, DomainError
from .quadrature import GlqRule, glq_integrate_matrix, glq_rule_3, riemann_sum_integrate


@dataclass(frozen=True)
class AngularSector:
    """Union of disjoint closed angle intervals, in degrees."""

    intervals: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        ivs = tuple(sorted((float(lo), float(hi)) for lo, hi in self.intervals))
        for lo, hi in ivs:
            if not lo < hi:
                raise DomainError(f"interval [{lo}, {hi}] is empty")
            if lo <= -90.0 or hi >= 90.0:
                raise DomainError(f"interval [{lo}, {hi}] leaves (-90, 90)")
        for (_, hi), (lo, _) in zip(ivs, ivs[1:]):
            if lo <= hi:
                raise DomainError("sector intervals must be pairwise disjoint")
        object.__setattr__(self, "intervals", ivs)

    def contains(self, angle: float) -> bool:
        return any(lo <= angle <= hi for lo, hi in self.intervals)

    @property
    def width(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)

    def __len__(self):
        return len(self.intervals)


def interference_sectors(presumed_doas: Sequence[float], half_width: float, desired_doa: float | None = None) -> AngularSector:
    """One interval ``[doa - half_width, doa + half_width]`` per presumed interferer.

    Raises :class:`ConfigurationError` if an interval would contain
    ``desired_doa`` or if two intervals overlap.
    """
    if not half_width > 0:
        raise DomainError(f"half_width must be positive, got {half_width!r}")
    intervals = [(d - half_width, d + half_width) for d in presumed_doas]
    if desired_doa is not None:
        for lo, hi in intervals:
            if lo <= desired_doa <= hi:
                raise ConfigurationError(
                    f"interference interval [{lo:g}, {hi:g}] contains the desired DOA {desired_doa:g}"
                )
    try:
        return AngularSector(tuple(intervals))
    except DomainError as exc:
        raise ConfigurationError(str(exc)) from exc


def capon_power(R, a) -> float:
    """Capon power ``1 / (a^H R^-1 a)``."""
    a = np.asarray(a, dtype=complex)
    return 1.0 / float(np.real(np.vdot(a, HermitianSolver(R).solve(a))))


def capon_spectrum(R, geometry: ArrayGeometry, angles) -> np.ndarray:
    """Capon power on a grid of angles (degrees)."""
    A = steering_matrix(geometry, angles)
    RiA = HermitianSolver(R).solve(A)
    return 1.0 / np.real(np.sum(np.conj(A) * RiA, axis=0))


def capon_integrand(R, geometry: ArrayGeometry):
    """``f(t) = a(t) a(t)^H / (a(t)^H R^-1 a(t))`` as a function of ``t`` in radians."""
    solver = HermitianSolver(R)

    def f(theta):
        a = _steering(geometry, theta)
        q = np.real(np.vdot(a, solver.solve(a)))
        return np.outer(a, np.conj(a)) / q

    return f


@dataclass(frozen=True)
class Riemann:
    """Midpoint summation with ``L`` cells in every interval of the sector."""

    L: int = 20

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise DomainError(f"L must be a positive integer, got {self.L!r}")


Method = Union[str, GlqRule, Riemann]


def reconstruct_ipncm(R_basis, sectors: AngularSector, geometry: ArrayGeometry, method: Method = "glq3") -> np.ndarray:
    """Integrate the Capon-weighted outer products over ``sectors``.

    ``method`` is ``"glq3"``, any :class:`GlqRule`, or :class:`Riemann` ``(L)``
    applied to each interval.
    """
    if len(sectors) == 0:
        raise DomainError("empty interference sector")
    f = capon_integrand(R_basis, geometry)
    bounds = [(math.radians(lo), math.radians(hi)) for lo, hi in sectors.intervals]

    if isinstance(method, str):
        if method != "glq3":
            raise DomainError(f"unknown reconstruction method {method!r}")
        method = glq_rule_3()
    if isinstance(method, GlqRule):
        parts = [glq_integrate_matrix(f, a, b, method) for a, b in bounds]
    elif isinstance(method, Riemann):
        parts = [riemann_sum_integrate(f, a, b, method.L) for a, b in bounds]
    else:
        raise DomainError(f"unknown reconstruction method {method!r}")
    return as_hermitian(sum(parts))
