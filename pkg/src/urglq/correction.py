"""Steering-vector correction by a convex QCQP.

The corrected vector is ``x = a0 + e`` with ``e`` orthogonal to ``a0``. It
minimizes ``x^H R^-1 x`` (maximizes the Capon output power) subject to
``x^H R x <= a0^H R a0``, which keeps ``x`` from sliding into the
interference subspace. Both forms are positive definite, so the problem is
convex and the KKT conditions characterize the minimizer.

Stationarity over the affine set ``{x : a0^H x = ||a0||^2}`` with multiplier
``lam >= 0`` gives the closed form

    x(lam) = ||a0||^2 D^-1 a0 / (a0^H D^-1 a0),   D = R^-1 + lam R.

In the eigenbasis of ``R`` (eigenvalues ``r``), ``D^-1`` is diagonal with
entries ``r / (1 + lam r^2)``, which stay bounded even when ``R`` is nearly
singular. The constraint value ``x(lam)^H R x(lam)`` is nonincreasing in
``lam``; ``lam`` is its root against ``a0^H R a0``, found by a bracketed
search on ``log(lam)`` followed by secant polishing.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .covariance import H, HermitianSolver, PD_RTOL, as_hermitian
from .errors import ConvergenceError, DomainError

log = logging.getLogger(__name__)

MAX_ITER = 200
CONSTRAINT_RTOL = 1e-10
REGULARIZATION = 1e-12


@dataclass(frozen=True)
class ReducedQCQP:
    """``min_y y^H A y + 2 Re(y^H b) + f0`` s.t. ``y^H G y + 2 Re(y^H h) <= 0``.

    This is the problem after substituting ``e = Q y``, ``Q`` an orthonormal
    basis of the complement of ``a0``. ``c = a0^H R a0`` is the right-hand side
    of the original inequality, kept as the natural scale of the constraint.
    """

    a0: np.ndarray
    Q: np.ndarray
    A: np.ndarray
    b: np.ndarray
    f0: float
    G: np.ndarray
    h: np.ndarray
    c: float

    def point(self, y):
        return self.a0 + self.Q @ y

    def objective(self, y) -> float:
        return float(np.real(np.vdot(y, self.A @ y)) + 2.0 * np.real(np.vdot(y, self.b)) + self.f0)

    def constraint(self, y) -> float:
        """Constraint slack ``x^H R x - a0^H R a0`` (feasible when <= 0)."""
        return float(np.real(np.vdot(y, self.G @ y)) + 2.0 * np.real(np.vdot(y, self.h)))


@dataclass(frozen=True)
class CorrectionResult:
    corrected: np.ndarray
    e_perp: np.ndarray
    objective: float
    kkt_residual: float
    active_inequality: bool
    multiplier: float = 0.0
    iterations: int = 0


def complement_basis(a0) -> np.ndarray:
    """Orthonormal ``M x (M-1)`` basis of the orthogonal complement of ``a0``."""
    a0 = np.asarray(a0, dtype=complex)
    if np.linalg.norm(a0) == 0:
        raise DomainError("a0 must be nonzero")
    q, _ = np.linalg.qr(a0[:, None], mode="complete")
    return q[:, 1:]


def _regularized(R):
    """``R`` itself, or ``R`` plus a tiny diagonal load if it is not safely PD."""
    w = np.linalg.eigvalsh(R)
    if w[0] > PD_RTOL * max(abs(w[-1]), np.finfo(float).tiny):
        return R
    M = R.shape[0]
    load = REGULARIZATION * float(np.real(np.trace(R))) / M
    log.info("steering correction: covariance is singular, loading the diagonal by %.3g", load)
    return R + load * np.eye(M)


def _checked(a0, R_inf):
    a0 = np.asarray(a0, dtype=complex)
    if a0.ndim != 1 or np.linalg.norm(a0) == 0:
        raise DomainError("a0 must be a nonzero vector")
    R = as_hermitian(R_inf)
    if R.shape != (a0.shape[0], a0.shape[0]):
        raise DomainError(f"covariance shape {R.shape} does not match steering vector {a0.shape}")
    return a0, _regularized(R)


def reduce_to_subproblem(a0, R_inf) -> ReducedQCQP:
    a0, R = _checked(a0, R_inf)
    Q = complement_basis(a0)
    solver = HermitianSolver(R)
    Ri_Q = solver.solve(Q)
    Ri_a0 = solver.solve(a0)
    R_a0 = R @ a0
    return ReducedQCQP(
        a0=a0,
        Q=Q,
        A=as_hermitian(H(Q) @ Ri_Q),
        b=H(Q) @ Ri_a0,
        f0=float(np.real(np.vdot(a0, Ri_a0))),
        G=as_hermitian(H(Q) @ R @ Q),
        h=H(Q) @ R_a0,
        c=float(np.real(np.vdot(a0, R_a0))),
    )


def kkt_residual(prob: ReducedQCQP, y, lam) -> float:
    """Largest relative violation among stationarity, feasibility and complementarity."""
    Ay, Gy = prob.A @ y, prob.G @ y
    grad = Ay + prob.b + lam * (Gy + prob.h)
    scale = (np.linalg.norm(Ay) + np.linalg.norm(prob.b)
             + lam * (np.linalg.norm(Gy) + np.linalg.norm(prob.h)))
    stationarity = np.linalg.norm(grad) / scale if scale > 0 else 0.0
    g = prob.constraint(y) / prob.c
    complementarity = abs(g) if lam > 0 else 0.0
    return float(max(stationarity, max(g, 0.0), complementarity))


class _Secular:
    """Closed-form stationary point ``x(lam)`` in the eigenbasis of ``R``."""

    def __init__(self, a0, R):
        self.r, self.V = np.linalg.eigh(R)
        self.beta2 = np.abs(H(self.V) @ a0) ** 2
        self.beta = H(self.V) @ a0
        self.n2 = float(np.real(np.vdot(a0, a0)))
        self.c = float(np.sum(self.r * self.beta2))

    def _d(self, lam):
        return self.r / (1.0 + lam * self.r ** 2)

    def coords(self, lam):
        d = self._d(lam)
        return self.n2 * d * self.beta / np.sum(d * self.beta2)

    def phi(self, lam):
        """``x(lam)^H R x(lam) - a0^H R a0`` divided by ``a0^H R a0``."""
        d = self._d(lam)
        s = np.sum(d * self.beta2)
        val = self.n2 ** 2 * np.sum(self.r * d * d * self.beta2) / (s * s)
        return float(val / self.c - 1.0)

    def objective(self, lam):
        d = self._d(lam)
        s = np.sum(d * self.beta2)
        # |coord|^2 / r = n2^2 d^2 beta2 / (r s^2) and d^2 / r = r / (1 + lam r^2)^2
        return float(self.n2 ** 2 * np.sum(self.r / (1.0 + lam * self.r ** 2) ** 2 * self.beta2) / (s * s))

    def point(self, lam):
        return self.V @ self.coords(lam)


def _find_multiplier(sec: _Secular, max_iter=MAX_ITER, rtol=CONSTRAINT_RTOL):
    """Root of the nonincreasing function ``sec.phi`` on ``lam > 0``."""
    it = 0
    r_ref = float(np.max(np.abs(sec.r)))
    lam = 1.0 / r_ref ** 2
    val = sec.phi(lam)
    lo = hi = None
    # bracket by decades
    while it < max_iter:
        it += 1
        if abs(val) <= rtol:
            return lam, it
        if val > 0:
            lo = (lam, val)
            if hi is not None:
                break
            lam *= 10.0
        else:
            hi = (lam, val)
            if lo is not None:
                break
            lam /= 10.0
        val = sec.phi(lam)
    if lo is None or hi is None:
        raise ConvergenceError("could not bracket the constraint multiplier", best=lam)
    # bisection on log(lam), switching to secant steps once the bracket is tight
    while it < max_iter:
        it += 1
        (l0, v0), (l1, v1) = lo, hi
        if l1 / l0 < 1.5 and v0 != v1:
            lam = l0 - v0 * (l1 - l0) / (v1 - v0)
            if not l0 < lam < l1:
                lam = math.sqrt(l0 * l1)
        else:
            lam = math.sqrt(l0 * l1)
        val = sec.phi(lam)
        if abs(val) <= rtol:
            return lam, it
        if val > 0:
            lo = (lam, val)
        else:
            hi = (lam, val)
        if hi[0] - lo[0] <= 4 * np.finfo(float).eps * hi[0]:
            # the bracket cannot shrink further; hi is feasible
            if abs(hi[1]) <= math.sqrt(rtol):
                return hi[0], it
            break
    raise ConvergenceError(
        f"multiplier search did not reach the constraint tolerance in {it} iterations", best=hi[0]
    )


def correct_steering(a0, R_inf) -> CorrectionResult:
    """Correct the presumed steering vector ``a0`` against the reconstructed covariance."""
    a0, R = _checked(a0, R_inf)
    sec = _Secular(a0, R)
    if sec.phi(0.0) <= CONSTRAINT_RTOL:
        lam, iterations = 0.0, 0
    else:
        try:
            lam, iterations = _find_multiplier(sec)
        except ConvergenceError as exc:
            lam = exc.best
            exc.best = _result(a0, R, sec, lam, MAX_ITER)
            raise
    return _result(a0, R, sec, lam, iterations)


def _result(a0, R, sec, lam, iterations):
    x = sec.point(lam)
    Q = complement_basis(a0)
    y = H(Q) @ (x - a0)
    prob = reduce_to_subproblem(a0, R)
    obj = prob.objective(y)
    if obj >= prob.f0:
        # e = 0 is always feasible; only a rounding-level multiplier error can
        # make the closed-form point look worse, so fall back to it
        y = np.zeros_like(y)
        obj = prob.f0
    e = Q @ y
    return CorrectionResult(
        corrected=a0 + e,
        e_perp=e,
        objective=obj,
        kkt_residual=kkt_residual(prob, y, lam),
        active_inequality=lam > 0,
        multiplier=float(lam),
        iterations=iterations,
    )
