"""Gauss-Legendre quadrature and the midpoint Riemann sum it is compared with.

The reconstruction only ever needs the 3-point rule, whose nodes and weights
are known in closed form. The general-order machinery is here so the rule can
be cross-checked and so other orders can be benchmarked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class GlqRule:
    """Nodes on ``[-1, 1]`` and positive weights of an ``order``-point rule."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return len(self.nodes)

    def mapped(self, a: float, b: float):
        """Nodes and weights transplanted to ``[a, b]``."""
        half = 0.5 * (b - a)
        return 0.5 * (a + b) + half * self.nodes, half * self.weights


def legendre_polynomial(N: int, z, derivative=False):
    """Legendre polynomial ``P_N(z)`` by the three-term recurrence.

    With ``derivative=True`` returns ``(P_N(z), P_N'(z))``.
    """
    if int(N) != N or N < 0:
        raise DomainError(f"N must be a nonnegative integer, got {N!r}")
    z = np.asarray(z, dtype=float)
    p_prev, p = np.ones_like(z), z.copy()
    if N == 0:
        p = np.ones_like(z)
        return (p, np.zeros_like(z)) if derivative else p
    for n in range(2, N + 1):
        p_prev, p = p, ((2 * n - 1) * z * p - (n - 1) * p_prev) / n
    if not derivative:
        return p
    # P_N' = N (z P_N - P_{N-1}) / (z^2 - 1); the endpoints use P_N'(+-1) = (+-1)^(N-1) N(N+1)/2
    with np.errstate(divide="ignore", invalid="ignore"):
        dp = N * (z * p - p_prev) / (z * z - 1.0)
    ends = np.abs(z) == 1.0
    if np.any(ends):
        dp = np.where(ends, np.sign(z) ** (N - 1) * N * (N + 1) / 2.0, dp)
    return p, dp


def glq_rule(N: int, tol=1e-14, max_iter=100) -> GlqRule:
    """``N``-point Gauss-Legendre rule by Newton iteration on ``P_N``."""
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")
    i = np.arange(1, N + 1)
    z = np.cos(np.pi * (i - 0.25) / (N + 0.5))
    for _ in range(max_iter):
        p, dp = legendre_polynomial(N, z, derivative=True)
        step = p / dp
        z = z - step
        if np.max(np.abs(step)) < tol:
            break
    _, dp = legendre_polynomial(N, z, derivative=True)
    w = 2.0 / ((1.0 - z * z) * dp * dp)
    order = np.argsort(z)
    z, w = z[order], w[order]
    # symmetrize away the last-ulp asymmetry of the iteration
    z = 0.5 * (z - z[::-1])
    w = 0.5 * (w + w[::-1])
    return GlqRule(z, w)


def glq_rule_3() -> GlqRule:
    """The closed-form 3-point rule: nodes ``0, +-sqrt(15)/5``, weights ``8/9, 5/9``."""
    r = math.sqrt(15.0) / 5.0
    return GlqRule(np.array([-r, 0.0, r]), np.array([5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0]))


def interpolatory_weights(nodes) -> np.ndarray:
    """Weights of the interpolatory rule on ``[-1, 1]`` for arbitrary nodes.

    Each weight is the integral of the Lagrange basis polynomial of its node,
    ``h(z) / ((z - z_n) h'(z_n))`` with ``h`` the node polynomial.
    """
    P = np.polynomial.Polynomial
    nodes = np.asarray(nodes, dtype=float)
    h = P.fromroots(nodes)
    dh = h.deriv()
    weights = []
    for zn in nodes:
        basis = P.fromroots(nodes[nodes != zn]) * (1.0 / dh(zn))
        antider = basis.integ()
        weights.append(antider(1.0) - antider(-1.0))
    return np.array(weights)


def glq_integrate_scalar(f: Callable[[float], float], a: float, b: float, rule: GlqRule | None = None) -> float:
    if rule is None:
        rule = glq_rule_3()
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    nodes, weights = rule.mapped(a, b)
    return float(sum(w * f(x) for x, w in zip(nodes, weights)))


def glq_integrate_matrix(F: Callable[[float], np.ndarray], a: float, b: float, rule: GlqRule | None = None) -> np.ndarray:
    """Entrywise Gauss-Legendre quadrature of a matrix-valued function."""
    if rule is None:
        rule = glq_rule_3()
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    nodes, weights = rule.mapped(a, b)
    out = None
    for x, w in zip(nodes, weights):
        term = w * np.asarray(F(x))
        out = term if out is None else out + term
    return out


def riemann_sum_integrate(F: Callable[[float], np.ndarray], a: float, b: float, L: int) -> np.ndarray:
    """Midpoint sum ``sum_l F(theta_l) * (b - a) / L`` over ``L`` equal cells."""
    if int(L) != L or L < 1:
        raise DomainError(f"L must be a positive integer, got {L!r}")
    step = (b - a) / L
    out = None
    for l in range(L):
        term = step * np.asarray(F(a + (l + 0.5) * step))
        out = term if out is None else out + term
    return out
