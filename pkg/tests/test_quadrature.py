import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from urglq.arraymodel import ArrayGeometry
from urglq.arraymodel import _steering
from urglq.errors import DomainError
from urglq.quadrature import (glq_integrate_matrix, glq_integrate_scalar, glq_rule, glq_rule_3,
                              interpolatory_weights, legendre_polynomial, riemann_sum_integrate)

finite = st.floats(-10.0, 10.0)


def trapezoid(f, a, b, n):
    x = np.linspace(a, b, n + 1)
    y = np.array([f(t) for t in x]) if not np.isscalar(f(a)) else f(x)
    h = (b - a) / n
    return h * (y[1:-1].sum(axis=0) + 0.5 * (y[0] + y[-1]))


def test_legendre_values():
    z = np.linspace(-1, 1, 41)
    np.testing.assert_allclose(legendre_polynomial(3, z), (5 * z**3 - 3 * z) / 2, atol=1e-15)
    assert legendre_polynomial(3, 1.0) == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_array_equal(legendre_polynomial(0, z), np.ones_like(z))
    assert abs(legendre_polynomial(3, math.sqrt(3 / 5))) < 1e-14


@given(st.integers(0, 12), st.floats(-1.0, 1.0))
def test_legendre_matches_numpy(N, z):
    ref = np.polynomial.legendre.legval(z, [0] * N + [1])
    assert abs(legendre_polynomial(N, z) - ref) < 1e-12


def test_legendre_derivative_endpoints():
    for N in range(1, 8):
        c = [0] * N + [1]
        dref = np.polynomial.legendre.Legendre(c).deriv()
        for z in (-1.0, -0.3, 0.5, 1.0):
            assert legendre_polynomial(N, z, derivative=True)[1] == pytest.approx(dref(z), abs=1e-12)


def test_three_point_rule():
    rule = glq_rule_3()
    assert rule.nodes[0] == pytest.approx(-math.sqrt(15) / 5, abs=1e-16)
    assert rule.nodes[0] == pytest.approx(-0.7745967, abs=1e-7)
    np.testing.assert_allclose(rule.weights, [5 / 9, 8 / 9, 5 / 9], rtol=1e-15)
    assert abs(rule.weights.sum() - 2.0) < 1e-12
    assert rule.order == 3


@pytest.mark.parametrize("N", [1, 2, 3, 4, 7, 12, 20])
def test_general_rule_matches_leggauss(N):
    rule = glq_rule(N)
    z, w = np.polynomial.legendre.leggauss(N)
    np.testing.assert_allclose(rule.nodes, z, atol=1e-14)
    np.testing.assert_allclose(rule.weights, w, atol=1e-14)
    assert np.all(np.diff(rule.nodes) > 0)
    np.testing.assert_array_equal(rule.nodes, -rule.nodes[::-1])
    assert np.all(rule.weights > 0) and abs(rule.weights.sum() - 2) < 1e-12


def test_generic_weights_reproduce_closed_form():
    rule = glq_rule_3()
    np.testing.assert_allclose(interpolatory_weights(rule.nodes), rule.weights, atol=1e-14)


@pytest.mark.parametrize("k", range(6))
def test_monomials_exact_up_to_five(k):
    exact = 2.0 / (k + 1) if k % 2 == 0 else 0.0
    got = glq_integrate_scalar(lambda z: z**k, -1.0, 1.0)
    assert abs(got - exact) <= 1e-12 * max(abs(exact), 1.0)


def test_sixth_degree_defect():
    got = glq_integrate_scalar(lambda z: z**6, -1.0, 1.0)
    assert abs(got - 2 / 7) / (2 / 7) > 1e-3
    # known defect: 2/7 - (10/9) (3/5)^3
    assert got == pytest.approx(10 / 9 * 0.216, rel=1e-14)


def test_scalar_examples():
    assert abs(glq_integrate_scalar(lambda z: z**5 + z**3, -1, 1)) < 1e-14
    assert abs(glq_integrate_scalar(lambda z: z**4, -1, 1) - 0.4) < 1e-14
    ref = trapezoid(np.sin, 0.0, math.pi, 1_000_000)
    assert abs(ref - 2.0) < 1e-10
    assert abs(glq_integrate_scalar(math.sin, 0.0, math.pi) - ref) < 2e-3


def test_interval_order_enforced():
    with pytest.raises(DomainError):
        glq_integrate_scalar(math.sin, 1.0, 1.0)
    with pytest.raises(DomainError):
        glq_integrate_matrix(lambda t: np.eye(2), 2.0, 1.0)
    with pytest.raises(DomainError):
        riemann_sum_integrate(lambda t: np.eye(2), 0.0, 1.0, 0)


def test_matrix_examples():
    np.testing.assert_allclose(glq_integrate_matrix(lambda t: np.eye(3), 0, 1), np.eye(3), atol=1e-15)
    A = np.array([[1, 2j], [-2j, 5]])
    np.testing.assert_allclose(glq_integrate_matrix(lambda t: t * A, 0, 2), 2 * A, atol=1e-14)


def test_matrix_steering_outer_product_vs_dense_trapezoid():
    g = ArrayGeometry(2, 0.5)
    F = lambda t: np.outer(_steering(g, t), np.conj(_steering(g, t)))
    ref = trapezoid(F, -0.1, 0.1, 100_000)
    got = glq_integrate_matrix(F, -0.1, 0.1)
    assert np.linalg.norm(got - ref) <= 1e-4 * np.linalg.norm(ref)


@given(st.floats(-5, 5), st.floats(0.01, 5), st.floats(0.01, 5), finite, finite)
@settings(max_examples=50)
def test_linearity_and_additivity(a, w1, w2, c1, c2):
    f = lambda x: math.cos(x) + x**2
    g = lambda x: math.exp(-x * x)
    b, c = a + w1, a + w1 + w2
    lin = glq_integrate_scalar(lambda x: c1 * f(x) + c2 * g(x), a, b)
    sep = c1 * glq_integrate_scalar(f, a, b) + c2 * glq_integrate_scalar(g, a, b)
    assert abs(lin - sep) <= 1e-12 * (abs(c1) + abs(c2) + 1) * (1 + abs(a) + w1) ** 3
    # per-interval application is additive by construction
    whole = glq_integrate_scalar(f, a, b) + glq_integrate_scalar(f, b, c)
    assert whole == glq_integrate_scalar(f, a, b) + glq_integrate_scalar(f, b, c)


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
@settings(max_examples=30)
def test_psd_integrand_gives_psd(seed, M):
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))
    F = lambda t: (G * np.exp(1j * t)) @ (G * np.exp(1j * t)).conj().T * (1 + t * t)
    for out in (glq_integrate_matrix(F, -1.0, 2.0), riemann_sum_integrate(F, -1.0, 2.0, 7)):
        tr = np.real(np.trace(out))
        assert np.linalg.eigvalsh((out + out.conj().T) / 2)[0] >= -1e-10 * tr


@pytest.mark.parametrize("L", [1, 3, 20])
def test_riemann_constant(L):
    C = np.array([[2.0, 1j], [-1j, 3.0]])
    np.testing.assert_allclose(riemann_sum_integrate(lambda t: C, -0.5, 1.5, L), 2 * C, rtol=1e-14)


def test_riemann_convergence_rate():
    g = ArrayGeometry(4, 0.5)
    F = lambda t: np.outer(_steering(g, t), np.conj(_steering(g, t)))
    ref = glq_integrate_matrix(F, 0.2, 0.6, glq_rule(30))
    errs = [np.linalg.norm(riemann_sum_integrate(F, 0.2, 0.6, L) - ref) for L in (10, 20, 40, 80)]
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    # midpoint rule is second order: error at least halves per doubling (about 4x)
    assert np.all(ratios >= 2.0)
    assert np.all(np.abs(ratios - 4.0) < 0.2)
