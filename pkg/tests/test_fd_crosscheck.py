"""Finite-difference cross-checks of the term-wise derivatives.

The main suites never difference numerically. Here central differences with
one Richardson level check the analytic derivatives independently.
"""

import cmath
import math

import pytest

from ellipticore.modular import shift_half_period, theta_deriv_at_half_period, theta_deriv_shifted
from ellipticore.qkernel import eta_w, etahat, g2, g3, theta, theta_dtau, theta_dx, vartheta
from ellipticore.recur import build_table, n_poly, vartheta_deriv
from ellipticore.weier import sigma, wp, wp_prime, zeta

PI = math.pi
STEP = 1e-5
TOL = 1e-6


def richardson(f, z, h=STEP, direction=1):
    """First derivative by central differences, one Richardson level."""
    d = h * direction
    d1 = (f(z + d) - f(z - d)) / (2 * d)
    d2 = (f(z + 2 * d) - f(z - 2 * d)) / (4 * d)
    return (4 * d1 - d2) / 3


def second(f, z, h=1e-4):
    d1 = (f(z + h) - 2 * f(z) + f(z - h)) / h**2
    d2 = (f(z + 2 * h) - 2 * f(z) + f(z - 2 * h)) / (4 * h * h)
    return (4 * d1 - d2) / 3


def close(got, est, tol=TOL):
    return abs(got - est) <= tol * max(1.0, abs(got))


@pytest.mark.parametrize("ch", [(0, 0), (1, 0), (0, 1), (1, 1), (2, -1)])
def test_theta_x_derivative(ch):
    x, tau = 0.2 + 0.05j, 0.1 + 1.2j
    assert close(theta_dx(ch, x, tau), richardson(lambda u: theta(ch, u, tau).value, x))
    assert close(theta_dx(ch, x, tau, order=2), second(lambda u: theta(ch, u, tau).value, x), 1e-7)


@pytest.mark.parametrize("ch", [(0, 0), (1, 0), (0, 1), (1, 1)])
def test_theta_tau_derivative(ch):
    x, tau = 0.15, 0.2 + 1.4j
    est = richardson(lambda t: theta(ch, x, t).value, tau)
    assert close(theta_dtau(ch, x, tau), est, 1e-8)
    # the derivative is holomorphic, so an imaginary step must agree
    est_i = richardson(lambda t: theta(ch, x, t).value, tau, direction=1j)
    assert close(theta_dtau(ch, x, tau), est_i, 1e-8)


@pytest.mark.parametrize("tau", [1.1j, 0.3 + 1.2j, -0.4 + 0.9j])
def test_lattice_constant_derivatives(tau):
    for fn in (g2, g3, eta_w, etahat):
        got = fn(tau, dtau=1)
        assert close(got, richardson(fn, tau), 1e-8 * max(1, abs(fn(tau))))
    for k in (2, 3, 4):
        got = vartheta(k, tau, dtau=1)
        assert close(got, richardson(lambda t: vartheta(k, t), tau), 1e-8)


@pytest.mark.parametrize("tau", [1.3j, 0.3 + 1.2j])
def test_eta_is_log_derivative_of_etahat(tau):
    est = richardson(lambda t: cmath.log(etahat(t)), tau)
    assert abs(eta_w(tau) - PI / 1j * est) <= 1e-10 * abs(eta_w(tau))


def test_second_tau_derivative_of_vartheta4():
    tau = 1.2j
    est = second(lambda t: vartheta(4, t), tau)
    assert close(vartheta_deriv((0, 1), 2, tau), est)


def test_half_period_derivatives():
    t = 1.4j
    got = theta_deriv_at_half_period((1, 0), (0, 1), t)
    assert close(got, richardson(lambda u: theta((1, 0), u, t).value, t / 2), 1e-7)
    got = theta_deriv_shifted((0, 1), (1, 0), 0.25, 1.1j)
    assert close(got, richardson(lambda u: shift_half_period((0, 1), (1, 0), u, 1.1j), 0.25), 1e-7)


@pytest.mark.parametrize("x", [0.3, 0.2 + 0.4j])
def test_weierstrass_chain(x):
    tau = 0.1 + 1.2j
    assert close(zeta(x, tau), richardson(lambda u: sigma(u, tau), x) / sigma(x, tau))
    assert close(wp(x, tau), -richardson(lambda u: zeta(u, tau), x))
    assert close(wp_prime(x, tau), richardson(lambda u: wp(u, tau), x), 1e-6 * abs(wp_prime(x, tau)))


def _n_variants(nu, tau):
    G = build_table("G", nu)
    v2, v3, v4 = (vartheta(k, tau) ** 4 for k in (2, 3, 4))
    a = sum(G[nu - s, s] * v4**s * v2 ** (nu - s) for s in range(nu + 1))
    b = sum((-1) ** s * G[nu - s, s] * v3**s * v4 ** (nu - s) for s in range(nu + 1))
    c = sum((-1) ** s * G[s, nu - s] * v3**s * v2 ** (nu - s) for s in range(nu + 1))
    return a, b, c


@pytest.mark.parametrize("nu", range(7))
@pytest.mark.parametrize("tau", [1.1j, 0.3 + 1.2j])
def test_three_forms_of_theta1_polynomials(nu, tau):
    a, b, c = _n_variants(nu, tau)
    scale = max(abs(a), abs(b), abs(c), 1e-300)
    assert abs(a - b) <= 1e-12 * scale
    assert abs(a - c) <= 1e-12 * scale
    # the library stores the first form
    v2, v4 = vartheta(2, tau) ** 4, vartheta(4, tau) ** 4
    stored = sum(float(q) * v2 ** m[2] * v4 ** m[3] for m, q in n_poly(nu).terms())
    assert abs(stored - a) <= 1e-13 * max(abs(a), 1e-300)
