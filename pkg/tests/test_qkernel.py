import cmath
import math

import pytest

from _frozen import CONSTANTS, THETA, THETA_CHAR, THETA_DX
from ellipticore.errors import DomainError, TruncationError
from ellipticore.qkernel import (
    Characteristic,
    EvalOptions,
    Tau,
    eta_w,
    etahat,
    g2,
    g3,
    jtheta,
    theta,
    theta_dtau,
    theta_dx,
    theta_series,
    vartheta,
)
from ellipticore.suites import FUNDAMENTAL_GRID

PI = math.pi


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


@pytest.mark.parametrize("key", sorted(THETA, key=str))
def test_classical_theta_matches_reference(key):
    k, x, tau = key
    assert rel(jtheta(k, x, tau), THETA[key]) < 1e-13


@pytest.mark.parametrize("key", sorted(THETA_DX, key=str))
def test_theta_x_derivative_matches_reference(key):
    k, x, tau = key
    assert rel(jtheta(k, x, tau, dx=1), THETA_DX[key]) < 1e-13


@pytest.mark.parametrize("key", sorted(THETA_CHAR, key=str))
def test_general_characteristic_and_tau_derivative(key):
    char, x, tau = key
    value, dtau = THETA_CHAR[key]
    assert rel(theta(char, x, tau).value, value) < 1e-13
    assert rel(theta_dtau(char, x, tau), dtau) < 1e-12


@pytest.mark.parametrize("tau", sorted(CONSTANTS, key=lambda t: (t.real, t.imag)))
def test_lattice_constants_match_reference(tau):
    ref = CONSTANTS[tau]
    assert rel(etahat(tau), ref["etahat"]) < 1e-13
    assert rel(eta_w(tau), ref["eta"]) < 1e-13
    assert rel(g2(tau), ref["g2"]) < 1e-12 or abs(g2(tau)) < 1e-12 * abs(ref["g3"])
    assert rel(g3(tau), ref["g3"]) < 1e-12 or abs(g3(tau)) < 1e-12 * abs(ref["g2"])


def test_theta1_vanishes_at_origin():
    for tau in (1j, 0.3 + 1.2j, -0.5 + 0.9j):
        assert theta((1, 1), 0, tau).value == 0


def test_cusp_limits():
    assert abs(theta((0, 0), 0, 50j).value - 1) < 1e-15
    assert abs(vartheta(3, 50j) - 1) < 1e-15
    assert abs(vartheta(2, 50j)) < 1e-15
    assert rel(g2(50j), PI**4 / 12) < 1e-14
    assert rel(g3(50j), PI**6 / 216) < 1e-14
    assert rel(eta_w(50j), PI**2 / 12) < 1e-14
    assert rel(etahat(50j), cmath.exp(1j * PI * 50j / 12)) < 1e-15


def test_brute_force_sum():
    x, tau = 0.1 + 0.2j, 0.3 + 1.1j
    ref = sum(cmath.exp(1j * PI * k * k * tau + 2j * PI * k * x) for k in range(-200, 201))
    assert rel(theta((0, 0), x, tau).value, ref) < 1e-13


def test_etahat_product_form():
    q2 = cmath.exp(2j * PI * 1j)
    prod = cmath.exp(1j * PI * 1j / 12)
    for k in range(1, 61):
        prod *= 1 - q2**k
    assert rel(etahat(1j), prod) < 1e-14


def test_even_derivative_at_origin_and_heat_identity():
    for tau in (1.3j, 0.2 + 1.1j):
        assert abs(theta_dx((0, 0), 0, tau)) < 1e-15
        lhs = theta_dtau((0, 0), 0, tau)
        rhs = theta_dx((0, 0), 0, tau, order=2) / (4j * PI)
        assert rel(lhs, rhs) < 1e-12
    assert theta_dtau((1, 1), 0, 1.2j) == 0


@pytest.mark.parametrize("tau", FUNDAMENTAL_GRID)
def test_jacobi_formula_and_quartic(tau):
    t1p = jtheta(1, 0, tau, dx=1)
    assert abs(t1p - 2 * PI * etahat(tau) ** 3) <= 1e-12 * abs(t1p)
    v2, v3, v4 = (vartheta(k, tau) for k in (2, 3, 4))
    assert abs(v3**4 - v2**4 - v4**4) <= 1e-13 * abs(v3**4)


def test_symmetric_lattice_zeros():
    assert abs(g3(1j)) <= 1e-13 * abs(g2(1j))
    rho = cmath.exp(1j * PI / 3)
    assert abs(g2(rho)) <= 1e-13 * abs(g3(rho))


def test_characteristic_shift_law():
    x, tau = 0.17 + 0.05j, 0.2 + 1.1j
    for a, b in ((0, 0), (1, 0), (0, 1), (1, 1)):
        base = theta((a, b), x, tau).value
        assert rel(theta((a + 2, b), x, tau).value, base) < 1e-14
        assert rel(theta((a, b + 2), x, tau).value, (-1) ** a * base) < 1e-14


def test_characteristic_reduction_bookkeeping():
    assert Characteristic(1, 1).classical_index == 1
    assert Characteristic(1, 1).classical_sign == -1
    assert Characteristic(3, 3).classical_sign == 1
    assert Characteristic(2, 1).classical_index == 4
    assert Characteristic(0, 1).parity == 1 and Characteristic(-1, 3).parity == 0


def test_domain_errors():
    with pytest.raises(DomainError):
        Tau(0.3 - 0.1j)
    with pytest.raises(DomainError):
        Tau(0.3)
    with pytest.raises(DomainError):
        EvalOptions(rel_tol=0)
    with pytest.raises(DomainError):
        EvalOptions(max_terms=0)
    with pytest.raises(DomainError):
        vartheta(1, 1j)
    with pytest.raises(DomainError):
        Characteristic(0.5, 1)


def test_truncation_reports_partial_sum():
    with pytest.raises(TruncationError) as info:
        theta_series((0, 0), 0, 0.5 + 0.001j, opts=EvalOptions(max_terms=5))
    assert info.value.terms_used > 0
    assert info.value.tail_estimate > 0


def test_bookkeeping_of_series():
    tv = theta_series((0, 0), 0.2, 1.2j)
    assert tv.terms_used > 0
    assert tv.tail_estimate <= 1e-15 * (abs(tv.value) + 10)
