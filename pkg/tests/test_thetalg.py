import itertools

import pytest

from ellipticore.errors import DomainError, ResonanceError
from ellipticore.qkernel import EvalOptions, jtheta, theta, vartheta
from ellipticore.suites import GENUS2_POINTS
from ellipticore.thetalg import (
    Genus2Tau,
    check_log_derivative_identities,
    check_quartic_identities,
    genus2_decomposition_residual,
    genus2_theta,
    multiply_theta,
    quarter_period_values,
)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def test_quartic_identities():
    r0 = check_quartic_identities(0, 1.2j)
    assert r0.residual <= 1e-13
    assert check_quartic_identities(0.3, 1.1j).residual <= 1e-12
    r = check_quartic_identities(0.2 + 0.4j, 0.3 + 1.5j)
    assert r.residual <= 1e-11
    assert len(r.details) == 8
    assert r.residual == max(v for _, v in r.details)


def test_log_derivative_identities():
    assert check_log_derivative_identities(0.25, 1.2j).residual <= 1e-11
    assert check_log_derivative_identities(0, 1.2j).residual <= 1e-13
    assert check_log_derivative_identities(0.1 - 0.2j, -0.3 + 0.95j).residual <= 1e-11


def test_log_derivative_antisymmetry():
    x, tau = 0.25, 1.2j
    d = {k: jtheta(k, x, tau, dx=1) / jtheta(k, x, tau) for k in (2, 3, 4)}
    for n, m in itertools.permutations((2, 3, 4), 2):
        assert d[n] - d[m] == -(d[m] - d[n])


def test_doubling():
    x, tau = 0.21, 1.15j
    assert rel(multiply_theta((1, 1), 2, x, tau), theta((1, 1), 2 * x, tau).value) < 1e-11
    for ch, k in (((1, 0), 2), ((0, 0), 3), ((0, 1), 4)):
        assert rel(multiply_theta(ch, 2, 0, tau), vartheta(k, tau)) < 1e-13


def test_multiplication_examples():
    assert rel(multiply_theta((0, 0), 5, 0.07, 1.3j), jtheta(3, 0.35, 1.3j)) < 1e-9


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("ch", [(1, 1), (1, 0), (0, 0), (0, 1), (3, 1)])
def test_multiplication_against_direct(ch, n):
    x, tau = 0.13 + 0.04j, 0.2 + 1.1j
    got, size = multiply_theta(ch, n, x, tau, with_scale=True)
    direct = theta(ch, n * x, tau).value
    assert abs(got - direct) <= 1e-9 * max(size, abs(direct))
    assert rel(got, direct) < 1e-9


def test_quadrupling_is_doubling_twice():
    x, tau = 0.09 + 0.02j, 1.2j
    for ch in ((1, 1), (1, 0), (0, 0), (0, 1)):
        twice = multiply_theta(ch, 4, x, tau)
        # double x once by the recursion, then double the result point again
        via = multiply_theta(ch, 2, 2 * x, tau)
        assert rel(twice, via) < 1e-9
        assert rel(multiply_theta(ch, 2, x, tau), theta(ch, 2 * x, tau).value) < 1e-11


def test_multiplication_guards():
    with pytest.raises(DomainError):
        multiply_theta((1, 1), 1, 0.1, 1j)
    # theta_2(2x) vanishes at x = 1/4, so level 4 divides by zero
    with pytest.raises(ResonanceError):
        multiply_theta((1, 0), 4, 0.25, 1.1j)


def test_quarter_values():
    q = quarter_period_values(1.2j)
    assert abs(q[4] - q[3]) <= 1e-12
    assert rel(q[4], jtheta(4, 0.25, 1.2j)) < 1e-12
    tau = 0.9j
    q = quarter_period_values(tau)
    v2, v3, v4 = (vartheta(k, tau) for k in (2, 3, 4))
    assert rel(2 * q[3] ** 4, v4 * v3**3 + v3 * v4**3) < 1e-11
    assert rel(2 * q[2] ** 4, v4 * v3**3 - v3 * v4**3) < 1e-11
    tau = 1.4j
    q = quarter_period_values(tau)
    v2, v3, v4 = (vartheta(k, tau) for k in (2, 3, 4))
    assert rel(q[1], v2**2 * v3 * v4 / (2 * q[2] * q[3] ** 2)) < 1e-11
    for k in (1, 2, 3, 4):
        assert rel(q[k], jtheta(k, 0.25, tau)) < 1e-11


def test_genus2_examples():
    assert genus2_decomposition_residual(Genus2Tau(1.5j, 1.5j), 0, 0) <= 1e-11
    assert genus2_decomposition_residual(Genus2Tau(1.2j, 1.7j), 0.1, 0.2) <= 1e-10


@pytest.mark.parametrize("tau,mu,z1,z2", GENUS2_POINTS)
def test_genus2_sample_points(tau, mu, z1, z2):
    assert genus2_decomposition_residual(Genus2Tau(tau, mu), z1, z2) <= 1e-10


def test_genus2_swap_symmetry():
    t = 1.3j
    z = 0.15 + 0.05j
    # repeated evaluation is bit-identical
    assert genus2_theta(Genus2Tau(t, t), z, z) == genus2_theta(Genus2Tau(t, t), z, z)
    # the double sum is symmetric under (z1, tau) <-> (z2, mu)
    p = genus2_theta(Genus2Tau(1.2j, 1.6j), 0.1, 0.3j)
    s = genus2_theta(Genus2Tau(1.6j, 1.2j), 0.3j, 0.1)
    assert rel(p, s) < 1e-12
    r1 = genus2_decomposition_residual(Genus2Tau(t, t), z, 0.2)
    r2 = genus2_decomposition_residual(Genus2Tau(t, t), 0.2, z)
    assert abs(r1 - r2) < 1e-12


def test_genus2_needs_half_offdiagonal():
    with pytest.raises(DomainError):
        Genus2Tau(1j, 1j, offdiag=0.3)


def test_residuals_do_not_grow_with_tighter_tolerance():
    x, tau = 0.2 + 0.1j, 0.3 + 1.1j
    loose = EvalOptions(rel_tol=1e-13)
    tight = EvalOptions(rel_tol=5e-14)
    assert check_quartic_identities(x, tau, tight).residual <= check_quartic_identities(x, tau, loose).residual + 1e-15
    assert (check_log_derivative_identities(x, tau, tight).residual
            <= check_log_derivative_identities(x, tau, loose).residual + 1e-15)
