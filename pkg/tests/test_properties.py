"""Property-based checks over random arguments and moduli."""

import cmath
import math

from hypothesis import given, settings
from hypothesis import strategies as st

from ellipticore.modular import UnimodularMap, reduce_to_fundamental, transform_theta1
from ellipticore.qkernel import Tau, jtheta, theta, theta_dtau, theta_dx
from ellipticore.weier import sigma, wp, wp_prime, zeta

PI = math.pi

coord = st.floats(-0.45, 0.45, allow_nan=False)
xs = st.builds(complex, coord, coord)
# moduli in a band where the q-series converges quickly
taus = st.builds(complex, st.floats(-0.5, 0.5), st.floats(0.8, 2.5))
chars = st.tuples(st.integers(-3, 3), st.integers(-3, 3))
SETTINGS = settings(max_examples=40, deadline=None)


def close(a, b, tol, floor=1e-300):
    """Relative comparison; ``floor`` stands in for the size of the summed terms near a zero."""
    return abs(a - b) <= tol * max(abs(a), abs(b), floor)


@SETTINGS
@given(chars, xs, taus, st.integers(-2, 2), st.integers(-2, 2))
def test_quasi_periodicity(ch, x, tau, n, m):
    a, b = ch
    got = theta(ch, x + n + m * tau, tau).value
    # each step x -> x + tau contributes exp(-pi i tau - 2 pi i x - pi i b)
    log_factor = PI * 1j * (a * n - m * m * tau - 2 * m * x - b * m)
    want = cmath.exp(log_factor) * theta(ch, x, tau).value
    assert abs(got - want) <= 1e-11 * max(abs(got), abs(want), abs(cmath.exp(log_factor)))


@SETTINGS
@given(chars, xs, taus)
def test_characteristic_shifts(ch, x, tau):
    a, b = ch
    t = theta(ch, x, tau).value
    assert close(theta((a + 2, b), x, tau).value, t, 1e-12)
    assert close(theta((a, b + 2), x, tau).value, (-1) ** a * t, 1e-12)


@SETTINGS
@given(chars, xs, taus)
def test_parity(ch, x, tau):
    a, b = ch
    # odd thetas pass through zero, where only an absolute bound on the O(1) terms makes sense
    assert close(theta(ch, -x, tau).value, (-1) ** (a * b) * theta(ch, x, tau).value, 1e-12, floor=1.0)


@SETTINGS
@given(chars, xs, taus)
def test_heat_equation(ch, x, tau):
    assert close(theta_dx(ch, x, tau, order=2), 4 * PI * 1j * theta_dtau(ch, x, tau), 1e-11, floor=4 * PI**2)


@SETTINGS
@given(st.builds(complex, st.floats(-20, 20), st.floats(0.02, 3)))
def test_reduction_round_trip(tau):
    r = reduce_to_fundamental(tau)
    t = r.reduced_tau.value
    assert abs(t.real) <= 0.5 + 1e-12 and abs(t) >= 1 - 1e-12
    assert abs(r.map.inverse().apply(t) - tau) <= 1e-11 * max(1, abs(tau))


@SETTINGS
@given(st.builds(complex, st.floats(-3, 3), st.floats(0.2, 2)), st.integers(-3, 3))
def test_theta1_law_under_generators(tau, n):
    x = 0.1 + 0.05j
    for m in (UnimodularMap.T(n), UnimodularMap.S()):
        got = transform_theta1(x, Tau(tau), m)
        direct = jtheta(1, x / m.factor(tau), m.apply(tau))
        assert close(got, direct, 1e-10)


maps = st.sampled_from([UnimodularMap.T(), UnimodularMap.S(), UnimodularMap.T(-1), UnimodularMap(2, 1, 1, 1)])


@given(st.lists(maps, min_size=1, max_size=6))
def test_map_inverse_and_compose(seq):
    g = UnimodularMap.identity()
    for m in seq:
        g = m.compose(g)
    assert g.compose(g.inverse()).as_tuple() == (1, 0, 0, 1)
    tau = 0.13 + 1.7j
    t = tau
    for m in seq:
        t = m.apply(t)
    assert abs(g.apply(tau) - t) <= 1e-12 * max(1, abs(t))


@SETTINGS
@given(xs.filter(lambda z: abs(z) > 0.05), taus)
def test_weierstrass_parity(x, tau):
    assert close(sigma(-x, tau), -sigma(x, tau), 1e-12)
    assert close(zeta(-x, tau), -zeta(x, tau), 1e-12)
    assert close(wp(-x, tau), wp(x, tau), 1e-12)
    assert close(wp_prime(-x, tau), -wp_prime(x, tau), 1e-12)
