"""Weierstrass functions for the lattice with half-periods (1, tau).

Bridge to theta
---------------
With eta = zeta(1), etahat the Dedekind function and y = u/2::

    sigma(u)  = exp(eta u^2 / 2) theta_1(y) / (pi etahat^3)
    zeta(u)   = eta u + (1/2) L1
    wp(u)     = -eta - (1/4) (L2 - L1^2)
    wp'(u)    = -(1/8) (L3 - 3 L2 L1 + 2 L1^3)

where Lj = theta_1^(j)(y) / theta_1(y). These follow from zeta = (log sigma)',
wp = -zeta' and the chain rule d/du = (1/2) d/dy; no numerical
differentiation is involved. theta_1'(0) = 2 pi etahat^3 makes sigma'(0) = 1.

Half-period labels: e1 = wp(1), e2 = wp(1 + tau), e3 = wp(tau).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from sympy.polys.domains import QQ

from .errors import DomainError, InvalidRepresentationError, PoleError
from .qkernel import Characteristic, EvalOptions, Tau, eta_w, etahat, jtheta, vartheta_char
from .qkernel import g2 as hurwitz_g2, g3 as hurwitz_g3
from .recur import G_RING, T_RING, T_P, T_U, T_V, SeriesPoly, halphen_g

PI = math.pi

POLE_THRESHOLD = 1e-12

#: Homogeneity weight w: f(x | omega, omega') = omega^w f(x/omega | 1, omega'/omega).
WEIGHTS = {
    "sigma": 1, "sigma1": 0, "sigma2": 0, "sigma3": 0, "zeta": -1, "wp": -2, "wp_prime": -3,
    "g2": -4, "g3": -6, "e1": -2, "e2": -2, "e3": -2, "eta": -1,
}

#: Branch-point label -> characteristic (gamma, delta) of the table e_{gamma delta}.
BRANCH_CHARS = {1: (1, 0), 2: (0, 0), 3: (0, 1)}


def half_period(lam: int, tau) -> complex:
    """omega_lambda with omega_1 = 1, omega_2 = 1 + tau, omega_3 = tau."""
    t = Tau.coerce(tau).value
    return {1: 1.0 + 0j, 2: 1 + t, 3: t}[lam]


def _sgn(n: int) -> int:
    return -1 if n % 2 else 1


def _log_derivs(u, tau, opts, order):
    """theta_1 at y = u/2 and the ratios L1..L_order; pole guard applied."""
    tau = Tau.coerce(tau)
    y = complex(u) / 2
    t = jtheta(1, y, tau, opts=opts)
    scale = abs(2 * PI * etahat(tau, opts) ** 3)
    if abs(t) < POLE_THRESHOLD * scale:
        raise PoleError(f"x = {complex(u)!r} is a lattice point (sigma vanishes)")
    return t, [jtheta(1, y, tau, dx=j, opts=opts) / t for j in range(1, order + 1)]


def sigma(x, tau, opts: EvalOptions | None = None) -> complex:
    """Weierstrass sigma(x | 1, tau)."""
    tau = Tau.coerce(tau)
    u = complex(x)
    return cmath.exp(eta_w(tau, opts) * u * u / 2) * jtheta(1, u / 2, tau, opts=opts) / (PI * etahat(tau, opts) ** 3)


def sigma_lambda(lam: int, x, tau, opts: EvalOptions | None = None) -> complex:
    """sigma_lambda(x | 1, tau) = exp(eta x^2/2) theta_{lam+1}(x/2) / vartheta_{lam+1}."""
    if lam not in (1, 2, 3):
        raise DomainError(f"lambda must be 1, 2 or 3, got {lam!r}")
    tau = Tau.coerce(tau)
    u = complex(x)
    k = lam + 1
    return cmath.exp(eta_w(tau, opts) * u * u / 2) * jtheta(k, u / 2, tau, opts=opts) / jtheta(k, 0, tau, opts=opts)


def zeta(x, tau, opts: EvalOptions | None = None) -> complex:
    """Weierstrass zeta(x | 1, tau)."""
    _, (L1,) = _log_derivs(x, tau, opts, 1)
    return eta_w(tau, opts) * complex(x) + L1 / 2


def wp(x, tau, opts: EvalOptions | None = None) -> complex:
    """Weierstrass wp(x | 1, tau)."""
    _, (L1, L2) = _log_derivs(x, tau, opts, 2)
    return -eta_w(tau, opts) - (L2 - L1 * L1) / 4


def wp_prime(x, tau, opts: EvalOptions | None = None) -> complex:
    """Derivative of wp(x | 1, tau) in x."""
    _, (L1, L2, L3) = _log_derivs(x, tau, opts, 3)
    return -(L3 - 3 * L2 * L1 + 2 * L1**3) / 8


# constants ----------------------------------------------------------------------

def _v4(a, b, tau, opts):
    return vartheta_char((a, b), tau, opts) ** 4


def branch_point(gamma_delta, tau, opts: EvalOptions | None = None) -> complex:
    """e_{gamma delta} = (pi^2/12)(<delta> vartheta_{gamma-1,0}^4 - <gamma> vartheta_{0,delta-1}^4).

    (1,0) gives e1, (0,0) gives e2, (0,1) gives e3 and (1,1) gives 0.
    """
    ch = Characteristic.coerce(gamma_delta)
    g, d = ch.alpha, ch.beta
    return PI**2 / 12 * (_sgn(d) * _v4(g - 1, 0, tau, opts) - _sgn(g) * _v4(0, d - 1, tau, opts))


def e_lambda(lam: int, tau, opts: EvalOptions | None = None) -> complex:
    """Branch point e_lambda = wp(omega_lambda)."""
    if lam not in BRANCH_CHARS:
        raise DomainError(f"lambda must be 1, 2 or 3, got {lam!r}")
    return branch_point(BRANCH_CHARS[lam], tau, opts)


def _rep(rep):
    ch = Characteristic.coerce(rep)
    if ch.alpha % 2 == 0 and ch.beta % 2 == 0:
        raise InvalidRepresentationError("representation (alpha, beta) = (0, 0) mod 2 is not admissible")
    return ch


def invariant_polys(rep=(1, 1)):
    """(g2, g3) as exact polynomials in T_RING with U = vartheta_{alpha 0}^4, V = vartheta_{0 beta}^4.

    P stands for pi^2.
    """
    ch = _rep(rep)
    sa, sb, sab = _sgn(ch.alpha), _sgn(ch.beta), _sgn(ch.alpha + ch.beta)
    U, V, P = T_U, T_V, T_P
    g2p = QQ(1, 12) * P**2 * (U**2 + sab * U * V + V**2)
    g3p = QQ(1, 432) * P**3 * (2 * sb * U**3 - 3 * U * V * (sb * V - sa * U) - 2 * sa * V**3)
    return g2p, g3p


def _rep_values(ch, tau, opts):
    return (eta_w(tau, opts), PI**2, _v4(ch.alpha, 0, tau, opts), _v4(0, ch.beta, tau, opts))


def g2_theta(rep, tau, opts: EvalOptions | None = None) -> complex:
    """g2 from theta constants in the (alpha, beta) representation."""
    ch = _rep(rep)
    g2p, _ = invariant_polys(ch)
    return SeriesPoly("theta", ((0, g2p),), 0).evaluate(0, _rep_values(ch, tau, opts))


def g3_theta(rep, tau, opts: EvalOptions | None = None) -> complex:
    """g3 from theta constants in the (alpha, beta) representation."""
    ch = _rep(rep)
    _, g3p = invariant_polys(ch)
    return SeriesPoly("theta", ((0, g3p),), 0).evaluate(0, _rep_values(ch, tau, opts))


def halphen_op(poly, rep=(1, 1)):
    """Apply Halphen's derivation.

    ``poly`` lives in QQ[g2, g3] (operator -12 g3 d/dg2 - (2/3) g2^2 d/dg3) or in
    QQ[eta, P, U, V] with U = vartheta_{alpha 0}^4, V = vartheta_{0 beta}^4 and
    P = pi^2, where the operator is
    (P/3)(<a> V^2 + 2 <b> U V) d/dV - (P/3)(<b> U^2 + 2 <a> U V) d/dU.
    A :class:`SeriesPoly` is mapped coefficient by coefficient.

    Examples
    --------
    >>> from ellipticore.recur import G2, G3
    >>> halphen_op(G2) == -12 * G3
    True
    """
    if isinstance(poly, SeriesPoly):
        return SeriesPoly(poly.representation, tuple((p, halphen_op(c, rep)) for p, c in poly.terms),
                          poly.order, poly.variable)
    if poly.ring == G_RING:
        return halphen_g(poly)
    if poly.ring == T_RING:
        ch = _rep(rep)
        sa, sb = _sgn(ch.alpha), _sgn(ch.beta)
        U, V, P = T_U, T_V, T_P
        third = QQ(1, 3)
        return (third * P * (sa * V**2 + 2 * sb * U * V) * poly.diff(V)
                - third * P * (sb * U**2 + 2 * sa * U * V) * poly.diff(U))
    raise DomainError("halphen_op needs a polynomial in (g2, g3) or (eta, P, U, V)")


@dataclass(frozen=True)
class WeierstrassInvariants:
    """Lattice constants for half-periods (1, tau)."""

    g2: complex
    g3: complex
    delta: complex
    e1: complex
    e2: complex
    e3: complex
    eta_w: complex

    @classmethod
    def at(cls, tau, opts: EvalOptions | None = None) -> "WeierstrassInvariants":
        a, b = hurwitz_g2(tau, opts), hurwitz_g3(tau, opts)
        return cls(a, b, a**3 - 27 * b**2, e_lambda(1, tau, opts), e_lambda(2, tau, opts),
                   e_lambda(3, tau, opts), eta_w(tau, opts))


@dataclass(frozen=True)
class PeriodPair:
    """Half-periods (omega, omega') with Im(omega'/omega) > 0."""

    omega: complex
    omega_prime: complex

    def __post_init__(self):
        w, wp_ = complex(self.omega), complex(self.omega_prime)
        if w == 0 or (wp_ / w).imag <= 0:
            raise DomainError("half-periods need Im(omega'/omega) > 0")
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "omega_prime", wp_)

    @property
    def tau(self) -> Tau:
        return Tau(self.omega_prime / self.omega)


def rescale_periods(x, periods) -> tuple[complex, Tau, complex]:
    """Reduce (x | omega, omega') to (x/omega | 1, tau).

    Returns (x/omega, tau, omega). A function of weight w (see WEIGHTS) obeys
    f(x | omega, omega') = omega^w f(x/omega | 1, tau).
    """
    p = periods if isinstance(periods, PeriodPair) else PeriodPair(*periods)
    return complex(x) / p.omega, p.tau, p.omega


def with_periods(name: str, x, periods, opts: EvalOptions | None = None) -> complex:
    """Evaluate sigma, zeta, wp or wp_prime for arbitrary half-periods."""
    fn = {"sigma": sigma, "zeta": zeta, "wp": wp, "wp_prime": wp_prime}[name]
    xs, tau, w = rescale_periods(x, periods)
    return w ** WEIGHTS[name] * fn(xs, tau, opts)


__all__ = [
    "sigma", "sigma_lambda", "zeta", "wp", "wp_prime", "branch_point", "e_lambda",
    "g2_theta", "g3_theta", "invariant_polys", "halphen_op", "WeierstrassInvariants",
    "PeriodPair", "rescale_periods", "with_periods", "half_period", "WEIGHTS", "BRANCH_CHARS",
]
