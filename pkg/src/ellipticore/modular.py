"""Modular group machinery and half-period laws.

The multiplier of theta_1 under tau -> (a tau + b)/(c tau + d), c > 0, is the
eighth root of unity eps = exp(3 pi i E) with the exact rational exponent::

    E = (a - d)/(12 c) - d (2c - 3)/6 - 1/4 - (c - 1)/4 sign(-d)
        + (1/c) sum_{k=1}^{c-1} k trunc(d k / c)

where ``trunc`` rounds toward zero and sign(0) = 0. Dedekind eta picks up
exp(pi i E) at weight 1/2. All phases are reduced exactly (Fractions mod 2)
before a single complex exponential is taken.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, EllipticError, NormalizationError
from .qkernel import (
    Characteristic,
    EvalOptions,
    Tau,
    etahat,
    eta_w,
    jtheta,
    theta,
)

PI = math.pi
_IPOW = (1, 1j, -1, -1j)


def ipow(n: int) -> complex:
    """i**n for integer n, exactly."""
    return _IPOW[n % 4]


def _phase(turns: Fraction) -> complex:
    """exp(pi i * turns) with turns reduced mod 2 first."""
    t = Fraction(turns) % 2
    if (t * 4).denominator == 1:
        k = int(t * 4)  # exact eighth roots
        return (1, cmath.exp(1j * PI / 4), 1j, cmath.exp(3j * PI / 4),
                -1, cmath.exp(5j * PI / 4), -1j, cmath.exp(7j * PI / 4))[k]
    return cmath.exp(1j * PI * (t.numerator / t.denominator))


@dataclass(frozen=True)
class UnimodularMap:
    """Integer matrix (a, b; c, d) with determinant one acting by Moebius maps."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            v = getattr(self, name)
            if int(v) != v:
                raise DomainError(f"map entries must be integers, got {name}={v!r}")
            object.__setattr__(self, name, int(v))
        if self.a * self.d - self.b * self.c != 1:
            raise DomainError(f"ad - bc must equal 1, got {self.a * self.d - self.b * self.c}")

    @classmethod
    def coerce(cls, m) -> "UnimodularMap":
        return m if isinstance(m, UnimodularMap) else cls(*m)

    @classmethod
    def identity(cls) -> "UnimodularMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def T(cls, n: int = 1) -> "UnimodularMap":
        return cls(1, n, 0, 1)

    @classmethod
    def S(cls) -> "UnimodularMap":
        return cls(0, -1, 1, 0)

    @property
    def is_normalized(self) -> bool:
        return self.c > 0 or (self.c == 0 and self.a == 1 and self.d == 1)

    def normalized(self) -> "UnimodularMap":
        """Representative with c > 0, or c = 0 and a = d = 1."""
        if self.c < 0 or (self.c == 0 and self.a < 0):
            return UnimodularMap(-self.a, -self.b, -self.c, -self.d)
        return self

    def apply(self, tau) -> complex:
        t = complex(tau)
        return (self.a * t + self.b) / (self.c * t + self.d)

    def factor(self, tau) -> complex:
        """c tau + d."""
        return self.c * complex(tau) + self.d

    def inverse(self) -> "UnimodularMap":
        return UnimodularMap(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "UnimodularMap") -> "UnimodularMap":
        """Matrix product self @ other, i.e. the map tau -> self(other(tau))."""
        o = UnimodularMap.coerce(other)
        return UnimodularMap(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class HalfPeriodShift:
    """Shift of the argument by n/2 + m tau/2."""

    n: int
    m: int

    @classmethod
    def coerce(cls, s) -> "HalfPeriodShift":
        return s if isinstance(s, HalfPeriodShift) else cls(*s)

    def offset(self, tau) -> complex:
        return self.n / 2 + self.m * complex(tau) / 2


@dataclass(frozen=True)
class ReductionResult:
    """reduced_tau = map.apply(original tau)."""

    reduced_tau: Tau
    map: UnimodularMap


MAX_REDUCTION_STEPS = 10_000


def reduce_to_fundamental(tau) -> ReductionResult:
    """Move tau into the closed standard fundamental domain.

    Alternates integer translations with inversions tau -> -1/tau while
    |tau| < 1. Each inversion strictly increases Im tau, so the loop ends.

    Examples
    --------
    >>> r = reduce_to_fundamental(5.3 + 0.9j)
    >>> abs(r.reduced_tau.value.real) <= 0.5
    True
    """
    t = Tau.coerce(tau).value
    g = UnimodularMap.identity()
    for _ in range(MAX_REDUCTION_STEPS):
        n = math.floor(t.real + 0.5)
        if n:
            t = t - n
            g = UnimodularMap.T(-n).compose(g)
        if abs(t) < 1.0:
            t = -1.0 / t
            g = UnimodularMap.S().compose(g)
            continue
        break
    else:  # pragma: no cover - Im increases at every inversion
        raise EllipticError("fundamental-domain reduction did not terminate")
    g = g.normalized()
    return ReductionResult(Tau(t), g)


# multiplier ---------------------------------------------------------------------

def _sign(n: int) -> int:
    return (n > 0) - (n < 0)


def _trunc_div(p: int, q: int) -> int:
    """Integer division rounding toward zero."""
    r = abs(p) // abs(q)
    return r if (p >= 0) == (q > 0) else -r


def multiplier_exponent(m) -> Fraction:
    """Exact exponent E with eps_theta = exp(3 pi i E) and etahat factor exp(pi i E)."""
    m = UnimodularMap.coerce(m)
    a, c, d = m.a, m.c, m.d
    if c <= 0:
        raise NormalizationError(f"multiplier needs c > 0, got c = {c}")
    dedekind = sum(k * _trunc_div(d * k, c) for k in range(1, c))
    return (Fraction(a - d, 12 * c) - Fraction(d * (2 * c - 3), 6) - Fraction(1, 4)
            - Fraction(c - 1, 4) * _sign(-d) + Fraction(dedekind, c))


def theta_multiplier(m) -> complex:
    """Eighth root of unity eps_theta(a, c, d) for a normalized map with c > 0.

    Examples
    --------
    >>> abs(theta_multiplier((0, -1, 1, 0)) - cmath.exp(-3j * cmath.pi / 4)) < 1e-15
    True
    """
    return _phase(3 * multiplier_exponent(m))


def _sqrt_factor(m: UnimodularMap, tau: Tau) -> complex:
    return cmath.sqrt(m.factor(tau.value))


def transform_theta1(x, tau, m, opts: EvalOptions | None = None) -> complex:
    """theta_1(x/(c tau + d) | M tau) from the value of theta_1(x | tau).

    The map is normalized first, so c tau + d refers to the normalized map.
    """
    tau = Tau.coerce(tau)
    m = UnimodularMap.coerce(m).normalized()
    base = jtheta(1, x, tau, opts=opts)
    if m.c == 0:
        return _phase(Fraction(m.b, 4)) * base
    f = m.factor(tau.value)
    return theta_multiplier(m) * cmath.sqrt(f) * cmath.exp(1j * PI * m.c * complex(x) ** 2 / f) * base


def transform_etahat(tau, m, opts: EvalOptions | None = None) -> complex:
    """etahat(M tau) from etahat(tau)."""
    tau = Tau.coerce(tau)
    return etahat_factor(m, tau) * etahat(tau, opts)


def etahat_factor(m, tau) -> complex:
    """Factor F with etahat(M tau) = F etahat(tau)."""
    tau = Tau.coerce(tau)
    m = UnimodularMap.coerce(m).normalized()
    if m.c == 0:
        return _phase(Fraction(m.b, 12))
    return _phase(multiplier_exponent(m)) * _sqrt_factor(m, tau)


def transform_eta_w(tau, m, opts: EvalOptions | None = None) -> complex:
    """eta(M tau) = (c tau + d)^2 eta(tau) - (pi i / 2) c (c tau + d)."""
    tau = Tau.coerce(tau)
    m = UnimodularMap.coerce(m)
    f = m.factor(tau.value)
    return f * f * eta_w(tau, opts) - 0.5j * PI * m.c * f


def char_phase(char, m) -> tuple[Characteristic, Fraction]:
    """Transformed characteristic and exact phase (in units of pi) of the theta law.

    For a normalized map, theta_{char'}(x/(c tau+d) | M tau)
    = exp(pi i phase) sqrt(c tau + d) exp(pi i c x^2/(c tau + d)) theta_char(x | tau).
    """
    char = Characteristic.coerce(char)
    m = UnimodularMap.coerce(m)
    if not m.is_normalized:
        raise NormalizationError("char_phase needs a normalized map")
    a, b, c, d = m.as_tuple()
    al, be = char.alpha + 1, char.beta + 1
    if c == 0:
        # theta[p, q - N al](x | tau + N) = exp(-pi i N (al^2 - 1)/4) theta[p, q](x | tau)
        new = Characteristic(char.alpha, char.beta - b * al)
        return new, Fraction(-b * (al * al - 1), 4)
    alp = d * al - c * be
    bep = -b * al + a * be
    e2 = 2 * al * (b * c * be - d + 1) - c * be * (a * be - 2) - d * b * al * al
    return Characteristic(alp - 1, bep - 1), 3 * multiplier_exponent(m) + Fraction(e2, 4)


def transform_theta_char(char, x, tau, m, opts: EvalOptions | None = None) -> tuple[Characteristic, complex]:
    """General theta transformation with characteristics.

    Returns the characteristic (alpha', beta') of the left side and its value
    at (x/(c tau + d) | M tau), computed from theta_char(x | tau).
    """
    new, fac = theta_char_factor(char, x, tau, m)
    return new, fac * theta(char, x, tau, opts).value


def theta_char_factor(char, x, tau, m) -> tuple[Characteristic, complex]:
    """Characteristic and factor F of theta_{char'}(x/f | M tau) = F theta_char(x | tau).

    Here f = c tau + d for the normalized map.
    """
    tau = Tau.coerce(tau)
    m = UnimodularMap.coerce(m).normalized()
    new, ph = char_phase(char, m)
    if m.c == 0:
        return new, _phase(ph)
    f = m.factor(tau.value)
    return new, _phase(ph) * cmath.sqrt(f) * cmath.exp(1j * PI * m.c * complex(x) ** 2 / f)


# half periods -------------------------------------------------------------------

def shift_half_period(char, shift, x, tau, opts: EvalOptions | None = None) -> complex:
    """theta_{alpha beta}(x + n/2 + m tau/2) via the shifted characteristic."""
    char = Characteristic.coerce(char)
    s = HalfPeriodShift.coerce(shift)
    tau = Tau.coerce(tau)
    x = complex(x)
    new = Characteristic(char.alpha + s.m, char.beta + s.n)
    ph = cmath.exp(-1j * PI * s.m * (x + (char.beta + s.n) / 2 + s.m * tau.value / 4))
    return theta(new, x, tau, opts).value * ph


def theta_value_at_half_period(char, shift, tau, opts: EvalOptions | None = None) -> complex:
    """theta_{alpha beta}(n/2 + m tau/2 | tau) as a shifted theta constant."""
    return shift_half_period(char, shift, 0, tau, opts)


def theta_deriv_at_half_period(char, shift, tau, opts: EvalOptions | None = None) -> complex:
    """x-derivative of theta_{alpha beta} at the half period n/2 + m tau/2."""
    char = Characteristic.coerce(char)
    s = HalfPeriodShift.coerce(shift)
    tau = Tau.coerce(tau)
    A, B = char.alpha + s.m, char.beta + s.n
    odd = (A * B) % 2
    eh3 = etahat(tau, opts) ** 3 if odd else 0
    brace = ipow(B) * (2 if odd else 0) * eh3 - s.m * theta((A, B), 0, tau, opts).value
    return ipow(-s.m * B) * 1j * PI * cmath.exp(-0.25j * PI * s.m * s.m * tau.value) * brace


def theta_deriv_shifted(char, shift, x, tau, opts: EvalOptions | None = None) -> complex:
    """x-derivative of theta_{alpha beta} at x + n/2 + m tau/2 from theta_1'/theta_1.

    At x = 0 the quotient form is singular and the half-period formula is used.
    """
    if complex(x) == 0:
        return theta_deriv_at_half_period(char, shift, tau, opts)
    char = Characteristic.coerce(char)
    s = HalfPeriodShift.coerce(shift)
    tau = Tau.coerce(tau)
    x = complex(x)
    A, B = char.alpha + s.m, char.beta + s.n
    t1 = jtheta(1, x, tau, opts=opts)
    t1p = jtheta(1, x, tau, dx=1, opts=opts)
    v = theta((A, B), 0, tau, opts).value
    sgn = -1 if (A % 2 and (B // 2) % 2) else 1
    cross = theta((1 - A, 0), x, tau, opts).value * theta((0, 1 - B), x, tau, opts).value
    brace = (t1p / t1 - 1j * PI * s.m) * theta((A, B), x, tau, opts).value - sgn * PI * v * v * cross / t1
    return ipow(-s.m * B) * cmath.exp(-1j * PI * s.m * (x + s.m * tau.value / 4)) * brace


__all__ = [
    "UnimodularMap", "HalfPeriodShift", "ReductionResult", "reduce_to_fundamental",
    "multiplier_exponent", "theta_multiplier", "transform_theta1", "transform_etahat",
    "transform_eta_w", "char_phase", "transform_theta_char", "etahat_factor", "theta_char_factor", "shift_half_period",
    "theta_value_at_half_period", "theta_deriv_at_half_period", "theta_deriv_shifted", "ipow",
]
