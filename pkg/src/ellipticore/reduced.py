"""Named-function evaluation with optional reduction of tau.

Every function the command line exposes is evaluated here by one of two
routes:

``q``
    q-series. With ``reduce_first`` the modulus is first moved into the
    fundamental domain by a map M and the value is carried back with the
    transformation laws (theta law with characteristics, etahat multiplier,
    the affine law for eta and the homogeneity weights of the Weierstrass
    functions).
``series``
    Exact-recurrence power series in x. Only the lattice constants (eta,
    etahat, theta constants, g2, g3, e_lam) come from q-series, reduced the
    same way.

Reduction never changes a value beyond rounding; the command line checks
this on every evaluation.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass

from .errors import DomainError, PoleError
from .modular import UnimodularMap, etahat_factor, reduce_to_fundamental, theta_char_factor
from .qkernel import Characteristic, EvalOptions, Tau, eta_w, etahat, theta_series
from .qkernel import g2 as hurwitz_g2, g3 as hurwitz_g3
from .recur import (
    _char_kinds,
    _eval_compiled,
    sigma_poly_g,
    theta1_poly,
    theta_char_poly,
    xi_poly,
)
from .weier import POLE_THRESHOLD, WEIGHTS, sigma, wp, wp_prime, zeta

PI = math.pi

FUNCTIONS = (
    "theta1", "theta2", "theta3", "theta4", "theta[a,b]", "theta1_prime",
    "sigma", "sigma1", "sigma2", "sigma3", "zeta", "wp", "wp_prime",
    "g2", "g3", "eta", "etahat", "e1", "e2", "e3", "vartheta2", "vartheta3", "vartheta4",
)
CONSTANTS = frozenset({"g2", "g3", "eta", "etahat", "e1", "e2", "e3", "vartheta2", "vartheta3", "vartheta4"})
METHODS = ("q", "series")

_CHAR_RE = re.compile(r"^theta\[(-?\d+),(-?\d+)\]$")


@dataclass(frozen=True)
class FunctionSpec:
    """Parsed function name. ``char`` is set for theta functions."""

    name: str
    char: Characteristic | None = None
    sign: int = 1

    @property
    def needs_x(self) -> bool:
        return self.name not in CONSTANTS


def parse_function(name: str) -> FunctionSpec:
    """Parse a function name such as ``theta3``, ``theta[2,-1]`` or ``wp``.

    Examples
    --------
    >>> parse_function("theta[2,1]").char
    Characteristic(alpha=2, beta=1)
    """
    name = name.strip()
    m = _CHAR_RE.match(name.replace(" ", ""))
    if m:
        return FunctionSpec("theta", Characteristic(int(m.group(1)), int(m.group(2))))
    if name in ("theta1", "theta2", "theta3", "theta4"):
        k = int(name[-1])
        return FunctionSpec("theta", Characteristic.classical(k), -1 if k == 1 else 1)
    if name in FUNCTIONS and name != "theta[a,b]":
        return FunctionSpec(name)
    raise DomainError(f"unknown function {name!r}; expected one of {', '.join(FUNCTIONS)}")


@dataclass(frozen=True)
class Evaluation:
    """Value of a named function with its bookkeeping.

    ``terms_used`` and ``tail_estimate`` describe the main series (the theta
    q-series, or the power series in x); they are None for values assembled
    from several series.
    """

    value: complex
    terms_used: int | None
    tail_estimate: float | None
    reduced_tau: complex
    map: UnimodularMap


class _Frame:
    """Original modulus, the reducing map M and f = c tau + d."""

    def __init__(self, tau: Tau, reduce_first: bool, opts: EvalOptions | None):
        self.tau = tau
        self.opts = opts
        if reduce_first:
            r = reduce_to_fundamental(tau)
            self.m, self.tp = r.map, r.reduced_tau
        else:
            self.m, self.tp = UnimodularMap.identity(), tau
        self.f = self.m.factor(tau.value)

    @property
    def trivial(self) -> bool:
        return self.m == UnimodularMap.identity()

    def theta(self, char, x, dx: int = 0):
        """theta_char(x | tau) or its x-derivative (dx <= 1), and the series record."""
        x = complex(x)
        if self.trivial:
            tv = theta_series(char, x, self.tau, dx=dx, opts=self.opts)
            return tv.value, tv
        new, fac = theta_char_factor(char, x, self.tau, self.m)
        h = theta_series(new, x / self.f, self.tp, opts=self.opts)
        if dx == 0:
            return h.value / fac, h
        if dx != 1:
            raise DomainError("reduced theta supports dx <= 1")
        hp = theta_series(new, x / self.f, self.tp, dx=1, opts=self.opts)
        c = self.m.c
        return (hp.value / self.f - h.value * 2j * PI * c * x / self.f) / fac, hp

    def vartheta(self, k: int) -> complex:
        return self.theta(Characteristic.classical(k), 0)[0]

    def eta(self) -> complex:
        return (eta_w(self.tp, self.opts) + 0.5j * PI * self.m.c * self.f) / self.f**2

    def etahat(self) -> complex:
        if self.trivial:
            return etahat(self.tau, self.opts)
        return etahat(self.tp, self.opts) / etahat_factor(self.m, self.tau)

    def g2(self) -> complex:
        return hurwitz_g2(self.tp, self.opts) / self.f**4

    def g3(self) -> complex:
        return hurwitz_g3(self.tp, self.opts) / self.f**6

    def e(self, lam: int) -> complex:
        v = {k: self.vartheta(k) ** 4 for k in (2, 3, 4)}
        return {1: PI**2 / 12 * (v[3] + v[4]),
                2: PI**2 / 12 * (v[2] - v[4]),
                3: -PI**2 / 12 * (v[2] + v[3])}[lam]

    def weighted(self, name: str, fn, x) -> complex:
        """Weierstrass function of homogeneity weight w: f^w F(x/f | M tau)."""
        return self.f ** WEIGHTS[name] * fn(complex(x) / self.f, self.tp, self.opts)


def _constant(name: str, fr: _Frame) -> complex:
    if name == "g2":
        return fr.g2()
    if name == "g3":
        return fr.g3()
    if name == "eta":
        return fr.eta()
    if name == "etahat":
        return fr.etahat()
    if name.startswith("vartheta"):
        return fr.vartheta(int(name[-1]))
    return fr.e(int(name[-1]))


def _eval_q(spec: FunctionSpec, x, fr: _Frame):
    n = spec.name
    if n == "theta":
        v, tv = fr.theta(spec.char, x)
        return spec.sign * v, tv.terms_used, tv.tail_estimate
    if n == "theta1_prime":
        v, tv = fr.theta(Characteristic.classical(1), x, dx=1)
        return -v, tv.terms_used, tv.tail_estimate
    if n in CONSTANTS:
        return _constant(n, fr), None, None
    if n in ("sigma1", "sigma2", "sigma3"):
        k = int(n[-1]) + 1
        u = complex(x)
        num = fr.theta(Characteristic.classical(k), u / 2)[0]
        return cmath.exp(fr.eta() * u * u / 2) * num / fr.vartheta(k), None, None
    fn = {"sigma": sigma, "zeta": zeta, "wp": wp, "wp_prime": wp_prime}[n]
    return fr.weighted(n, fn, x), None, None


def _poly_value(poly, x, values, order):
    """Value of a SeriesPoly and the size of its last kept term."""
    x = complex(x)
    v = poly.evaluate(x, values)
    p, compiled = poly._compiled()[-1]
    return v, abs(_eval_compiled(compiled, [complex(t) for t in values]) * x**p)


def _theta_consts(fr: _Frame, u: int, v: int):
    return (fr.eta(), PI**2, fr.vartheta(u) ** 4, fr.vartheta(v) ** 4)


def _sigma_derivs(x, fr: _Frame, order: int, upto: int):
    poly = sigma_poly_g(order)
    vals = (fr.g2(), fr.g3())
    out = [poly.evaluate(x, vals)]
    for _ in range(upto):
        poly = poly.diff_x()
        out.append(poly.evaluate(x, vals))
    if abs(out[0]) < POLE_THRESHOLD:
        raise PoleError(f"x = {complex(x)!r} is a lattice point (sigma vanishes)")
    return out


def _eval_series(spec: FunctionSpec, x, fr: _Frame, order: int):
    n = spec.name
    used = order + 1
    if n in CONSTANTS:
        return _constant(n, fr), None, None
    if n in ("theta", "theta1_prime"):
        ch = spec.char if n == "theta" else Characteristic.classical(1)
        sign = spec.sign if n == "theta" else -1
        if ch.parity == 0:
            # theta_{alpha beta} = s theta_1 for the odd class
            s = sign * ch.classical_sign
            poly = theta1_poly(order)
            if n == "theta1_prime":
                poly = poly.diff_x()
            pref = 2 * PI * fr.etahat() ** 3
            v, tail = _poly_value(poly, x, _theta_consts(fr, 2, 4), order)
            return s * pref * v, used, abs(pref) * tail
        u, w = _char_kinds(ch.alpha, ch.beta)
        base = fr.theta(ch, 0)[0]
        v, tail = _poly_value(theta_char_poly(ch.alpha, ch.beta, order), x, _theta_consts(fr, u, w), order)
        return sign * base * v, used, abs(base) * tail
    if n == "sigma":
        v, tail = _poly_value(sigma_poly_g(order), x, (fr.g2(), fr.g3()), order)
        return v, used, tail
    if n in ("sigma1", "sigma2", "sigma3"):
        v, tail = _poly_value(xi_poly(1, order), x, (fr.e(int(n[-1])), fr.g2()), order)
        return v, used, tail
    s = _sigma_derivs(x, fr, order, 3)
    z = s[1] / s[0]
    if n == "zeta":
        return z, used, None
    p = z * z - s[2] / s[0]
    if n == "wp":
        return p, used, None
    return -2 * z * p - s[3] / s[0] + z * s[2] / s[0], used, None


def evaluate(function, x=0, tau=1j, *, method: str = "q", order: int = 18, reduce_first: bool = True,
             opts: EvalOptions | None = None) -> Evaluation:
    """Evaluate a named function at (x | tau).

    Parameters
    ----------
    function : str or FunctionSpec
        One of FUNCTIONS; ``theta[a,b]`` takes any integer characteristic.
    method : {"q", "series"}
    order : int
        Truncation order of the power series (``series`` only).
    reduce_first : bool
        Evaluate the q-series at the reduced modulus and map back.

    Examples
    --------
    >>> abs(evaluate("theta3", 0, 50j).value - 1) < 1e-15
    True
    """
    spec = function if isinstance(function, FunctionSpec) else parse_function(function)
    if method not in METHODS:
        raise DomainError(f"method must be one of {METHODS}, got {method!r}")
    if int(order) != order or order < 1:
        raise DomainError("order must be a positive integer")
    fr = _Frame(Tau.coerce(tau), reduce_first, opts)
    if method == "q":
        v, used, tail = _eval_q(spec, x, fr)
    else:
        v, used, tail = _eval_series(spec, complex(x), fr, int(order))
    return Evaluation(complex(v), used, tail, fr.tp.value, fr.m)


__all__ = ["FUNCTIONS", "METHODS", "FunctionSpec", "Evaluation", "parse_function", "evaluate"]
