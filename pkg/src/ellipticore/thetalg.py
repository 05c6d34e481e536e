"""Algebraic identities among theta functions.

Residual checks for the quartic and quadratic identities, the logarithmic
derivative relations, recursive multiplication of the argument, the values
at x = 1/4 and a genus-2 decomposition of a two-dimensional theta function.
All residuals are relative: |lhs - rhs| divided by the largest term.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResonanceError, TruncationError
from .qkernel import Characteristic, EvalOptions, Tau, jtheta, vartheta

PI = math.pi
RESONANCE_THRESHOLD = 1e-12
GENUS2_EXTENT = 12


@dataclass(frozen=True)
class IdentityResult:
    """Maximum relative residual of a family of identities.

    Attributes
    ----------
    name : str
    residual : float
        Max over ``details``.
    grid : str
        Where the identities were evaluated.
    details : tuple
        (label, relative residual) for every individual identity.
    """

    name: str
    residual: float
    grid: str
    details: tuple = ()


def _rel(lhs, *rhs) -> float:
    scale = max([abs(lhs)] + [abs(t) for t in rhs])
    return abs(lhs - sum(rhs)) / scale if scale > 0 else 0.0


def _sign(n: int) -> int:
    return (n > 0) - (n < 0)


TRIPLES = tuple(itertools.permutations((2, 3, 4)))


def _values(x, tau, opts):
    T = {k: jtheta(k, x, tau, opts=opts) for k in (1, 2, 3, 4)}
    v = {k: vartheta(k, tau, opts) for k in (2, 3, 4)}
    return T, v


def check_quartic_identities(x, tau, opts: EvalOptions | None = None) -> IdentityResult:
    """theta_1^4 + theta_3^4 = theta_2^4 + theta_4^4 and the quadratic relations.

    Examples
    --------
    >>> check_quartic_identities(0.3, 1.1j).residual < 1e-12
    True
    """
    tau = Tau.coerce(tau)
    T, v = _values(x, tau, opts)
    d = [("quartic", _rel(T[1] ** 4 + T[3] ** 4, T[2] ** 4, T[4] ** 4)),
         ("quadratic", _rel(v[3] ** 2 * T[3] ** 2, v[2] ** 2 * T[2] ** 2, v[4] ** 2 * T[4] ** 2))]
    for k, n, m in TRIPLES:
        d.append((f"quadratic[{k},{n},{m}]",
                  _rel(_sign(n - m) * v[k] ** 2 * T[1] ** 2, v[m] ** 2 * T[n] ** 2, -v[n] ** 2 * T[m] ** 2)))
    return IdentityResult("quartic", max(r for _, r in d), f"x={complex(x)}, tau={tau.value}", tuple(d))


def check_log_derivative_identities(x, tau, opts: EvalOptions | None = None) -> IdentityResult:
    """theta_n'/theta_n - theta_m'/theta_m = sign(n-m) pi vartheta_k^2 theta_1 theta_k / (theta_n theta_m).

    Residuals are scaled by the right side with its theta_1 factor removed, so
    the check stays meaningful at x = 0 where both sides vanish.
    """
    tau = Tau.coerce(tau)
    T, v = _values(x, tau, opts)
    D = {k: jtheta(k, x, tau, dx=1, opts=opts) for k in (2, 3, 4)}
    d = []
    for k, n, m in TRIPLES:
        lhs = D[n] / T[n] - D[m] / T[m]
        rhs = _sign(n - m) * PI * v[k] ** 2 * T[1] * T[k] / (T[n] * T[m])
        # the theta_1 factor vanishes at x = 0, so normalize without it
        scale = max(abs(D[n] / T[n]), abs(D[m] / T[m]), abs(PI * v[k] ** 2 * T[k] / (T[n] * T[m])))
        r = abs(lhs - rhs) / scale
        d.append((f"logderiv[{k},{n},{m}]", r))
    return IdentityResult("log_derivative", max(r for _, r in d), f"x={complex(x)}, tau={tau.value}", tuple(d))


def _check_resonance(value, scale, level):
    if abs(value) < RESONANCE_THRESHOLD * scale:
        raise ResonanceError(f"multiplication recursion divides by a vanishing theta at level {level}")


def _multiply_classical(n: int, x, tau, opts, want: int):
    """theta_want(n x) by the doubling and three-term recursions.

    Intermediate levels carry theta_2..4 (and theta_1 when wanted); the last
    level computes only the requested function, so only its divisor is checked.
    Returns the value and the largest additive term of the last step.
    """
    v = {k: vartheta(k, tau, opts) for k in (2, 3, 4)}
    scale = max(1.0, abs(v[3]))
    rows = {0: {1: 0j, 2: v[2], 3: v[3], 4: v[4]},
            1: {k: jtheta(k, x, tau, opts=opts) for k in (1, 2, 3, 4)}}
    q = rows[1]
    size = 0.0
    for j in range(2, n + 1):
        p, r = rows[j - 1], rows[j - 2]
        needed = (want,) if j == n else ((1, 2, 3, 4) if want == 1 else (2, 3, 4))
        t = {}
        for k in needed:
            if k == 1 and j == 2:
                t[1] = 2 * q[1] * q[2] * q[3] * q[4] / (v[2] * v[3] * v[4])
                size = abs(t[1])
                continue
            _check_resonance(r[k], scale, j)
            u, w = {1: ((p[3] * q[2]) ** 2, -(p[2] * q[3]) ** 2),
                    2: ((p[3] * q[3]) ** 2, -(p[4] * q[4]) ** 2),
                    3: ((p[2] * q[2]) ** 2, (p[4] * q[4]) ** 2),
                    4: ((p[3] * q[3]) ** 2, -(p[2] * q[2]) ** 2)}[k]
            d = v[{1: 4, 2: 2, 3: 3, 4: 4}[k]] ** 2 * r[k]
            t[k] = (u + w) / d
            size = max(abs(u), abs(w)) / abs(d)
        rows[j] = t
    return rows[n][want], size


def multiply_theta(char, n: int, x, tau, opts: EvalOptions | None = None, *, with_scale: bool = False):
    """theta_{alpha beta}(n x | tau) from values at x through the multiplication recursion.

    Level 2 uses the closed doublings; level j >= 3 combines levels j-1, 1
    and j-2, dividing by theta((j-2) x).

    With ``with_scale`` the pair (value, size of the largest additive term of
    the last step) is returned; residuals against a direct evaluation should
    be measured on that size, since the step can cancel.

    Raises
    ------
    ResonanceError
        When a divisor theta((j-2) x) vanishes (x at a torsion point).
    """
    if int(n) != n or n < 2:
        raise DomainError(f"multiplication needs an integer n >= 2, got {n!r}")
    ch = Characteristic.coerce(char)
    tau = Tau.coerce(tau)
    k = ch.classical_index
    value, size = _multiply_classical(int(n), complex(x), tau, opts, k)
    value = ch.classical_sign * value
    return (value, size) if with_scale else value


@dataclass(frozen=True)
class QuarterValues:
    """theta_k(1/4 | tau), k = 1..4, from the closed-form relations."""

    theta1: complex
    theta2: complex
    theta3: complex
    theta4: complex

    def __getitem__(self, k):
        return (self.theta1, self.theta2, self.theta3, self.theta4)[k - 1]


def _root4_near(w, guess):
    r = cmath.exp(cmath.log(w) / 4)
    roots = [r * 1j**k for k in range(4)]
    return min(roots, key=lambda z: abs(z - guess))


def quarter_period_values(tau, opts: EvalOptions | None = None) -> QuarterValues:
    """Closed-form theta_k(1/4) from the theta constants.

    The fourth-root branches follow the q -> 0 behaviour theta_3(1/4) ~ 1 and
    theta_2(1/4) ~ sqrt(2) q^(1/4); this is reliable for tau in or near the
    fundamental domain.
    """
    tau = Tau.coerce(tau)
    v2, v3, v4 = (vartheta(k, tau, opts) for k in (2, 3, 4))
    t3 = _root4_near((v4 * v3**3 + v3 * v4**3) / 2, 1.0)
    t2 = _root4_near((v4 * v3**3 - v3 * v4**3) / 2, math.sqrt(2) * cmath.exp(1j * PI * tau.value / 4))
    t1 = v2**2 * v3 * v4 / (2 * t2 * t3**2)
    return QuarterValues(t1, t2, t3, t3)


@dataclass(frozen=True)
class Genus2Tau:
    """Period matrix [[tau, 1/2], [1/2, mu]]."""

    tau: Tau
    mu: Tau
    offdiag: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "tau", Tau.coerce(self.tau))
        object.__setattr__(self, "mu", Tau.coerce(self.mu))
        if self.offdiag != 0.5:
            raise DomainError("the decomposition needs off-diagonal entry 1/2")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.tau.value, self.offdiag], [self.offdiag, self.mu.value]])


def genus2_theta(g2tau: Genus2Tau, z1, z2, extent: int = GENUS2_EXTENT, rel_tol: float = 1e-16) -> complex:
    """Two-dimensional theta function by a direct double sum over |k1|, |k2| <= extent."""
    k = np.arange(-extent, extent + 1)
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    t, m = g2tau.tau.value, g2tau.mu.value
    expo = 1j * PI * (t * k1**2 + 2 * g2tau.offdiag * k1 * k2 + m * k2**2) + 2j * PI * (k1 * z1 + k2 * z2)
    terms = np.exp(expo)
    edge = np.maximum(np.abs(k1), np.abs(k2)) == extent
    total = terms.sum()
    tail = np.abs(terms[edge]).max()
    if tail > rel_tol * max(np.abs(terms).sum(), 1.0):
        raise TruncationError("genus-2 double sum: boundary terms exceed tolerance",
                              partial=complex(total), tail_estimate=float(tail), terms_used=terms.size)
    return complex(total)


def genus2_decomposition_residual(g2tau: Genus2Tau, z1, z2, opts: EvalOptions | None = None) -> float:
    """Relative residual of the genus-2 theta decomposition into Jacobi theta functions."""
    lhs = genus2_theta(g2tau, complex(z1), complex(z2))
    t, m = g2tau.tau, g2tau.mu
    a3, a4 = jtheta(3, z1, t, opts=opts), jtheta(4, z1, t, opts=opts)
    b3, b4 = jtheta(3, z2, m, opts=opts), jtheta(4, z2, m, opts=opts)
    return _rel(lhs, (a3 + a4) * b3 / 2, (a3 - a4) * b4 / 2)


__all__ = [
    "IdentityResult", "check_quartic_identities", "check_log_derivative_identities", "multiply_theta",
    "QuarterValues", "quarter_period_values", "Genus2Tau", "genus2_theta", "genus2_decomposition_residual",
]
