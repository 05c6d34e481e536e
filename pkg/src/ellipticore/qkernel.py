"""Direct q-series for theta functions with integer characteristics.

Conventions
-----------
For integers ``alpha, beta`` and ``Im tau > 0``::

    theta_{alpha beta}(x|tau) = sum_k exp(pi i s^2 tau + 2 pi i s (x + beta/2)),
    s = k + alpha/2.

The classical functions are ``theta_1 = -theta_{11}``, ``theta_2 = theta_{10}``,
``theta_3 = theta_{00}`` and ``theta_4 = theta_{01}``. Periods of the
Weierstrass layer are ``2`` and ``2 tau`` (half-period ``omega = 1``), so the
Hurwitz series below give ``g2, g3`` and ``eta = zeta(1)`` for that lattice.

Nothing here reduces ``tau`` to the fundamental domain; see
:mod:`ellipticore.modular` and :mod:`ellipticore.reduced` for that.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DomainError, TruncationError

PI = math.pi
TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class EvalOptions:
    """Truncation controls shared by every series in the package.

    Parameters
    ----------
    rel_tol : float
        Target relative size of the neglected tail.
    max_terms : int
        Hard cap on the number of summed terms.
    """

    rel_tol: float = 1e-15
    max_terms: int = 512

    def __post_init__(self):
        if not (self.rel_tol > 0 and math.isfinite(self.rel_tol)):
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol!r}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise DomainError(f"max_terms must be a positive integer, got {self.max_terms!r}")


DEFAULT_OPTIONS = EvalOptions()


@dataclass(frozen=True)
class Tau:
    """A modulus in the upper half plane."""

    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise DomainError(f"tau must be finite, got {v!r}")
        if v.imag <= 0:
            raise DomainError(f"Im(tau) must be positive, got tau = {v!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def coerce(cls, tau) -> "Tau":
        return tau if isinstance(tau, Tau) else cls(complex(tau))

    @property
    def nome(self) -> complex:
        """q = exp(pi i tau)."""
        return cmath.exp(1j * PI * self.value)

    def __complex__(self):
        return self.value


@dataclass(frozen=True)
class Characteristic:
    """Integer characteristic (alpha, beta) of a theta function."""

    alpha: int
    beta: int

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if int(v) != v:
                raise DomainError(f"characteristic entries must be integers, got {name}={v!r}")
            object.__setattr__(self, name, int(v))

    @classmethod
    def coerce(cls, char) -> "Characteristic":
        if isinstance(char, Characteristic):
            return char
        a, b = char
        return cls(a, b)

    @classmethod
    def classical(cls, k: int) -> "Characteristic":
        """Characteristic of theta_k (up to the sign of theta_1)."""
        try:
            return cls(*{1: (1, 1), 2: (1, 0), 3: (0, 0), 4: (0, 1)}[k])
        except KeyError:
            raise DomainError(f"classical index must be 1..4, got {k!r}") from None

    @property
    def parity(self) -> int:
        """0 for the odd function (alpha, beta both odd), 1 otherwise."""
        return 0 if (self.alpha % 2 and self.beta % 2) else 1

    def reduced(self) -> tuple["Characteristic", int]:
        """Return (alpha mod 2, beta mod 2) and the sign s with theta = s * theta_reduced."""
        a, b = self.alpha % 2, self.beta % 2
        r = (self.beta - b) // 2
        sign = -1 if (a * r) % 2 else 1
        return Characteristic(a, b), sign

    @property
    def classical_index(self) -> int:
        red, _ = self.reduced()
        return {(1, 1): 1, (1, 0): 2, (0, 0): 3, (0, 1): 4}[(red.alpha, red.beta)]

    @property
    def classical_sign(self) -> int:
        """Sign s such that theta_{alpha beta} = s * theta_k for the classical k."""
        red, sign = self.reduced()
        return -sign if (red.alpha, red.beta) == (1, 1) else sign

    def __iter__(self):
        return iter((self.alpha, self.beta))


@dataclass(frozen=True)
class ThetaValue:
    """Series value with its truncation bookkeeping.

    ``tail_estimate`` bounds the neglected terms and is at most
    ``rel_tol`` times the absolute sum of the terms kept.
    """

    value: complex
    terms_used: int
    tail_estimate: float

    def __complex__(self):
        return self.value


def _opts(opts):
    return DEFAULT_OPTIONS if opts is None else opts


def _symmetric_sum(term, first, opts, what):
    """Sum term(k) over the index groups yielded by ``first``.

    Groups are visited outward from the dominant index. The loop stops after
    two consecutive groups each fall below rel_tol times the accumulated
    absolute sum; the absolute sum (not the partial sum) is the scale so that
    sums cancelling to zero, such as theta_1(0), still terminate.
    """
    total = 0j
    scale = 0.0
    used = 0
    quiet = 0
    last = 0.0
    for pair in first:
        contrib = 0j
        mag = 0.0
        for k in pair:
            t = term(k)
            contrib += t
            mag += abs(t)
        used += len(pair)
        total += contrib
        scale += mag
        if mag <= opts.rel_tol * scale:
            quiet += 1
            if quiet >= 2:
                last = mag
                break
        else:
            quiet = 0
        if used >= opts.max_terms:
            raise TruncationError(
                f"{what}: no convergence within max_terms={opts.max_terms}",
                partial=total,
                tail_estimate=2.0 * mag,
                terms_used=used,
            )
    return total, used, 2.0 * last


def _theta_pairs(a):
    if a == 0:
        yield (0,)
        j = 1
        while True:
            yield (j, -j)
            j += 1
    else:
        j = 0
        while True:
            yield (j, -j - 1)
            j += 1


def theta_series(char, x, tau, dx: int = 0, dtau: int = 0, opts: EvalOptions | None = None) -> ThetaValue:
    """Mixed derivative d^dx/dx^dx d^dtau/dtau^dtau of theta_{alpha beta}(x|tau).

    Each term is multiplied by (2 pi i s)^dx (pi i s^2)^dtau with s = k + alpha/2.
    """
    char = Characteristic.coerce(char)
    tau = Tau.coerce(tau)
    opts = _opts(opts)
    if dx < 0 or dtau < 0:
        raise DomainError("derivative orders must be non-negative")
    red, sign = char.reduced()
    a, b = red.alpha, red.beta
    if complex(x) == 0 and (dx + char.parity) % 2 == 0:
        # odd function with an even x-derivative (or even with odd) vanishes at 0
        return ThetaValue(0j, 0, 0.0)
    t = tau.value
    z = complex(x) + b / 2

    def term(k):
        s = k + a / 2
        v = cmath.exp(1j * PI * s * (s * t + 2 * z))
        if dx:
            v *= (TWO_PI_I * s) ** dx
        if dtau:
            v *= (1j * PI * s * s) ** dtau
        return v

    total, used, tail = _symmetric_sum(term, _theta_pairs(a), opts, f"theta{tuple(char)}")
    return ThetaValue(sign * total, used, tail)


def theta(char, x, tau, opts: EvalOptions | None = None) -> ThetaValue:
    """theta_{alpha beta}(x|tau) by its q-series.

    Examples
    --------
    >>> abs(theta((0, 0), 0, 50j).value - 1) < 1e-15
    True
    """
    return theta_series(char, x, tau, 0, 0, opts)


def theta_dx(char, x, tau, order: int = 1, opts: EvalOptions | None = None) -> complex:
    """order-th x-derivative of theta_{alpha beta}."""
    if order < 1:
        raise DomainError("order must be >= 1")
    return theta_series(char, x, tau, order, 0, opts).value


def theta_dtau(char, x, tau, opts: EvalOptions | None = None, order: int = 1) -> complex:
    """order-th tau-derivative of theta_{alpha beta}, term by term."""
    if order < 1:
        raise DomainError("order must be >= 1")
    return theta_series(char, x, tau, 0, order, opts).value


def jtheta(k: int, x, tau, dx: int = 0, dtau: int = 0, opts: EvalOptions | None = None) -> complex:
    """Classical theta_k(x|tau), k = 1..4, optionally differentiated."""
    char = Characteristic.classical(k)
    v = theta_series(char, x, tau, dx, dtau, opts).value
    return -v if k == 1 else v


def vartheta(kind: int, tau, opts: EvalOptions | None = None, dtau: int = 0) -> complex:
    """Theta constant vartheta_kind(tau) = theta_kind(0|tau), kind in {2, 3, 4}."""
    if kind not in (2, 3, 4):
        raise DomainError(f"vartheta kind must be 2, 3 or 4, got {kind!r}")
    return jtheta(kind, 0, tau, 0, dtau, opts)


def vartheta_char(char, tau, opts: EvalOptions | None = None) -> complex:
    """theta_{alpha beta}(0|tau) for an arbitrary integer characteristic."""
    return theta(char, 0, tau, opts).value


# Hurwitz (Lambert-type) series -------------------------------------------------

def _lambert(tau, weight, squared, dtau, opts, what):
    """sum_{k>=1} k^weight r_k with r_k = q^k/(1-q^k) or q^k/(1-q^k)^2, q = e^{2 pi i tau}.

    With dtau = 1 returns the term-wise tau-derivative.
    """
    tau = Tau.coerce(tau)
    opts = _opts(opts)
    q2 = cmath.exp(TWO_PI_I * tau.value)
    total = 0j
    scale = 1.0  # the constant term of every caller is O(1)
    quiet = 0
    qk = 1.0 + 0j
    for k in range(1, opts.max_terms + 1):
        qk *= q2
        one = 1 - qk
        if squared:
            r = qk / (one * one)
            if dtau:
                r = TWO_PI_I * k * qk * (1 + qk) / (one * one * one)
        else:
            r = qk / one
            if dtau:
                r = TWO_PI_I * k * qk / (one * one)
        t = k**weight * r
        total += t
        mag = abs(t)
        scale += mag
        if mag <= opts.rel_tol * scale:
            quiet += 1
            if quiet >= 2:
                return total
        else:
            quiet = 0
    raise TruncationError(f"{what}: no convergence within max_terms={opts.max_terms}",
                          partial=total, tail_estimate=2 * mag, terms_used=opts.max_terms)


def g2(tau, opts: EvalOptions | None = None, dtau: int = 0) -> complex:
    """Invariant g2 of the lattice with periods (2, 2 tau)."""
    s = _lambert(tau, 3, False, dtau, opts, "g2")
    return 20 * PI**4 * ((0 if dtau else 1 / 240) + s)


def g3(tau, opts: EvalOptions | None = None, dtau: int = 0) -> complex:
    """Invariant g3 of the lattice with periods (2, 2 tau)."""
    s = _lambert(tau, 5, False, dtau, opts, "g3")
    return (7 / 3) * PI**6 * ((0 if dtau else 1 / 504) - s)


def eta_w(tau, opts: EvalOptions | None = None, dtau: int = 0) -> complex:
    """Weierstrass eta(tau) = zeta(1 | 1, tau)."""
    s = _lambert(tau, 0, True, dtau, opts, "eta")
    return 2 * PI**2 * ((0 if dtau else 1 / 24) - s)


def etahat(tau, opts: EvalOptions | None = None, dtau: int = 0) -> complex:
    """Dedekind eta via the pentagonal-number series.

    etahat = sum_k (-1)^k exp(pi i tau (6k+1)^2 / 12); ``dtau`` differentiates
    term by term.
    """
    tau = Tau.coerce(tau)
    opts = _opts(opts)
    t = tau.value

    def term(k):
        n2 = (6 * k + 1) ** 2
        v = cmath.exp(1j * PI * t * n2 / 12)
        if dtau:
            v *= (1j * PI * n2 / 12) ** dtau
        return -v if k % 2 else v

    def pairs():
        yield (0,)
        j = 1
        while True:
            yield (-j, j)
            j += 1

    total, _, _ = _symmetric_sum(term, pairs(), opts, "etahat")
    return total
