"""Exact recurrence tables and the power series built from them.

Families
--------
``A``
    Weierstrass coefficients of sigma in (g2/2)^m (2 g3)^n x^(4m+6n+1)/(4m+6n+1)!.
``C``
    Halphen polynomials C_k(g2, g3), sigma = sum C_k x^(2k+1)/(2k+1)!.
``B0``, ``B1``
    Universal coefficients of Xi in e_lam^(k-2nu) g2^nu (parity 0 gives sigma,
    parity 1 gives sigma_lambda).
``G``
    Integer coefficients of the theta_1 expansion in (eta, vartheta).
``G0``, ``G1``
    Coefficients of the even theta expansions in the symmetric
    representation, for characteristics (0, 0) and (1, 0).

All tables are computed in exact rational arithmetic; the integer families
are checked for integrality as they are filled.
"""

from __future__ import annotations

import functools
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType

from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from .errors import DomainError, IntegralityError
from .qkernel import Characteristic, EvalOptions, Tau, eta_w, etahat, vartheta, vartheta_char

PI = math.pi

G_RING, G2, G3 = ring("g2,g3", QQ)
E_RING, E_LAM, E_G2 = ring("e,g2", QQ)
# eta, P = pi^2, U = vartheta_{alpha-1,0}^4, V = vartheta_{0,beta-1}^4
T_RING, T_ETA, T_P, T_U, T_V = ring("eta,P,U,V", QQ)

FAMILIES = ("A", "C", "B0", "B1", "G", "G0", "G1")


@dataclass(frozen=True)
class RecurrenceTable:
    """Immutable snapshot of one recurrence family.

    Attributes
    ----------
    family : str
    extent : int
        Two-index families hold every (m, n) with m, n >= 0 and m + n <= extent;
        the ``C`` family holds k = 0..extent.
    entries : Mapping
        (m, n) -> int, or k -> polynomial in (g2, g3) for ``C``.
    """

    family: str
    extent: int
    entries: MappingProxyType = field(repr=False)

    def __getitem__(self, key):
        if self.family == "C":
            return self.entries[key] if 0 <= key <= self.extent else G_RING.zero
        m, n = key
        if m < 0 or n < 0:
            return 0
        if m + n > self.extent:
            raise KeyError(f"({m}, {n}) outside extent {self.extent}")
        return self.entries[(m, n)]

    def rows(self):
        """Entries in a deterministic order: (m, n, value) or (k, None, poly)."""
        if self.family == "C":
            return [(k, None, self.entries[k]) for k in range(self.extent + 1)]
        return [(m, n, self.entries[(m, n)]) for (m, n) in sorted(self.entries, key=lambda t: (t[0] + t[1], t[0]))]


def _as_int(value: Fraction, family, key) -> int:
    if value.denominator != 1:
        raise IntegralityError(f"{family}{key} = {value} is not an integer")
    return value.numerator


def _grow_2d(family, rule, order_key, extent, old):
    """Fill all (m, n), m + n <= extent, in increasing order_key."""
    vals = dict(old)
    keys = [(m, s - m) for s in range(extent + 1) for m in range(s + 1)]
    keys.sort(key=order_key)

    def get(m, n):
        if m < 0 or n < 0:
            return 0
        return vals[(m, n)]

    for key in keys:
        if key in vals:
            continue
        if key == (0, 0):
            vals[key] = 1
            continue
        vals[key] = _as_int(rule(get, *key), family, key)
    return vals


def _rule_A(A, m, n):
    F = Fraction
    return (F(16, 3) * (n + 1) * A(m - 2, n + 1) + 3 * (m + 1) * A(m + 1, n - 1)
            - F(1, 3) * (2 * m + 3 * n - 1) * (4 * m + 6 * n - 1) * A(m - 1, n))


def _rule_B(eps):
    def rule(B, m, n):
        F = Fraction
        return (24 * (n + 1) * B(m - 3, n + 1) + (4 * m - 12 * n - 4 - eps) * B(m - 1, n)
                - F(4, 3) * (m + 1) * B(m + 1, n - 1)
                - F(1, 3) * (m + 2 * n - 1) * (2 * m + 4 * n - 1 - 2 * eps) * B(m, n - 1))
    return rule


def _rule_G(G, m, n):
    return Fraction(4 * (n - 2 * m - 1) * G(m, n - 1) - 4 * (m - 2 * n - 1) * G(m - 1, n)
                    - 2 * (m + n - 1) * (2 * m + 2 * n - 1) * (G(m - 2, n) + G(m - 1, n - 1) + G(m, n - 2)))


def rule_G_char(alpha: int, beta: int):
    """Recurrence for the even-theta coefficients with signs <alpha>, <beta>."""
    sa = -1 if alpha % 2 else 1
    sb = -1 if beta % 2 else 1

    def rule(G, m, n):
        return Fraction(sa * (4 * n - 8 * m - 3) * G(m, n - 1) - sb * (4 * m - 8 * n - 3) * G(m - 1, n)
                        - 2 * (m + n - 1) * (2 * m + 2 * n - 3)
                        * (G(m - 2, n) + sa * sb * G(m - 1, n - 1) + G(m, n - 2)))
    return rule


_RULES = {
    "A": (_rule_A, lambda k: (2 * k[0] + 3 * k[1], k[0])),
    "B0": (_rule_B(0), lambda k: (k[0] + 2 * k[1], k[0])),
    "B1": (_rule_B(1), lambda k: (k[0] + 2 * k[1], k[0])),
    "G": (_rule_G, lambda k: (k[0] + k[1], k[0])),
    "G0": (rule_G_char(0, 0), lambda k: (k[0] + k[1], k[0])),
    "G1": (rule_G_char(1, 0), lambda k: (k[0] + k[1], k[0])),
}


def halphen_g(p):
    """Halphen derivation -12 g3 d/dg2 - (2/3) g2^2 d/dg3 on QQ[g2, g3]."""
    return -12 * G3 * p.diff(G2) - QQ(2, 3) * G2**2 * p.diff(G3)


def _grow_C(extent, old):
    vals = dict(old)
    for k in range(extent + 1):
        if k in vals:
            continue
        if k == 0:
            vals[k] = G_RING.one
        elif k == 1:
            vals[k] = G_RING.zero
        else:
            vals[k] = -halphen_g(vals[k - 1]) - QQ((k - 1) * (2 * k - 1), 6) * G2 * vals[k - 2]
    return vals


_LOCK = threading.Lock()
_TABLES: dict[str, RecurrenceTable] = {}
_VIEWS: dict[tuple, RecurrenceTable] = {}


def build_table(family: str, extent: int) -> RecurrenceTable:
    """Return the table of ``family`` with exactly the requested ``extent``.

    The largest table built so far is memoized per family; a larger request
    extends it and publishes a new immutable snapshot, a smaller one gets a
    (memoized) truncated view. Results never depend on earlier calls.

    Examples
    --------
    >>> t = build_table("A", 2)
    >>> t[1, 0], t[0, 1]
    (-1, -3)
    """
    if family not in FAMILIES:
        raise DomainError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if int(extent) != extent or extent < 0:
        raise DomainError("extent must be a non-negative integer")
    extent = int(extent)
    view = _VIEWS.get((family, extent))
    if view is not None:
        return view
    with _LOCK:
        cached = _TABLES.get(family)
        if cached is not None and cached.extent >= extent:
            return _truncated(cached, extent)
        old = dict(cached.entries) if cached else {}
        if family == "C":
            vals = _grow_C(extent, old)
        else:
            rule, key = _RULES[family]
            vals = _grow_2d(family, rule, key, extent, old)
        table = RecurrenceTable(family, extent, MappingProxyType(vals))
        _TABLES[family] = table
        _VIEWS[(family, extent)] = table
        return table


def _truncated(table: RecurrenceTable, extent: int) -> RecurrenceTable:
    if table.family == "C":
        keep = {k: v for k, v in table.entries.items() if k <= extent}
    else:
        keep = {k: v for k, v in table.entries.items() if k[0] + k[1] <= extent}
    view = RecurrenceTable(table.family, extent, MappingProxyType(keep))
    _VIEWS[(table.family, extent)] = view
    return view


def g_char_entry(alpha: int, beta: int, m: int, n: int) -> int:
    """G^(alpha,beta)_{m,n} for an even characteristic, read from the two stored tables.

    (0,0) and (1,0) are stored; (0,1) follows from the index-permutation
    relation G^(beta,alpha) = (-1)^((m+n)(alpha+beta)) G^(alpha,beta).
    """
    a, b = alpha % 2, beta % 2
    if (a, b) == (1, 1):
        raise DomainError("odd characteristic has no G^(alpha,beta) table")
    if m < 0 or n < 0:
        return 0
    if (a, b) == (0, 0):
        return build_table("G0", m + n)[m, n]
    v = build_table("G1", m + n)[m, n]
    if (a, b) == (0, 1) and (m + n) % 2:
        return -v
    return v


# series containers ---------------------------------------------------------------

def _qq_to_complex(c) -> complex:
    return complex(Fraction(int(c.numerator), int(c.denominator)))


def _compile(poly):
    return [(monom, _qq_to_complex(c)) for monom, c in sorted(poly.terms())]


def _eval_compiled(compiled, values):
    total = 0j
    for monom, c in compiled:
        t = c
        for v, e in zip(values, monom):
            if e:
                t *= v**e
        total += t
    return total


@dataclass(frozen=True)
class SeriesPoly:
    """Truncated power series in x whose coefficients are exact polynomials.

    Attributes
    ----------
    representation : str
        ``"g"`` for (g2, g3), ``"e"`` for (e_lam, g2), ``"theta"`` for
        (eta, pi^2, vartheta^4, vartheta^4).
    terms : tuple
        Pairs (power of x, coefficient polynomial), factorials included.
    order : int
        Number of retained coefficient groups minus one.
    """

    representation: str
    terms: tuple
    order: int
    variable: str = "x"

    @property
    def names(self):
        return {"g": ("g2", "g3"), "e": ("e", "g2"), "theta": ("eta", "P", "U", "V")}[self.representation]

    def coefficients(self):
        return [c for _, c in self.terms]

    def diff_x(self) -> "SeriesPoly":
        out = []
        for p, c in self.terms:
            if p:
                out.append((p - 1, c * p))
        return SeriesPoly(self.representation, tuple(out), self.order, self.variable)

    def diff_param(self, index: int) -> "SeriesPoly":
        """Partial derivative with respect to the coefficient variable number ``index``."""
        out = []
        for p, c in self.terms:
            gen = c.ring.gens[index]
            out.append((p, c.diff(gen)))
        return SeriesPoly(self.representation, tuple(out), self.order, self.variable)

    def evaluate(self, x, values) -> complex:
        """Numeric value at x with coefficient variables set to ``values`` (ordered as names)."""
        x = complex(x)
        values = [complex(v) for v in values]
        total = 0j
        for p, compiled in self._compiled():
            total += _eval_compiled(compiled, values) * x**p
        return total

    def _compiled(self):
        cache = self.__dict__.get("_cache")
        if cache is None:
            cache = [(p, _compile(c)) for p, c in self.terms]
            object.__setattr__(self, "_cache", cache)
        return cache


def _fact(n):
    return math.factorial(n)


@functools.lru_cache(maxsize=None)
def sigma_poly_g(order: int) -> SeriesPoly:
    """Exact sigma series through x^(2 order + 1) grouped from the A table.

    Coefficient of x^(2k+1)/(2k+1)! is
    sum_{nu} 2^(2k-5nu) A_{3nu-k, k-2nu} g2^(3nu-k) g3^(k-2nu).
    """
    if order < 0:
        raise DomainError("order must be >= 0")
    A = build_table("A", order)
    terms = []
    for k in range(order + 1):
        ck = sigma_coefficient_A(k, A)
        terms.append((2 * k + 1, ck * QQ(1, _fact(2 * k + 1))))
    return SeriesPoly("g", tuple(terms), order)


def sigma_coefficient_A(k: int, A: RecurrenceTable | None = None):
    """Grouped coefficient C_k(g2, g3) built from Weierstrass' A table."""
    A = A or build_table("A", k)
    ck = G_RING.zero
    for nu in range(-(-k // 3), k // 2 + 1):
        m, n = 3 * nu - k, k - 2 * nu
        ck += QQ(2) ** (2 * k - 5 * nu) * A[m, n] * G2**m * G3**n
    return ck


def sigma_coefficient_C(k: int):
    """Halphen coefficient C_k(g2, g3)."""
    return build_table("C", k)[k]


def sigma_series_g(x, g2, g3, order: int = 18) -> complex:
    """sigma(x; g2, g3) summed through x^(2 order + 1).

    Examples
    --------
    >>> sigma_series_g(0.3, 0, 0, 5)
    (0.3+0j)
    """
    if order < 1:
        raise DomainError("order must be >= 1")
    return sigma_poly_g(order).evaluate(x, (g2, g3))


@functools.lru_cache(maxsize=None)
def xi_poly(epsilon: int, order: int) -> SeriesPoly:
    """Universal series in (e_lam, g2) through k = order.

    Coefficient of x^(2k+1-eps)/(2k+1-eps)! is
    sum_nu 2^(-nu) B^(eps)_{k-2nu, nu} e_lam^(k-2nu) g2^nu.
    """
    if epsilon not in (0, 1):
        raise DomainError("epsilon must be 0 or 1")
    if order < 0:
        raise DomainError("order must be >= 0")
    B = build_table(f"B{epsilon}", order)
    terms = []
    for k in range(order + 1):
        ck = E_RING.zero
        for nu in range(k // 2 + 1):
            ck += QQ(1, 2**nu) * B[k - 2 * nu, nu] * E_LAM ** (k - 2 * nu) * E_G2**nu
        p = 2 * k + 1 - epsilon
        terms.append((p, ck * QQ(1, _fact(p))))
    return SeriesPoly("e", tuple(terms), order)


def xi_series(epsilon: int, x, e_lam, g2, order: int = 18) -> complex:
    """Xi(x; e_lam, g2): sigma_lambda for epsilon = 1, sigma for epsilon = 0.

    For epsilon = 0 the invariant g3 is implied by g3 = 4 e^3 - g2 e, so e_lam
    must be a root of the cubic of the intended lattice.
    """
    return xi_poly(epsilon, order).evaluate(x, (e_lam, g2))


# theta expansions ----------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def n_poly(nu: int):
    """N_nu = sum_s G_{nu-s,s} V^s U^(nu-s) with U = vartheta_2^4, V = vartheta_4^4."""
    G = build_table("G", nu)
    out = T_RING.zero
    for s in range(nu + 1):
        out += G[nu - s, s] * T_V**s * T_U ** (nu - s)
    return out


@functools.lru_cache(maxsize=None)
def n_poly_char(alpha: int, beta: int, nu: int):
    """N^(alpha,beta)_nu with U = vartheta_{alpha-1,0}^4, V = vartheta_{0,beta-1}^4."""
    out = T_RING.zero
    for s in range(nu + 1):
        out += g_char_entry(alpha, beta, nu - s, s) * T_V**s * T_U ** (nu - s)
    return out


@functools.lru_cache(maxsize=None)
def theta1_poly(order: int) -> SeriesPoly:
    """theta_1 / (2 pi etahat^3) as a series in x with (eta, pi^2, U, V) coefficients."""
    terms = []
    for k in range(order + 1):
        ck = T_RING.zero
        for nu in range(k + 1):
            ck += (QQ((-2) ** k, _fact(k - nu) * _fact(2 * nu + 1)) * QQ(1, (-6) ** nu)
                   * T_P**nu * T_ETA ** (k - nu) * n_poly(nu))
        terms.append((2 * k + 1, ck))
    return SeriesPoly("theta", tuple(terms), order)


@functools.lru_cache(maxsize=None)
def theta_char_poly(alpha: int, beta: int, order: int) -> SeriesPoly:
    """theta_{alpha beta} / vartheta_{alpha beta} for an even characteristic."""
    if alpha % 2 and beta % 2:
        raise DomainError("theta_char_poly needs an even characteristic")
    terms = []
    for k in range(order + 1):
        ck = T_RING.zero
        for nu in range(k + 1):
            ck += (QQ((-2) ** k, _fact(k - nu) * _fact(2 * nu)) * QQ(1, (-6) ** nu)
                   * T_P**nu * T_ETA ** (k - nu) * n_poly_char(alpha, beta, nu))
        terms.append((2 * k, ck))
    return SeriesPoly("theta", tuple(terms), order)


def _theta_values(tau, opts, u_kind, v_kind):
    return (eta_w(tau, opts), PI**2, vartheta(u_kind, tau, opts) ** 4, vartheta(v_kind, tau, opts) ** 4)


def _char_kinds(alpha, beta):
    """Classical indices of vartheta_{alpha-1,0} and vartheta_{0,beta-1}."""
    u = 2 if (alpha - 1) % 2 else 3
    v = 4 if (beta - 1) % 2 else 3
    return u, v


def theta1_series(x, tau, order: int = 18, opts: EvalOptions | None = None) -> complex:
    """Classical theta_1(x|tau) from the integer G recurrence."""
    tau = Tau.coerce(tau)
    if order < 0:
        raise DomainError("order must be >= 0")
    pref = 2 * PI * etahat(tau, opts) ** 3
    return pref * theta1_poly(order).evaluate(x, _theta_values(tau, opts, 2, 4))


def theta_series_char(char, x, tau, order: int = 18, opts: EvalOptions | None = None) -> complex:
    """Even theta_{alpha beta}(x|tau) from the symmetric-representation series."""
    char = Characteristic.coerce(char)
    tau = Tau.coerce(tau)
    if char.parity == 0:
        raise DomainError("theta_series_char needs an even characteristic")
    u, v = _char_kinds(char.alpha, char.beta)
    base = vartheta_char(char, tau, opts)
    return base * theta_char_poly(char.alpha, char.beta, order).evaluate(x, _theta_values(tau, opts, u, v))


def vartheta_deriv(char, k: int, tau, opts: EvalOptions | None = None) -> complex:
    """k-th tau-derivative of the even theta constant vartheta_{alpha beta}.

    Read off as (2k)!/(4 pi i)^k times the x^(2k) coefficient of the grouped series.
    """
    char = Characteristic.coerce(char)
    tau = Tau.coerce(tau)
    if k < 0:
        raise DomainError("k must be >= 0")
    if char.parity == 0:
        raise DomainError("vartheta_deriv needs an even characteristic")
    base = vartheta_char(char, tau, opts)
    if k == 0:
        return base
    u, v = _char_kinds(char.alpha, char.beta)
    p, coeff = theta_char_poly(char.alpha, char.beta, k).terms[k]
    val = _eval_compiled(_compile(coeff), _theta_values(tau, opts, u, v))
    return base * val * _fact(2 * k) / (4j * PI) ** k


def expand_rows(poly: SeriesPoly):
    """Rows (power, monomial exponents, exact coefficient string) in a stable order."""
    rows = []
    for p, c in poly.terms:
        for monom, q in sorted(c.terms()):
            rows.append((p, monom, str(Fraction(int(q.numerator), int(q.denominator)))))
    return rows


__all__ = [
    "RecurrenceTable", "SeriesPoly", "build_table", "g_char_entry", "halphen_g",
    "sigma_poly_g", "sigma_coefficient_A", "sigma_coefficient_C", "sigma_series_g",
    "xi_poly", "xi_series", "n_poly", "n_poly_char", "theta1_poly", "theta_char_poly",
    "theta1_series", "theta_series_char", "vartheta_deriv", "expand_rows", "rule_G_char",
    "G_RING", "E_RING", "T_RING",
]
