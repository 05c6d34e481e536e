"""Residuals of the differential systems satisfied by theta and sigma functions.

Every operation evaluates both sides of a set of equations at a point and
returns a :class:`ResidualReport`. Left sides come from term-wise
differentiation of the q-series (or of the exact recurrence series); right
sides are assembled from function values and the constants eta, vartheta.
No finite differences are used here.

Each equation is normalized by the largest magnitude among its additive
terms, so reported residuals are scale free.

Higher tau-derivatives of vartheta and eta, needed by the scalar ODEs, are
produced symbolically. With h = eta and A, B, C = vartheta_2^4, vartheta_3^4,
vartheta_4^4 the constant flow reads d/dtau = (i/pi) D for a polynomial
derivation D on QQ[h, P, A, B, C] (P = pi^2), so every derivative is again a
polynomial that is evaluated once at the end. The coefficients of that flow
live in :data:`VAR_FLOW`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from . import modular
from .errors import DomainError, PoleError
from .qkernel import (
    Characteristic, EvalOptions, Tau, eta_w, etahat, g2, g3, jtheta, theta_series, vartheta,
)
from .recur import SeriesPoly, T_RING, sigma_poly_g, xi_poly
from .weier import e_lambda, halphen_op, invariant_polys

PI = math.pi
I = 1j
SINGULAR_THRESHOLD = 1e-12


class SystemKind(str, Enum):
    """Labels of the residual suites."""

    THETA_X = "theta_x"
    THETA_TAU = "theta_tau"
    THETA_HEAT = "theta_heat"
    WEIER_TAU = "weier_tau"
    SIGMA_HEAT = "sigma_heat"
    SIGMA_PDE_S12 = "sigma_pde_s12"
    XI_EPSILON = "xi_epsilon"
    VARTHETA_FLOW = "vartheta_flow"
    G_FLOW = "g_flow"
    JACOBI_THETA_ODE = "jacobi_theta_ode"
    LOGDERIV_ODE = "logderiv_ode"
    LAMBDA_ODE = "lambda_ode"
    GENERAL_SOLUTION_X = "general_solution_x"
    GENERAL_SOLUTION_TAU = "general_solution_tau"
    VARTHETA_FLOW_AB = "vartheta_flow_ab"


@dataclass(frozen=True)
class EquationResidual:
    """One equation: |lhs - rhs| and the normalizing scale."""

    label: str
    residual: float
    scale: float
    tail_estimate: float = 0.0

    @property
    def rel(self) -> float:
        return self.residual / self.scale if self.scale > 0 else self.residual


@dataclass(frozen=True)
class ResidualReport:
    """Per-equation residuals of one system at one point (or grid)."""

    system: str
    per_equation: tuple
    grid: str = ""
    max_rel: float = field(init=False)

    def __post_init__(self):
        rels = [e.rel for e in self.per_equation]
        for e in self.per_equation:
            if not (math.isfinite(e.residual) and math.isfinite(e.scale)):
                raise ArithmeticError(f"{self.system}: non-finite residual in {e.label}")
        object.__setattr__(self, "max_rel", max(rels, default=0.0))

    def failing(self, budget: float):
        """Equations whose normalized residual exceeds ``budget``."""
        return [e for e in self.per_equation if e.rel > budget]

    def merged(self, other: "ResidualReport") -> "ResidualReport":
        return ResidualReport(self.system, self.per_equation + other.per_equation,
                              "; ".join(g for g in (self.grid, other.grid) if g))


def _eq(label, lhs, *rhs_terms, tail=0.0) -> EquationResidual:
    """Residual of lhs = sum(rhs_terms)."""
    res = abs(lhs - sum(rhs_terms))
    scale = max([abs(lhs)] + [abs(t) for t in rhs_terms])
    return EquationResidual(label, res, scale, tail)


def _sgn(n: int) -> int:
    return -1 if n % 2 else 1


def _guard(value, scale, label):
    if abs(value) < SINGULAR_THRESHOLD * max(scale, 1.0):
        raise PoleError(f"{label}: theta_1 vanishes at this point")


# ---------------------------------------------------------------------------
# theta systems

DEFAULT_CHARS = ((0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (-1, 2), (1, -1), (2, 2))


@dataclass(frozen=True)
class _ThetaState:
    """theta_1..4, theta_1' (classical) and their x- or tau-derivatives."""

    t: dict
    t1p: complex


def _thetas(x, tau, opts, dx=0, dtau=0):
    t = {k: jtheta(k, x, tau, dx, dtau, opts) for k in (1, 2, 3, 4)}
    return _ThetaState(t, jtheta(1, x, tau, dx + 1, dtau, opts))


def _constants(tau, opts):
    v = {k: vartheta(k, tau, opts) for k in (2, 3, 4)}
    return v, eta_w(tau, opts)


def _x_rhs(T, T1p, v, eta):
    """Right sides of the classical x-system for the five functions."""
    T1 = T[1]
    return {
        "dtheta1/dx": (T1p,),
        "dtheta2/dx": (T1p / T1 * T[2], -PI * v[2] ** 2 * T[3] * T[4] / T1),
        "dtheta3/dx": (T1p / T1 * T[3], -PI * v[3] ** 2 * T[2] * T[4] / T1),
        "dtheta4/dx": (T1p / T1 * T[4], -PI * v[4] ** 2 * T[2] * T[3] / T1),
        "dtheta1'/dx": (T1p**2 / T1, -PI**2 * v[3] ** 2 * v[4] ** 2 * T[2] ** 2 / T1,
                        -(4 * eta + PI**2 / 3 * (v[3] ** 4 + v[4] ** 4)) * T1),
    }


def _tau_rhs(T, T1p, v, eta):
    """Right sides of the classical tau-system."""
    T1 = T[1]
    W = I / PI * eta + PI * I / 12 * (v[3] ** 4 + v[4] ** 4)
    c34 = v[3] ** 2 * v[4] ** 2
    r2 = T1p / T1 - PI * v[2] ** 2 * T[3] * T[4] / (T1 * T[2])
    return {
        "dtheta1/dtau": (-I / (4 * PI) * T1p**2 / T1, PI * I / 4 * c34 * T[2] ** 2 / T1, W * T1),
        "dtheta2/dtau": (-I / (4 * PI) * r2**2 * T[2], PI * I / 4 * c34 * T1**2 / T[2], W * T[2]),
        "dtheta3/dtau": (-I / (4 * PI) * T1p**2 / T1**2 * T[3], I / 2 * v[3] ** 2 * T[2] * T[4] * T1p / T1**2,
                         -PI * I / 4 * v[2] ** 2 * v[3] ** 2 * T[4] ** 2 / T1**2 * T[3], W * T[3]),
        "dtheta4/dtau": (-I / (4 * PI) * T1p**2 / T1**2 * T[4], I / 2 * v[4] ** 2 * T[2] * T[3] * T1p / T1**2,
                         -PI * I / 4 * v[2] ** 2 * v[4] ** 2 * T[3] ** 2 / T1**2 * T[4], W * T[4]),
        "dtheta1'/dtau": (-I / (4 * PI) * T1p**3 / T1**2,
                          3 * (PI * I / 4 * c34 * T[2] ** 2 / T1**2 + W) * T1p,
                          -PI**2 / 2 * I * v[2] ** 2 * c34 * T[2] * T[3] * T[4] / T1**2),
    }


def _char_terms(char, x, tau, opts):
    """theta_{ab}, theta_{1-a,0}, theta_{0,1-b} at x."""
    a, b = char
    th = lambda al, be: theta_series((al, be), x, tau, 0, 0, opts).value
    return th(a, b), th(1 - a, 0), th(0, 1 - b)


def _x_char_rhs(char, vab, t_ab, t_a0, t_0b, T1, T1p):
    a, b = char
    s = _sgn(a) ** (b // 2) if a % 2 else 1
    return (T1p / T1 * t_ab, -s * PI * vab**2 * t_a0 * t_0b / T1)


def _tau_char_rhs(char, vab, t_ab, t_a0, t_0b, T1, T1p, eta, v, t10x, v_a0, v_0b):
    a, b = char
    s = _sgn(a) ** (b // 2) if a % 2 else 1
    W = I / PI * eta + PI * I / 12 * (v[3] ** 4 + v[4] ** 4)
    brace = t10x**2 / v[2] ** 2
    if (a * b) % 2 == 0:
        brace -= t_a0**2 / v_a0**2 + t_0b**2 / v_0b**2
    return (-I / (4 * PI) * T1p**2 / T1**2 * t_ab,
            s * I / 2 * vab**2 * t_a0 * t_0b / T1**2 * T1p,
            PI * I / 4 * v[2] ** 2 * v[3] ** 2 * v[4] ** 2 * brace * t_ab / T1**2,
            W * t_ab)


def residual_theta_system(kind, x, tau, opts: EvalOptions | None = None, chars=DEFAULT_CHARS) -> ResidualReport:
    """Residuals of the x-system, tau-system or heat identity for theta functions.

    ``theta_x`` and ``theta_tau`` cover the five classical equations plus the
    forms with integer characteristics for every entry of ``chars``.
    ``theta_heat`` checks theta_xx = 4 pi i theta_tau for each of ``chars``.
    The quotient equations divide by theta_1(x); a zero raises PoleError.

    Examples
    --------
    >>> residual_theta_system("theta_x", 0.3, 1.2j).max_rel < 1e-10
    True
    """
    kind = SystemKind(kind)
    if kind not in (SystemKind.THETA_X, SystemKind.THETA_TAU, SystemKind.THETA_HEAT):
        raise DomainError(f"{kind.value} is not a theta system")
    tau = Tau.coerce(tau)
    x = complex(x)
    grid = f"x={x}, tau={tau.value}"
    if kind is SystemKind.THETA_HEAT:
        out = []
        for ch in chars:
            lhs = theta_series(ch, x, tau, 2, 0, opts).value
            rhs = 4 * PI * I * theta_series(ch, x, tau, 0, 1, opts).value
            out.append(_eq(f"heat{tuple(ch)}", lhs, rhs))
        return ResidualReport(kind.value, tuple(out), grid)

    v, eta = _constants(tau, opts)
    base = _thetas(x, tau, opts)
    T, T1p = base.t, base.t1p
    _guard(T[1], abs(2 * PI * etahat(tau, opts) ** 3), kind.value)
    out = []
    if kind is SystemKind.THETA_X:
        lhs = _thetas(x, tau, opts, dx=1)
        rhs = _x_rhs(T, T1p, v, eta)
        L = {"dtheta1/dx": lhs.t[1], "dtheta2/dx": lhs.t[2], "dtheta3/dx": lhs.t[3],
             "dtheta4/dx": lhs.t[4], "dtheta1'/dx": lhs.t1p}
        out += [_eq(k, L[k], *rhs[k]) for k in rhs]
        for ch in chars:
            a, b = ch
            t_ab, t_a0, t_0b = _char_terms(ch, x, tau, opts)
            vab = theta_series(ch, 0, tau, 0, 0, opts).value
            lhs_ab = theta_series(ch, x, tau, 1, 0, opts).value
            out.append(_eq(f"dtheta{tuple(ch)}/dx", lhs_ab, *_x_char_rhs(ch, vab, t_ab, t_a0, t_0b, T[1], T1p)))
    else:
        lhs = _thetas(x, tau, opts, dtau=1)
        rhs = _tau_rhs(T, T1p, v, eta)
        L = {"dtheta1/dtau": lhs.t[1], "dtheta2/dtau": lhs.t[2], "dtheta3/dtau": lhs.t[3],
             "dtheta4/dtau": lhs.t[4], "dtheta1'/dtau": lhs.t1p}
        out += [_eq(k, L[k], *rhs[k]) for k in rhs]
        for ch in chars:
            out.append(_tau_char_equation(ch, x, tau, opts, T, T1p, v, eta))
    return ResidualReport(kind.value, tuple(out), grid)


def _tau_char_equation(ch, x, tau, opts, T, T1p, v, eta, values=None, lhs=None):
    a, b = ch
    sv = lambda al, be: theta_series((al, be), 0, tau, 0, 0, opts).value
    if values is None:
        t_ab, t_a0, t_0b = _char_terms(ch, x, tau, opts)
    else:
        t_ab, t_a0, t_0b = values
    if lhs is None:
        lhs = theta_series(ch, x, tau, 0, 1, opts).value
    rhs = _tau_char_rhs(ch, sv(a, b), t_ab, t_a0, t_0b, T[1], T1p, eta, v,
                        T[2], sv(1 - a, 0), sv(0, 1 - b))
    return _eq(f"dtheta{tuple(ch)}/dtau", lhs, *rhs)


# ---------------------------------------------------------------------------
# Weierstrass systems

@dataclass(frozen=True)
class _WeierPoint:
    """sigma, zeta, wp, wp' and their tau-derivatives at (x | 1, tau)."""

    sigma: complex
    zeta: complex
    wp: complex
    wpp: complex
    d_sigma: complex
    d_zeta: complex
    d_wp: complex
    d_wpp: complex
    eta: complex
    g2: complex


def _weier_point(x, tau, opts) -> _WeierPoint:
    """Values and tau-derivatives through theta_1 log-derivatives, term by term.

    With Lj = theta_1^(j)/theta_1 at y = x/2 (fixed while tau varies) one has
    d Lj / dtau = theta_1^(j)_tau / theta_1 - Lj theta_1_tau / theta_1.
    """
    tau = Tau.coerce(tau)
    u = complex(x)
    y = u / 2
    th = [jtheta(1, y, tau, j, 0, opts) for j in range(4)]
    th_t = [jtheta(1, y, tau, j, 1, opts) for j in range(4)]
    eh = etahat(tau, opts)
    _guard(th[0], abs(2 * PI * eh**3), "weierstrass")
    eta, eta_t = eta_w(tau, opts), eta_w(tau, opts, dtau=1)
    L = [None] + [th[j] / th[0] for j in (1, 2, 3)]
    M = [None] + [th_t[j] / th[0] - L[j] * th_t[0] / th[0] for j in (1, 2, 3)]
    sig = cmath.exp(eta * u * u / 2) * th[0] / (PI * eh**3)
    dlog_sig = eta_t * u * u / 2 + th_t[0] / th[0] - 3 * etahat(tau, opts, dtau=1) / eh
    zeta = eta * u + L[1] / 2
    wp = -eta - (L[2] - L[1] ** 2) / 4
    wpp = -(L[3] - 3 * L[2] * L[1] + 2 * L[1] ** 3) / 8
    return _WeierPoint(
        sigma=sig, zeta=zeta, wp=wp, wpp=wpp,
        d_sigma=sig * dlog_sig,
        d_zeta=eta_t * u + M[1] / 2,
        d_wp=-eta_t - (M[2] - 2 * L[1] * M[1]) / 4,
        d_wpp=-(M[3] - 3 * M[2] * L[1] - 3 * L[2] * M[1] + 6 * L[1] ** 2 * M[1]) / 8,
        eta=eta, g2=g2(tau, opts),
    )


def _weier_tau(x, tau, opts):
    p = _weier_point(x, tau, opts)
    x = complex(x)
    s, z, w, wq, e, G = p.sigma, p.zeta, p.wp, p.wpp, p.eta, p.g2
    c = I / PI
    out = [
        _eq("dsigma/dtau", p.d_sigma, c * w * s, -c * z * z * s, c * 2 * e * (x * z - 1) * s, -c * G * x * x / 12 * s),
        _eq("dzeta/dtau", p.d_zeta, c * wq, c * 2 * e * z, c * 2 * w * (z - x * e), -c * G * x / 6),
        _eq("dwp/dtau", p.d_wp, -2 * c * 2 * w * w, -2 * c * wq * (z - x * e), 2 * c * 2 * e * w, 2 * c * G / 3),
        _eq("dwp'/dtau", p.d_wpp, -6 * c * wq * (w - e), -6 * c * (2 * w * w - G / 6) * (z - x * e)),
    ]
    # omega-derivatives at (omega, omega') = (1, tau): homogeneity of weight k
    # gives d/domega = k - x d/dx - tau d/dtau; eta' = zeta(tau) = eta tau - pi i / 2.
    t = Tau.coerce(tau).value
    ep = e * t - PI * I / 2
    wx = 6 * w * w - G / 2
    d_om = {
        "dsigma/domega": s - x * z * s - t * p.d_sigma,
        "dzeta/domega": -z + x * w - t * p.d_zeta,
        "dwp/domega": -2 * w - x * wq - t * p.d_wp,
        "dwp'/domega": -3 * wq - x * wx - t * p.d_wpp,
    }
    out += [
        _eq("dsigma/domega", d_om["dsigma/domega"], -c * t * (w - z * z - G * x * x / 12) * s, -c * 2 * ep * (x * z - 1) * s),
        _eq("dzeta/domega", d_om["dzeta/domega"], -c * t * (wq + 2 * z * w - G * x / 6), -c * 2 * ep * (z - x * w)),
        _eq("dwp/domega", d_om["dwp/domega"], 2 * c * t * (2 * w * w + z * wq - G / 3), -2 * c * ep * (2 * w + x * wq)),
        _eq("dwp'/domega", d_om["dwp'/domega"], c * t * (6 * w * wq + 12 * z * w * w - G * z),
            -c * ep * (6 * wq + 12 * x * w * w - G * x)),
    ]
    return out


def _sigma_heat(x, tau, opts):
    p = _weier_point(x, tau, opts)
    x = complex(x)
    s_x = p.zeta * p.sigma
    s_xx = (p.zeta**2 - p.wp) * p.sigma
    return [_eq("sigma_heat", s_xx, 2 * x * p.eta * s_x, PI * I * p.d_sigma, -(2 * p.eta + p.g2 * x * x / 12) * p.sigma)]


def _s12_terms(x, vals, order):
    """Additive terms of both equations for the series truncated at ``order``."""
    poly = sigma_poly_g(order)
    G2v, G3v = vals
    ev = lambda q: q.evaluate(x, vals)
    s, sx, sxx = ev(poly), ev(poly.diff_x()), ev(poly.diff_x().diff_x())
    sg2, sg3 = ev(poly.diff_param(0)), ev(poly.diff_param(1))
    return ((x * sx, 4 * G2v * sg2, 6 * G3v * sg3, s),
            (sxx, 12 * G3v * sg2, 2 / 3 * G2v**2 * sg3, -G2v * x * x / 12 * s))


def _s12(x, tau, opts, order):
    """Both equations at truncation order N.

    The truncated series leaves uncancelled top-degree terms; the reported
    tail estimate is the operator applied to the next series group, i.e. the
    change of the signed residual between orders N and N + 1, doubled as for
    the q-series tails.
    """
    x = complex(x)
    vals = (g2(tau, opts), g3(tau, opts))
    signed = lambda t: t[0] - sum(t[1:])
    now, nxt = _s12_terms(x, vals, order), _s12_terms(x, vals, order + 1)
    return [
        _eq(label, t[0], *t[1:], tail=2 * abs(signed(u) - signed(t)))
        for label, t, u in zip(("s12_euler", "s12_halphen"), now, nxt)
    ]


# e_lambda in the (vartheta_2, vartheta_4) representation: U = vartheta_2^4, V = vartheta_4^4.
def _e_poly(lam):
    eta_, P, U, V = T_RING.gens
    return {1: QQ(1, 12) * P * (U + 2 * V), 2: QQ(1, 12) * P * (U - V), 3: -QQ(1, 12) * P * (2 * U + V)}[lam]


def _xi_epsilon(x, tau, opts, epsilon, lam, order, e_value=None):
    poly = xi_poly(epsilon, order)
    e = e_lambda(lam, tau, opts) if e_value is None else complex(e_value)
    G = g2(tau, opts)
    vals = (e, G)
    ev = lambda q: q.evaluate(x, vals)
    X, Xx, Xxx = ev(poly), ev(poly.diff_x()), ev(poly.diff_x().diff_x())
    Xe, Xg = ev(poly.diff_param(0)), ev(poly.diff_param(1))
    x = complex(x)
    tag = f"[eps={epsilon},lam={lam}]"
    out = [
        _eq("xi_euler" + tag, x * Xx, 2 * e * Xe, 4 * G * Xg, (1 - epsilon) * X),
        _eq("xi_halphen" + tag, Xxx, (4 * e * e - 2 / 3 * G) * Xe, 12 * (4 * e**3 - G * e) * Xg,
            -(epsilon * e + G * x * x / 12) * X),
    ]
    if e_value is None:
        # theta form: Halphen's operator acting through e(vartheta), g2(vartheta)
        tv = (eta_w(tau, opts), PI**2, vartheta(2, tau, opts) ** 4, vartheta(4, tau, opts) ** 4)
        ep = _e_poly(lam)
        g2p, _ = invariant_polys((1, 1))
        num = lambda q: SeriesPoly("theta", ((0, q),), 0).evaluate(0, tv)
        D_e, D_g2 = num(halphen_op(ep)), num(halphen_op(g2p))
        U, V = tv[2], tv[3]
        quad = PI**4 / 144 * (U * U + U * V + V * V) * x * x
        out.append(_eq("xi_theta_form" + tag, Xxx, -(Xe * D_e + Xg * D_g2), -(epsilon * e + quad) * X))
    return out


def residual_weier_system(kind, x, tau, opts: EvalOptions | None = None, *, epsilon: int = 1,
                          lam: int = 2, order: int = 20, e_value=None) -> ResidualReport:
    """Residuals of the Weierstrass-side systems at (x | 1, tau).

    Parameters
    ----------
    kind : {"weier_tau", "sigma_heat", "sigma_pde_s12", "xi_epsilon"}
    epsilon, lam : int
        Parity and branch label for ``xi_epsilon``.
    order : int
        Truncation order of the recurrence series (``sigma_pde_s12``, ``xi_epsilon``).
    e_value : complex, optional
        Override for e_lambda in ``xi_epsilon``; with epsilon = 0 any value is admissible.

    Notes
    -----
    ``weier_tau`` also checks the omega-derivatives at (omega, omega') = (1, tau).
    Its right sides never read g3.
    """
    kind = SystemKind(kind)
    tau = Tau.coerce(tau)
    if kind is SystemKind.WEIER_TAU:
        eqs = _weier_tau(x, tau, opts)
    elif kind is SystemKind.SIGMA_HEAT:
        eqs = _sigma_heat(x, tau, opts)
    elif kind is SystemKind.SIGMA_PDE_S12:
        eqs = _s12(x, tau, opts, order)
    elif kind is SystemKind.XI_EPSILON:
        if epsilon not in (0, 1):
            raise DomainError("epsilon must be 0 or 1")
        eqs = _xi_epsilon(x, tau, opts, epsilon, lam, order, e_value)
    else:
        raise DomainError(f"{kind.value} is not a Weierstrass system")
    return ResidualReport(kind.value, tuple(eqs), f"x={complex(x)}, tau={tau.value}")


# ---------------------------------------------------------------------------
# constant flows

#: Coefficients of the vartheta/eta flow. For k = 2, 3, 4:
#: (1/vartheta_k) d vartheta_k/dtau = (i/pi) eta + (pi i/12) sum_j c_kj vartheta_j^4.
#: "eta" holds (a, b) in d eta/dtau = (i/pi){a eta^2 + b pi^4 (vartheta_2^8 + vartheta_3^8 + vartheta_4^8)}.
VAR_FLOW = {
    2: {2: 0, 3: 1, 4: 1},
    3: {2: 1, 3: 0, 4: -1},
    4: {2: -1, 3: -1, 4: 0},
    "eta": (2, QQ(-1, 144)),
}


def _var_rhs(v, eta):
    out = {}
    for k in (2, 3, 4):
        lin = sum(VAR_FLOW[k][j] * v[j] ** 4 for j in (2, 3, 4))
        out[f"dvartheta{k}/dtau"] = (v[k] * I / PI * eta, v[k] * PI * I / 12 * lin)
    a, b = VAR_FLOW["eta"]
    out["deta/dtau"] = (I / PI * a * eta**2, I / PI * float(b) * PI**4 * sum(v[j] ** 8 for j in (2, 3, 4)))
    return out


def _flow_ab_equations(tau, opts, rep, chars, ev=None):
    """(alpha, beta)-form of the constant flow; ``ev`` overrides the vartheta/eta evaluators."""
    if ev is None:
        val = lambda ch: theta_series(ch, 0, tau, 0, 0, opts).value
        der = lambda ch: theta_series(ch, 0, tau, 0, 1, opts).value
        eta, deta = eta_w(tau, opts), eta_w(tau, opts, dtau=1)
    else:
        val, der, eta, deta = ev
    out = []
    for ch in chars:
        a, b = ch
        lin = _sgn(b) * val((1 - a, 0)) ** 4 - _sgn(a) * val((0, 1 - b)) ** 4
        out.append(_eq(f"dvartheta{tuple(ch)}/dtau", der(ch), val(ch) * I / PI * eta, val(ch) * PI * I / 12 * lin))
    al, be = rep
    A, B = val((al, 0)) ** 4, val((0, be)) ** 4
    out.append(_eq(f"deta/dtau[rep={tuple(rep)}]", deta, I / PI * 2 * eta**2,
                   -I / PI * PI**4 / 72 * (A * A + B * B + _sgn(al + be) * A * B)))
    return out


FLOW_CHARS = ((0, 0), (1, 0), (0, 1), (2, 1), (1, 2), (-1, 0))


def residual_constant_flow(kind, tau, opts: EvalOptions | None = None, *, rep=(1, 0),
                           chars=FLOW_CHARS) -> ResidualReport:
    """Residuals of the vartheta/eta flow, its (alpha, beta) form, or the g2/g3/eta flow.

    Examples
    --------
    >>> residual_constant_flow("g_flow", 0.3 + 1.4j).max_rel < 1e-10
    True
    """
    kind = SystemKind(kind)
    tau = Tau.coerce(tau)
    grid = f"tau={tau.value}"
    if kind is SystemKind.VARTHETA_FLOW:
        v, eta = _constants(tau, opts)
        rhs = _var_rhs(v, eta)
        lhs = {f"dvartheta{k}/dtau": vartheta(k, tau, opts, dtau=1) for k in (2, 3, 4)}
        lhs["deta/dtau"] = eta_w(tau, opts, dtau=1)
        eqs = [_eq(k, lhs[k], *rhs[k]) for k in rhs]
    elif kind is SystemKind.VARTHETA_FLOW_AB:
        ch = Characteristic.coerce(rep)
        if ch.alpha % 2 == 0 and ch.beta % 2 == 0:
            raise DomainError("the (alpha, beta) flow needs (alpha, beta) != (0, 0) mod 2")
        eqs = _flow_ab_equations(tau, opts, (ch.alpha, ch.beta), chars)
    elif kind is SystemKind.G_FLOW:
        G2, G3, e = g2(tau, opts), g3(tau, opts), eta_w(tau, opts)
        c = I / PI
        eqs = [
            _eq("dg2/dtau", g2(tau, opts, dtau=1), c * 8 * G2 * e, -c * 12 * G3),
            _eq("dg3/dtau", g3(tau, opts, dtau=1), c * 12 * G3 * e, -c * 2 / 3 * G2**2),
            _eq("deta/dtau[g]", eta_w(tau, opts, dtau=1), c * 2 * e * e, -c * G2 / 6),
        ]
    else:
        raise DomainError(f"{kind.value} is not a constant flow")
    return ResidualReport(kind.value, tuple(eqs), grid)


# ---------------------------------------------------------------------------
# symbolic chaining of the constant flow

FLOW_RING, F_ETA, F_P, F_A, F_B, F_C = ring("eta,P,A,B,C", QQ)
_FOURTH = {2: F_A, 3: F_B, 4: F_C}


def _flow_polys():
    """R_k with d ln vartheta_k/dtau = (i/pi) R_k, and D(eta)."""
    R = {k: F_ETA + QQ(1, 12) * F_P * sum(QQ(VAR_FLOW[k][j]) * _FOURTH[j] for j in (2, 3, 4)) for k in (2, 3, 4)}
    a, b = VAR_FLOW["eta"]
    Deta = QQ(a) * F_ETA**2 + QQ(b) * F_P**2 * (F_A**2 + F_B**2 + F_C**2)
    return R, Deta


def flow_derivation(poly):
    """D(poly) where d/dtau = (i/pi) D on QQ[eta, P, A, B, C]."""
    R, Deta = _flow_polys()
    out = poly.diff(F_ETA) * Deta
    for k, gen in _FOURTH.items():
        out += poly.diff(gen) * 4 * gen * R[k]
    return out


def vartheta_derivative_polys(kind: int, n: int):
    """[Q_0..Q_n] with d^j vartheta_kind/dtau^j = (i/pi)^j vartheta_kind Q_j."""
    R, _ = _flow_polys()
    Q = [FLOW_RING.one]
    for _ in range(n):
        Q.append(Q[-1] * R[kind] + flow_derivation(Q[-1]))
    return Q


def _flow_values(tau, opts):
    return (eta_w(tau, opts), PI**2) + tuple(vartheta(k, tau, opts) ** 4 for k in (2, 3, 4))


def _num(poly, vals) -> complex:
    """Evaluate an exact polynomial at complex values."""
    return sum((float(c) * math.prod(v**e for v, e in zip(vals, m)) for m, c in poly.terms()), 0j)


def vartheta_tau_derivatives(kind: int, n: int, tau, opts: EvalOptions | None = None):
    """vartheta_kind and its first n tau-derivatives from the chained flow."""
    tau = Tau.coerce(tau)
    vals = _flow_values(tau, opts)
    th = vartheta(kind, tau, opts)
    return [th * (I / PI) ** j * _num(q, vals) for j, q in enumerate(vartheta_derivative_polys(kind, n))]


def residual_scalar_ode(kind, tau, which: int = 3, opts: EvalOptions | None = None) -> ResidualReport:
    """Residuals of the three scalar ODEs in tau.

    ``jacobi_theta_ode`` and ``logderiv_ode`` use vartheta_which (2, 3 or 4);
    ``lambda_ode`` concerns ln etahat. Derivatives come from the chained flow.
    """
    kind = SystemKind(kind)
    tau = Tau.coerce(tau)
    vals = _flow_values(tau, opts)
    c = I / PI
    grid = f"tau={tau.value}"
    if kind in (SystemKind.JACOBI_THETA_ODE, SystemKind.LOGDERIV_ODE) and which not in (2, 3, 4):
        raise DomainError("which must be 2, 3 or 4")
    if kind is SystemKind.JACOBI_THETA_ODE:
        t0, t1, t2, t3 = vartheta_tau_derivatives(which, 3, tau, opts)
        inner = t0 * t0 * t3 - 15 * t0 * t1 * t2 + 30 * t1**3
        cube = t0 * t2 - 3 * t1 * t1
        eq = _eq(f"jacobi_ode[vartheta{which}]", inner**2, -32 * cube**3, -PI**2 * t0**10 * cube**2)
    elif kind is SystemKind.LOGDERIV_ODE:
        R, _ = _flow_polys()
        p = [R[which]]
        for _ in range(3):
            p.append(flow_derivation(p[-1]))
        f, f1, f2, f3 = [c ** (j + 1) * _num(q, vals) for j, q in enumerate(p)]
        eq = _eq(f"logderiv_ode[vartheta{which}]", (f1 - 2 * f * f) * f3, f2 * f2, -16 * f**3 * f2,
                 -4 * f1 * f1 * (f1 - 6 * f * f))
    elif kind is SystemKind.LAMBDA_ODE:
        p = [F_ETA]
        for _ in range(2):
            p.append(flow_derivation(p[-1]))
        L1, L2, L3 = [c ** (j + 1) * _num(q, vals) for j, q in enumerate(p)]
        eh = etahat(tau, opts)
        eq = _eq("lambda_ode", (L3 - 12 * L2 * L1 + 16 * L1**3) ** 2, -32 * (L2 - 2 * L1 * L1) ** 3,
                 4 / 27 * PI**6 * eh**24)
    else:
        raise DomainError(f"{kind.value} is not a scalar ODE")
    return ResidualReport(kind.value, (eq,), grid)


def compatibility(tau, opts: EvalOptions | None = None) -> ResidualReport:
    """tau-derivatives of the x-system coefficients, flow versus series.

    The coefficients pi vartheta_k^2, pi^2 vartheta_3^2 vartheta_4^2 and
    4 eta + (pi^2/3)(vartheta_3^4 + vartheta_4^4) are differentiated once with
    the chained flow and once term by term.
    """
    tau = Tau.coerce(tau)
    vals = _flow_values(tau, opts)
    v = {k: vartheta(k, tau, opts) for k in (2, 3, 4)}
    dv = {k: vartheta(k, tau, opts, dtau=1) for k in (2, 3, 4)}
    deta = eta_w(tau, opts, dtau=1)
    flow = {k: vartheta_tau_derivatives(k, 1, tau, opts)[1] for k in (2, 3, 4)}
    _, Deta = _flow_polys()
    deta_flow = I / PI * _num(Deta, vals)
    out = []
    for k in (2, 3, 4):
        out.append(_eq(f"d(pi vartheta{k}^2)/dtau", 2 * PI * v[k] * flow[k], 2 * PI * v[k] * dv[k]))
    out.append(_eq("d(pi^2 vartheta3^2 vartheta4^2)/dtau",
                   2 * PI**2 * v[3] * v[4] * (flow[3] * v[4] + v[3] * flow[4]),
                   2 * PI**2 * v[3] * v[4] * (dv[3] * v[4] + v[3] * dv[4])))
    out.append(_eq("d(4 eta + pi^2/3 (vartheta3^4 + vartheta4^4))/dtau",
                   4 * deta_flow + 4 * PI**2 / 3 * (v[3] ** 3 * flow[3] + v[4] ** 3 * flow[4]),
                   4 * deta + 4 * PI**2 / 3 * (v[3] ** 3 * dv[3] + v[4] ** 3 * dv[4])))
    return ResidualReport("compatibility", tuple(out), f"tau={tau.value}")


# ---------------------------------------------------------------------------
# general solutions

def _gs_x(params, x, tau, opts, chars):
    a, b, c = (complex(p) for p in params)
    x = complex(x)
    xb = x + b
    ex = cmath.exp(c * x)
    v, eta = _constants(tau, opts)
    th = {k: [jtheta(k, xb, tau, j, 0, opts) for j in range(3)] for k in (1, 2, 3, 4)}
    # candidate family and its exact x-derivative
    T = {k: a * th[k][0] * ex for k in (1, 2, 3, 4)}
    T1p = a * (th[1][1] + c * th[1][0]) * ex
    dT = {k: a * (th[k][1] + c * th[k][0]) * ex for k in (1, 2, 3, 4)}
    dT1p = a * (th[1][2] + 2 * c * th[1][1] + c * c * th[1][0]) * ex
    _guard(T[1], abs(a * ex), "general_solution_x")
    rhs = _x_rhs(T, T1p, v, eta)
    L = {"dtheta1/dx": dT[1], "dtheta2/dx": dT[2], "dtheta3/dx": dT[3], "dtheta4/dx": dT[4], "dtheta1'/dx": dT1p}
    out = [_eq(k, L[k], *rhs[k]) for k in rhs]
    for ch in chars:
        A, B = ch
        f = lambda al, be, j=0: theta_series((al, be), xb, tau, j, 0, opts).value
        t_ab, t_a0, t_0b = (a * f(A, B) * ex, a * f(1 - A, 0) * ex, a * f(0, 1 - B) * ex)
        lhs = a * (f(A, B, 1) + c * f(A, B)) * ex
        vab = theta_series(ch, 0, tau, 0, 0, opts).value
        out.append(_eq(f"dtheta{tuple(ch)}/dx", lhs, *_x_char_rhs(ch, vab, t_ab, t_a0, t_0b, T[1], T1p)))
    return out


def _gs_tau(params, tau, opts, chars):
    a, a_prime, b = (complex(p) for p in params)
    v, eta = _constants(tau, opts)
    th = {k: jtheta(k, b, tau, 0, 0, opts) for k in (1, 2, 3, 4)}
    th_t = {k: jtheta(k, b, tau, 0, 1, opts) for k in (1, 2, 3, 4)}
    T = {k: a * th[k] for k in th}
    # theta_1' = -a' theta_11(b) + a theta_1'(b), with theta_11 = -theta_1
    T1p = a_prime * th[1] + a * jtheta(1, b, tau, 1, 0, opts)
    dT1p = a_prime * th_t[1] + a * jtheta(1, b, tau, 1, 1, opts)
    _guard(T[1], abs(a), "general_solution_tau")
    rhs = _tau_rhs(T, T1p, v, eta)
    L = {"dtheta1/dtau": a * th_t[1], "dtheta2/dtau": a * th_t[2], "dtheta3/dtau": a * th_t[3],
         "dtheta4/dtau": a * th_t[4], "dtheta1'/dtau": dT1p}
    out = [_eq(k, L[k], *rhs[k]) for k in rhs]
    for ch in chars:
        A, B = ch
        f = lambda al, be: a * theta_series((al, be), b, tau, 0, 0, opts).value
        lhs = a * theta_series(ch, b, tau, 0, 1, opts).value
        out.append(_tau_char_equation(ch, b, tau, opts, T, T1p, v, eta,
                                      values=(f(A, B), f(1 - A, 0), f(0, 1 - B)), lhs=lhs))
    return out


def _gs_last(m, tau, opts, rep, chars):
    """Modular family of the (alpha, beta) constant flow."""
    m = modular.UnimodularMap.coerce(m)
    t = Tau.coerce(tau).value
    f = m.c * t + m.d
    mt = Tau(m.apply(t))
    r = cmath.sqrt(f)
    val = lambda ch: theta_series(ch, 0, mt, 0, 0, opts).value / r
    der = lambda ch: (-m.c / 2 * theta_series(ch, 0, mt, 0, 0, opts).value / (r * f)
                      + theta_series(ch, 0, mt, 0, 1, opts).value / (r * f * f))
    e_m, de_m = eta_w(mt, opts), eta_w(mt, opts, dtau=1)
    eta = e_m / f**2 + PI * I * m.c / (2 * f)
    deta = -2 * m.c * e_m / f**3 + de_m / f**4 - PI * I * m.c**2 / (2 * f * f)
    return _flow_ab_equations(tau, opts, rep, chars, ev=(val, der, eta, deta))


def verify_general_solution(kind, params, x, tau, opts: EvalOptions | None = None, *,
                            chars=DEFAULT_CHARS, rep=(1, 0)) -> ResidualReport:
    """Substitute a candidate family into its system and report residuals.

    Parameters
    ----------
    kind : {"general_solution_x", "general_solution_tau", "vartheta_flow_ab"}
    params :
        (a, b, c) for the x-family, (a, a', b) for the tau-family (a' is the
        x-derivative of a, frozen at the test point), or a unimodular map
        (a, b, c, d) for the modular family of the constant flow.

    Examples
    --------
    >>> verify_general_solution("general_solution_x", (1, 0, 0), 0.2, 1.2j).max_rel < 1e-10
    True
    """
    kind = SystemKind(kind)
    tau = Tau.coerce(tau)
    grid = f"x={complex(x)}, tau={tau.value}, params={tuple(params)}"
    if kind is SystemKind.GENERAL_SOLUTION_X:
        eqs = _gs_x(params, x, tau, opts, chars)
    elif kind is SystemKind.GENERAL_SOLUTION_TAU:
        eqs = _gs_tau(params, tau, opts, chars)
    elif kind is SystemKind.VARTHETA_FLOW_AB:
        eqs = _gs_last(params, tau, opts, rep, FLOW_CHARS if chars is DEFAULT_CHARS else chars)
    else:
        raise DomainError(f"{kind.value} has no general-solution check")
    return ResidualReport(kind.value, tuple(eqs), grid)


__all__ = [
    "SystemKind", "EquationResidual", "ResidualReport", "VAR_FLOW", "residual_theta_system",
    "residual_weier_system", "residual_constant_flow", "residual_scalar_ode", "verify_general_solution",
    "compatibility", "flow_derivation", "vartheta_derivative_polys", "vartheta_tau_derivatives",
]
