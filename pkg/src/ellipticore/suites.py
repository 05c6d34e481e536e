"""Verification suites run by ``ellipticore verify``.

A suite evaluates a family of identities or differential systems over a grid
of points and returns one :class:`SuiteRow` per equation and point, each with
its own documented budget. Rows are produced in grid order, so reports are
reproducible byte for byte.

Suites
------
identities    theta quartic/quadratic and log-derivative identities, Jacobi's
              formula, multiplication, quarter values, genus 2, and the
              algebraic relations of the Weierstrass constants
xsystem       x-system of the four thetas, heat equation, x-family of solutions
tausystem     tau-systems of theta and sigma, the heat-type sigma equations
flows         constant flows for vartheta/eta and g2/g3/eta, compatibility
odes          third-order scalar ODEs for vartheta, its log-derivative and ln etahat
modular       transformation laws under 12 maps with 1 <= c <= 7, plus T and S
recurrences   integrality and symmetry of the tables, the sigma coefficients,
              and agreement of the series route with the q route
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from . import dynsys, recur, thetalg
from .errors import DomainError, ResonanceError
from .modular import (
    UnimodularMap,
    theta_multiplier,
    transform_eta_w,
    transform_etahat,
    transform_theta1,
    transform_theta_char,
)
from .qkernel import Characteristic, EvalOptions, Tau, eta_w, etahat, jtheta, theta, vartheta
from .qkernel import g2 as hurwitz_g2, g3 as hurwitz_g3
from .reduced import evaluate
from .weier import e_lambda, g2_theta, g3_theta, wp, wp_prime

PI = math.pi

SUITES = ("identities", "xsystem", "tausystem", "flows", "odes", "modular", "recurrences")

#: Budgets (normalized residuals) per check.
BUDGETS = {
    "quartic": 1e-11, "log_derivative": 1e-11, "jacobi_formula": 1e-12, "quartic_constants": 1e-13,
    "multiplication": 1e-9, "quarter_values": 1e-11, "genus2": 1e-10,
    "branch_cubic": 1e-10, "wp_cubic": 1e-10, "e_sum": 1e-12, "g_theta": 1e-11, "special_values": 1e-12,
    "system": 1e-9, "compatibility": 1e-11,
    "modular_law": 1e-10, "multiplier_order": 1e-12,
    "exact": 0.0, "dual_route": 1e-10,
}

STANDARD_X = (0.1, 0.25 + 0.1j, -0.15 + 0.4j)
STANDARD_TAU = (1j, 0.3 + 1.2j, -0.4 + 0.9j, 0.5 + 0.9j, 0.1 + 1.7j)

#: 5 x 5 grid inside the closed fundamental domain.
FUNDAMENTAL_GRID = tuple(complex(re, im) for re in (-0.5, -0.25, 0.0, 0.25, 0.5)
                         for im in (1.0, 1.25, 1.5, 2.0, 3.0))

#: Normalized maps with 1 <= c <= 7; T and S are added separately.
MODULAR_MAPS = (
    (1, -1, 1, 0), (2, 1, 1, 1), (1, 0, 2, 1), (1, -1, 2, -1), (2, 1, 3, 2), (1, 0, 3, 1),
    (3, 2, 4, 3), (1, 1, 4, 5), (3, 1, 5, 2), (1, 1, 6, 7), (2, 1, 7, 4), (2, -1, 7, -3),
)
MODULAR_POINTS = ((0.2 + 0.05j, 0.1 + 0.8j), (-0.3 + 0.1j, -0.3 + 1.1j))
MODULAR_CHARS = ((0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (-1, 2))

GENUS2_POINTS = (
    (0.3 + 1.1j, 0.2 + 0.9j, 0.1, 0.2),
    (1.2j, 1.5j, 0.25 + 0.1j, -0.3j),
    (-0.2 + 1.0j, 0.4 + 1.3j, 0.05 - 0.1j, 0.3),
    (0.5 + 0.9j, 1.1j, -0.2, 0.15 + 0.05j),
)

DUAL_ROUTE_FUNCTIONS = ("theta1", "theta2", "theta3", "theta4", "sigma", "sigma1", "sigma2", "sigma3")
DUAL_ROUTE_X = (0.1, 0.25j, 0.4 * cmath.exp(0.7j))
DUAL_ROUTE_TAU = (1j, 0.3 + 1.2j, -0.4 + 0.9j)


@dataclass(frozen=True)
class Grid:
    """Points at which point-wise suites are evaluated."""

    xs: tuple = STANDARD_X
    taus: tuple = STANDARD_TAU


@dataclass(frozen=True)
class SuiteRow:
    """One equation at one point. ``status`` is pass, fail or skip."""

    suite: str
    check: str
    label: str
    point: str
    residual: float | None
    budget: float
    status: str

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def as_dict(self) -> dict:
        return {"suite": self.suite, "check": self.check, "label": self.label, "point": self.point,
                "residual": self.residual, "budget": self.budget, "status": self.status}


def _row(suite, check, label, point, residual, budget=None):
    b = BUDGETS[check] if budget is None else budget
    r = float(residual)
    return SuiteRow(suite, check, label, point, r, b, "pass" if r <= b else "fail")


def _rel(lhs, *rhs) -> float:
    scale = max([abs(lhs)] + [abs(t) for t in rhs])
    return abs(lhs - sum(rhs)) / scale if scale > 0 else 0.0


def _pt(x=None, tau=None) -> str:
    parts = []
    if x is not None:
        parts.append(f"x={complex(x)}")
    if tau is not None:
        parts.append(f"tau={complex(tau)}")
    return ", ".join(parts)


def _report_rows(suite, check, report: dynsys.ResidualReport, point, budget=None):
    return [_row(suite, check, f"{report.system}:{e.label}", point, e.rel, budget) for e in report.per_equation]


def _weight_scales(G2, G3):
    """Magnitudes of weight 4 and 6 for the lattice: max(|g2|, |g3|^(2/3)) and its 3/2 power."""
    w4 = max(abs(G2), abs(G3) ** (2 / 3))
    return w4, w4**1.5


# suites -------------------------------------------------------------------------

def _identities(grid: Grid, opts):
    s = "identities"
    rows = []
    for tau in grid.taus:
        for x in grid.xs:
            p = _pt(x, tau)
            for res in (thetalg.check_quartic_identities(x, tau, opts),
                        thetalg.check_log_derivative_identities(x, tau, opts)):
                check = "quartic" if res.name == "quartic" else "log_derivative"
                rows += [_row(s, check, lab, p, r) for lab, r in res.details]
            for k in (1, 2, 3, 4):
                for n in (2, 3, 4, 5):
                    lab = f"theta{k}({n}x)"
                    try:
                        ch = Characteristic.classical(k)
                        got, size = thetalg.multiply_theta(ch, n, x, tau, opts, with_scale=True)
                        got *= ch.classical_sign
                    except ResonanceError:
                        rows.append(SuiteRow(s, "multiplication", lab, p, None, BUDGETS["multiplication"], "skip"))
                        continue
                    direct = jtheta(k, n * x, tau, opts=opts)
                    # the last recursion step can cancel, so measure on its largest term
                    scale = max(abs(direct), size)
                    rows.append(_row(s, "multiplication", lab, p, abs(got - direct) / scale))
            w, wd = wp(x, tau, opts), wp_prime(x, tau, opts)
            G2, G3 = hurwitz_g2(tau, opts), hurwitz_g3(tau, opts)
            rows.append(_row(s, "wp_cubic", "4 wp^3 - g2 wp - g3 = wp'^2", p, _rel(wd**2, 4 * w**3, -G2 * w, -G3)))
        p = _pt(tau=tau)
        t1p = jtheta(1, 0, tau, dx=1, opts=opts)
        rows.append(_row(s, "jacobi_formula", "theta1'(0) = 2 pi etahat^3", p,
                         abs(t1p - 2 * PI * etahat(tau, opts) ** 3) / abs(t1p)))
        v = {k: vartheta(k, tau, opts) for k in (2, 3, 4)}
        rows.append(_row(s, "quartic_constants", "vartheta3^4 = vartheta2^4 + vartheta4^4", p,
                         abs(v[3] ** 4 - v[2] ** 4 - v[4] ** 4) / abs(v[3] ** 4)))
        q = thetalg.quarter_period_values(tau, opts)
        for k in (1, 2, 3, 4):
            direct = jtheta(k, 0.25, tau, opts=opts)
            rows.append(_row(s, "quarter_values", f"theta{k}(1/4)", p, abs(q[k] - direct) / abs(direct)))
        G2, G3 = hurwitz_g2(tau, opts), hurwitz_g3(tau, opts)
        es = [e_lambda(lam, tau, opts) for lam in (1, 2, 3)]
        # g2 or g3 (and one e) vanish at symmetric points; scale by the lattice size instead
        w4, w6 = _weight_scales(G2, G3)
        for lam, e in zip((1, 2, 3), es):
            r = abs(4 * e**3 - G2 * e - G3) / max(abs(4 * e**3), abs(G2 * e), abs(G3), w6)
            rows.append(_row(s, "branch_cubic", f"4 e{lam}^3 - g2 e{lam} - g3 = 0", p, r))
        rows.append(_row(s, "e_sum", "e1 + e2 + e3 = 0", p, abs(sum(es)) / max(abs(e) for e in es)))
        for rep in ((1, 0), (0, 1), (1, 1)):
            rows.append(_row(s, "g_theta", f"g2[rep={rep}]", p, abs(g2_theta(rep, tau, opts) - G2) / w4))
            rows.append(_row(s, "g_theta", f"g3[rep={rep}]", p, abs(g3_theta(rep, tau, opts) - G3) / w6))
    i, rho = 1j, cmath.exp(1j * PI / 3)
    rows.append(_row(s, "special_values", "g3(i) = 0", _pt(tau=i),
                     abs(hurwitz_g3(i, opts)) / abs(hurwitz_g2(i, opts))))
    rows.append(_row(s, "special_values", "g2(exp(i pi/3)) = 0", _pt(tau=rho),
                     abs(hurwitz_g2(rho, opts)) / abs(hurwitz_g3(rho, opts))))
    for t, mu, z1, z2 in GENUS2_POINTS:
        r = thetalg.genus2_decomposition_residual(thetalg.Genus2Tau(t, mu), z1, z2, opts)
        rows.append(_row(s, "genus2", "Theta = theta-product combination",
                         f"tau={t}, mu={mu}, z=({complex(z1)}, {complex(z2)})", r))
    return rows


def _xsystem(grid: Grid, opts):
    s = "xsystem"
    rows = []
    for tau in grid.taus:
        for x in grid.xs:
            p = _pt(x, tau)
            for kind in ("theta_x", "theta_heat"):
                rows += _report_rows(s, "system", dynsys.residual_theta_system(kind, x, tau, opts), p)
            rep = dynsys.verify_general_solution("general_solution_x", (1.5 - 0.5j, 0.3, 0.2 + 0.1j), x, tau, opts)
            rows += _report_rows(s, "system", rep, p)
    return rows


def _tausystem(grid: Grid, opts):
    s = "tausystem"
    rows = []
    for tau in grid.taus:
        for x in grid.xs:
            p = _pt(x, tau)
            rows += _report_rows(s, "system", dynsys.residual_theta_system("theta_tau", x, tau, opts), p)
            for kind in ("weier_tau", "sigma_heat", "sigma_pde_s12"):
                rows += _report_rows(s, "system", dynsys.residual_weier_system(kind, x, tau, opts), p)
            for lam in (1, 2, 3):
                rep = dynsys.residual_weier_system("xi_epsilon", x, tau, opts, epsilon=1, lam=lam)
                rows += _report_rows(s, "system", rep, p)
        # the tau-family of solutions with a' = 0 (a constant in x)
        rep = dynsys.verify_general_solution("general_solution_tau", (1.5, 0.0, 0.3), 0, tau, opts)
        rows += _report_rows(s, "system", rep, _pt(tau=tau))
    return rows


def _flows(grid: Grid, opts):
    s = "flows"
    rows = []
    for tau in grid.taus:
        p = _pt(tau=tau)
        rows += _report_rows(s, "system", dynsys.residual_constant_flow("vartheta_flow", tau, opts), p)
        for rep in ((1, 0), (0, 1), (1, 1)):
            rows += _report_rows(s, "system", dynsys.residual_constant_flow("vartheta_flow_ab", tau, opts, rep=rep), p)
        rows += _report_rows(s, "system", dynsys.residual_constant_flow("g_flow", tau, opts), p)
        rows += _report_rows(s, "system", dynsys.verify_general_solution("vartheta_flow_ab", (2, 1, 1, 1), 0, tau, opts), p)
        rows += _report_rows(s, "compatibility", dynsys.compatibility(tau, opts), p)
    return rows


def _odes(grid: Grid, opts):
    s = "odes"
    rows = []
    for tau in grid.taus:
        p = _pt(tau=tau)
        for which in (2, 3, 4):
            for kind in ("jacobi_theta_ode", "logderiv_ode"):
                rows += _report_rows(s, "system", dynsys.residual_scalar_ode(kind, tau, which, opts), p)
        rows += _report_rows(s, "system", dynsys.residual_scalar_ode("lambda_ode", tau, opts=opts), p)
    return rows


def _modular(grid: Grid, opts):
    s = "modular"
    rows = []
    maps = [UnimodularMap(*m) for m in MODULAR_MAPS] + [UnimodularMap.T(), UnimodularMap.S()]
    for m in maps:
        tag = f"M={m.as_tuple()}"
        if m.c > 0:
            e8 = theta_multiplier(m) ** 8
            rows.append(_row(s, "multiplier_order", "eps_theta^8 = 1", tag, abs(e8 - 1)))
        for x, tau in MODULAR_POINTS:
            t = Tau(tau)
            f = m.factor(tau)
            mt = Tau(m.apply(tau))
            p = f"{tag}, {_pt(x, tau)}"
            got = transform_theta1(x, t, m, opts)
            rows.append(_row(s, "modular_law", "theta1", p, abs(got - jtheta(1, x / f, mt, opts=opts)) / abs(got)))
            got = transform_etahat(t, m, opts)
            rows.append(_row(s, "modular_law", "etahat", p, abs(got - etahat(mt, opts)) / abs(got)))
            got = transform_eta_w(t, m, opts)
            rows.append(_row(s, "modular_law", "eta", p, abs(got - eta_w(mt, opts)) / abs(got)))
            for ch in MODULAR_CHARS:
                new, got = transform_theta_char(ch, x, t, m, opts)
                direct = theta(new, x / f, mt, opts).value
                rows.append(_row(s, "modular_law", f"theta{ch}", p, abs(got - direct) / abs(got)))
    return rows


def _exact_row(s, label, ok, point=""):
    return SuiteRow(s, "exact", label, point, 0.0 if ok else 1.0, 0.0, "pass" if ok else "fail")


def _recurrences(grid: Grid, opts):
    s = "recurrences"
    rows = []
    for fam in ("A", "B0", "B1", "G", "G0", "G1"):
        t = recur.build_table(fam, 20)
        ok = all(isinstance(v, int) for v in t.entries.values())
        rows.append(_exact_row(s, f"{fam} entries are integers", ok, "m+n<=20"))
    G = recur.build_table("G", 16)
    rows.append(_exact_row(s, "G[m,n] = (-1)^(m+n) G[n,m]",
                           all(G[m, n] == (-1) ** (m + n) * G[n, m] for (m, n) in G.entries), "m+n<=16"))
    for alpha in (0, 1):
        T = recur.build_table(f"G{alpha}", 16)
        ok = all(T[n, m] == (-1) ** ((m + n) * (alpha + 1)) * T[m, n] for (m, n) in T.entries)
        rows.append(_exact_row(s, f"G{alpha}[n,m] = (-1)^((m+n)(alpha+1)) G{alpha}[m,n]", ok, "m+n<=16"))
    G2, G3 = recur.G2, recur.G3
    want = (1, 0, -G2 / 2, -6 * G3)
    for k, w in enumerate(want):
        rows.append(_exact_row(s, f"C_{k} from A", recur.sigma_coefficient_A(k) == w))
        rows.append(_exact_row(s, f"C_{k} from C", recur.sigma_coefficient_C(k) == w))
    rows.append(_exact_row(s, "Halphen C_k = Weierstrass grouping", all(
        recur.sigma_coefficient_A(k) == recur.sigma_coefficient_C(k) for k in range(13)), "k<=12"))
    for tau in DUAL_ROUTE_TAU:
        for x in DUAL_ROUTE_X:
            p = _pt(x, tau)
            for name in DUAL_ROUTE_FUNCTIONS:
                a = evaluate(name, x, tau, method="series", order=18, opts=opts).value
                b = evaluate(name, x, tau, method="q", opts=opts).value
                rows.append(_row(s, "dual_route", f"{name}: series vs q", p, abs(a - b) / abs(b)))
    return rows


_RUNNERS = {
    "identities": _identities, "xsystem": _xsystem, "tausystem": _tausystem, "flows": _flows,
    "odes": _odes, "modular": _modular, "recurrences": _recurrences,
}


def run_suite(name: str, grid: Grid | None = None, opts: EvalOptions | None = None) -> list[SuiteRow]:
    """Rows of one suite, or of every suite in order for ``name == "all"``.

    Examples
    --------
    >>> all(r.passed for r in run_suite("odes", Grid(taus=(1j,))))
    True
    """
    grid = grid or Grid()
    names = SUITES if name == "all" else (name,)
    rows = []
    for n in names:
        try:
            runner = _RUNNERS[n]
        except KeyError:
            raise DomainError(f"unknown suite {n!r}; expected one of {SUITES + ('all',)}") from None
        rows += runner(grid, opts)
    return rows


__all__ = ["SUITES", "BUDGETS", "STANDARD_X", "STANDARD_TAU", "FUNDAMENTAL_GRID", "MODULAR_MAPS",
           "Grid", "SuiteRow", "run_suite"]
