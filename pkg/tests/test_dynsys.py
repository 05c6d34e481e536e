import pytest

from ellipticore import dynsys
from ellipticore.dynsys import (
    ResidualReport,
    SystemKind,
    compatibility,
    residual_constant_flow,
    residual_scalar_ode,
    residual_theta_system,
    residual_weier_system,
    verify_general_solution,
)
from ellipticore.errors import DomainError, PoleError
from ellipticore.suites import STANDARD_TAU, STANDARD_X
from ellipticore.weier import e_lambda


def test_theta_x_system():
    r = residual_theta_system("theta_x", 0.3, 1.2j)
    labels = [e.label for e in r.per_equation]
    for name in ("dtheta1/dx", "dtheta2/dx", "dtheta3/dx", "dtheta4/dx", "dtheta1'/dx"):
        assert name in labels
    assert max(e.rel for e in r.per_equation if e.label in labels[:5]) <= 1e-10
    assert r.max_rel <= 1e-10


def test_theta_tau_system():
    assert residual_theta_system("theta_tau", 0.25, 0.2 + 1.3j).max_rel <= 1e-10


def test_heat_identity():
    assert residual_theta_system("theta_heat", 0.4, 1.1j).max_rel <= 1e-11


@pytest.mark.parametrize("tau", STANDARD_TAU)
@pytest.mark.parametrize("x", STANDARD_X)
def test_theta_systems_on_standard_grid(x, tau):
    for kind in ("theta_x", "theta_tau", "theta_heat"):
        assert residual_theta_system(kind, x, tau).max_rel <= 1e-9


def test_theta_system_guards_zero_of_theta1():
    with pytest.raises(PoleError):
        residual_theta_system("theta_x", 0, 1.2j)
    with pytest.raises(DomainError):
        residual_theta_system("g_flow", 0.1, 1.2j)
    with pytest.raises(ValueError):
        SystemKind("no_such_system")


def test_weierstrass_tau_system():
    r = residual_weier_system("weier_tau", 0.3 + 0.05j, 0.1 + 1.2j)
    assert r.max_rel <= 1e-9
    assert len(r.per_equation) >= 4


def test_sigma_heat():
    assert residual_weier_system("sigma_heat", 0.3, 1.2j).max_rel <= 1e-9


def test_s12_equations():
    r = residual_weier_system("sigma_pde_s12", 0.4, 1.1j, order=20)
    first = r.per_equation[0]
    assert first.rel <= 1e-10
    for e in r.per_equation:
        assert e.rel <= max(1e-10, e.tail_estimate / e.scale)


def test_xi_epsilon_equations():
    tau = 1.2j
    r0 = residual_weier_system("xi_epsilon", 0.3, tau, epsilon=0, e_value=e_lambda(2, tau))
    assert r0.max_rel <= 1e-9
    for lam in (1, 3):
        assert residual_weier_system("xi_epsilon", 0.3, tau, epsilon=0, lam=lam).max_rel <= 1e-9
    for lam in (1, 2, 3):
        assert residual_weier_system("xi_epsilon", 0.3, tau, epsilon=1, lam=lam).max_rel <= 1e-9
    with pytest.raises(DomainError):
        residual_weier_system("xi_epsilon", 0.3, tau, epsilon=3)


def test_vartheta_flow():
    r = residual_constant_flow("vartheta_flow", 1.2j)
    assert len(r.per_equation) == 4
    assert r.max_rel <= 1e-11


def test_g_flow():
    r = residual_constant_flow("g_flow", 0.3 + 1.4j)
    assert len(r.per_equation) == 3
    assert r.max_rel <= 1e-10


def test_flow_in_alpha_beta_form():
    tau = 0.2 + 1.1j
    a = residual_constant_flow("vartheta_flow_ab", tau, rep=(1, 0))
    b = residual_constant_flow("vartheta_flow_ab", tau, rep=(0, 1))
    assert a.max_rel <= 1e-11
    assert b.max_rel <= 1e-11
    assert residual_constant_flow("vartheta_flow_ab", tau, rep=(1, 1)).max_rel <= 1e-11
    with pytest.raises(DomainError):
        residual_constant_flow("vartheta_flow_ab", tau, rep=(2, 0))


@pytest.mark.parametrize("tau", STANDARD_TAU)
def test_flows_on_standard_grid(tau):
    for kind in ("vartheta_flow", "g_flow", "vartheta_flow_ab"):
        assert residual_constant_flow(kind, tau).max_rel <= 1e-9
    assert compatibility(tau).max_rel <= 1e-11


def test_scalar_odes():
    assert residual_scalar_ode("jacobi_theta_ode", 1.3j, which=3).max_rel <= 1e-9
    for k in (2, 3, 4):
        assert residual_scalar_ode("logderiv_ode", 1.1j, which=k).max_rel <= 1e-9
    assert residual_scalar_ode("lambda_ode", 0.2 + 1.2j).max_rel <= 1e-9
    with pytest.raises(DomainError):
        residual_scalar_ode("jacobi_theta_ode", 1.3j, which=1)


@pytest.mark.parametrize("tau", STANDARD_TAU)
def test_scalar_odes_on_standard_grid(tau):
    for k in (2, 3, 4):
        assert residual_scalar_ode("jacobi_theta_ode", tau, which=k).max_rel <= 1e-9
        assert residual_scalar_ode("logderiv_ode", tau, which=k).max_rel <= 1e-9
    assert residual_scalar_ode("lambda_ode", tau).max_rel <= 1e-9


def test_general_solution_x_family():
    trivial = verify_general_solution("general_solution_x", (1, 0, 0), 0.2, 1.2j)
    direct = residual_theta_system("theta_x", 0.2, 1.2j)
    assert trivial.max_rel <= 1e-10
    assert abs(trivial.max_rel - direct.max_rel) < 1e-12
    assert verify_general_solution("general_solution_x", (2, 0.1, 0.3 + 0.2j), 0.2, 1.2j).max_rel <= 1e-9


def test_general_solution_tau_family():
    # constant prefactor: the family solves the tau-system
    assert verify_general_solution("general_solution_tau", (1.5, 0.0, 0.3), 0, 1.2j).max_rel <= 1e-9
    # a nonzero frozen x-derivative of the prefactor is not a solution; the residual is O(1)
    r = verify_general_solution("general_solution_tau", (1.5, 0.2, 0.3), 0, 1.2j)
    assert r.max_rel > 1e-3


def test_modular_family_of_constant_flow():
    assert verify_general_solution("vartheta_flow_ab", (1, 1, 0, 1), 0, 1.2j).max_rel <= 1e-10
    assert verify_general_solution("vartheta_flow_ab", (2, 1, 1, 1), 0, 0.1 + 1.2j).max_rel <= 1e-10
    with pytest.raises(DomainError):
        verify_general_solution("g_flow", (1, 0, 0), 0.2, 1.2j)


def test_report_bookkeeping():
    r = residual_constant_flow("g_flow", 1.1j)
    assert r.max_rel == max(e.rel for e in r.per_equation)
    assert r.failing(0.0) or r.max_rel == 0
    assert r.failing(1.0) == []
    merged = r.merged(residual_constant_flow("vartheta_flow", 1.1j))
    assert len(merged.per_equation) == 7
    with pytest.raises(ArithmeticError):
        ResidualReport("x", (dynsys.EquationResidual("bad", float("nan"), 1.0),))


def test_sign_flip_is_detected(monkeypatch):
    monkeypatch.setitem(dynsys.VAR_FLOW[2], 3, -1)
    r = residual_constant_flow("vartheta_flow", 1.2j)
    bad = [e.label for e in r.failing(1e-9)]
    assert "dvartheta2/dtau" in bad
    assert compatibility(1.2j).max_rel > 1e-9
