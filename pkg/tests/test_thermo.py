import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kinclosure.errors import DomainError
from kinclosure.quadrature import GasConstants
from kinclosure.thermo import (
    AffinitySet,
    FluxSet,
    ThermoPoint,
    clausius_duhem_production,
    counterexample_fluxes,
    deviator,
    equilibrium_entropy,
    internal_energy_from_entropy,
    mechanical_pressure,
    pressure,
    temperature,
)

C = GasConstants()


def test_reference_entropy():
    assert equilibrium_entropy(1.0, 1.5, C) == pytest.approx(4.2568156, abs=1e-7)
    assert equilibrium_entropy(1.0, 1.5, C) == pytest.approx(1.5 * (1 + math.log(2 * math.pi)), rel=1e-15)


def test_entropy_derivative_is_inverse_temperature():
    rho, e, h = 1.3, 2.1, 1e-6
    d = (equilibrium_entropy(rho, e + h, C) - equilibrium_entropy(rho, e - h, C)) / (2 * h)
    assert d == pytest.approx(1.0 / temperature(e, C), rel=1e-6)


def test_energy_derivatives_give_temperature_and_pressure():
    rho, e, h = 0.8, 1.7, 1e-6
    eta = equilibrium_entropy(rho, e, C)
    de_deta = (internal_energy_from_entropy(rho, eta + h, C)
               - internal_energy_from_entropy(rho, eta - h, C)) / (2 * h)
    assert de_deta == pytest.approx(temperature(e, C), rel=1e-6)
    de_drho = (internal_energy_from_entropy(rho + h, eta, C)
               - internal_energy_from_entropy(rho - h, eta, C)) / (2 * h)
    assert rho ** 2 * de_drho == pytest.approx(2.0 / 3.0 * rho * e, rel=1e-6)


def test_temperature_and_pressure_values():
    assert temperature(1.5, C) == 1.0
    assert pressure(2.0, 3.0) == 4.0


def test_non_unit_gas_constants():
    c = GasConstants(m=2.0, k_B=3.0)
    assert c.R_s == 1.5
    assert temperature(1.5, c) == pytest.approx(2.0 * 1.5 / (3.0 * 1.5))
    eta = equilibrium_entropy(1.2, 0.9, c)
    assert internal_energy_from_entropy(1.2, eta, c) == pytest.approx(0.9, rel=1e-13)


@pytest.mark.parametrize("args", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0), (1.0, -2.0)])
def test_domain_errors(args):
    with pytest.raises(DomainError):
        equilibrium_entropy(*args, C)


@settings(max_examples=50, deadline=None)
@given(rho=st.floats(1e-3, 1e3), e=st.floats(1e-3, 1e3), m=st.floats(0.1, 10.0),
       k_B=st.floats(0.1, 10.0))
def test_entropy_round_trip(rho, e, m, k_B):
    c = GasConstants(m=m, k_B=k_B)
    eta = equilibrium_entropy(rho, e, c)
    assert internal_energy_from_entropy(rho, eta, c) == pytest.approx(e, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(rho=st.floats(1e-3, 1e3), e=st.floats(1e-3, 1e3))
def test_ideal_gas_law(rho, e):
    tp = ThermoPoint.from_rho_e(rho, e, C)
    assert tp.p == pytest.approx(rho * C.R_s * tp.theta, rel=1e-14)


def test_mechanical_pressure():
    assert mechanical_pressure(-np.eye(3)) == -1.0
    Dd = deviator(np.array([[1.0, 2.0, 0.0], [0.5, -1.0, 0.3], [0.0, 0.1, 3.0]]))
    assert mechanical_pressure(-2.0 * np.eye(3) + 0.7 * Dd) == pytest.approx(-2.0, abs=1e-15)


def test_counterexample_changes_mechanical_pressure():
    theta, p, alpha = 1.3, 1.0, 0.4
    gt = np.array([0.5, -1.0, 2.0])
    A = AffinitySet.from_gradients(np.diag([1.0, 2.0, 3.0]), gt, theta)
    F = counterexample_fluxes(A, p, theta, alpha)
    assert mechanical_pressure(F.T) + p == pytest.approx(-alpha / 3.0 * gt @ gt, rel=1e-14)


def test_production_of_euler_and_nsf_fluxes():
    A = AffinitySet.from_deviator(np.diag([1.0, -1.0, 0.0]), np.array([-1.0, 0.0, 0.0]))
    assert clausius_duhem_production(FluxSet(-np.eye(3), np.zeros(3)), A, 1.0, 1.0) == 0.0
    # nu = kappa = theta = 1, Dd:Dd = 2, |grad theta|^2 = 1
    F = FluxSet(-np.eye(3) + 2.0 * A.Dd, -A.grad_theta(1.0))
    assert clausius_duhem_production(F, A, 1.0, 1.0) == pytest.approx(5.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), alpha=st.floats(-5, 5))
def test_counterexample_produces_no_entropy(seed, alpha):
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.2, 3.0)
    A = AffinitySet.from_gradients(rng.standard_normal((3, 3)), rng.standard_normal(3), theta)
    F = counterexample_fluxes(A, 1.0, theta, alpha)
    gt = A.grad_theta(theta)
    ref = max(1.0, abs(alpha)) * (gt @ gt) * np.linalg.norm(A.D_full) / theta
    assert abs(clausius_duhem_production(F, A, 1.0, theta)) <= 1e-13 * ref
