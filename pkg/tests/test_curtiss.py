import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kinclosure import curtiss as cu
from kinclosure.errors import InvalidArgumentError
from kinclosure.quadrature import GasConstants


def scaled(v, rho, theta, c):
    # heat flux and couple stress scale like rho (R_s theta)^(3/2)
    return np.linalg.norm(v) / (rho * (c.R_s * theta) ** 1.5)


@pytest.mark.parametrize("lam", [0.0, 0.3, 2.0])
def test_zeroth_order_isotropy(rng, lam):
    c = GasConstants(m=1.5, k_B=0.8)
    for _ in range(3):
        rho, theta = rng.uniform(0.5, 2), rng.uniform(0.5, 2)
        n = rng.standard_normal(3)
        n /= np.linalg.norm(n)
        macro = cu.CurtissMacro(rho, rng.standard_normal(3), theta, cu.uniaxial_inertia(lam, n),
                                gamma=rng.standard_normal(3))
        F = cu.curtiss_zeroth_fluxes(macro, c)
        p = rho * c.R_s * theta
        assert np.max(np.abs(F.T + p * np.eye(3))) < 1e-10 * p
        assert scaled(F.Q, rho, theta, c) < 1e-8
        assert scaled(F.M, rho, theta, c) < 1e-8


def test_full_rank_inertia(rng):
    c = GasConstants()
    G = rng.standard_normal((3, 3))
    macro = cu.CurtissMacro(1.0, np.zeros(3), 1.3, G @ G.T + np.eye(3))
    F = cu.curtiss_zeroth_fluxes(macro, c)
    np.testing.assert_allclose(F.T, -1.3 * np.eye(3), atol=1e-12)
    assert np.linalg.norm(F.M) < 1e-12


def test_macro_validation():
    with pytest.raises(InvalidArgumentError):
        cu.CurtissMacro(1.0, np.zeros(3), 1.0, np.array([[1, 1, 0], [0, 1, 0], [0, 0, 1.0]]))
    with pytest.raises(InvalidArgumentError):
        cu.CurtissMacro(1.0, np.zeros(3), 1.0, -np.eye(3))
    with pytest.raises(InvalidArgumentError):
        cu.CurtissMacro(0.0, np.zeros(3), 1.0, np.eye(3))


def test_director_validation():
    with pytest.raises(InvalidArgumentError):
        cu.NematicField(np.array([1.0, 1.0, 0.0]), np.zeros((3, 3)))
    with pytest.raises(InvalidArgumentError):
        cu.NematicField(np.array([1.0, 0.0, 0.0]), np.eye(3))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), lam=st.floats(0, 3))
def test_energy_gradient_matches_finite_differences(seed, lam):
    rng = np.random.default_rng(seed)
    c = GasConstants()
    field = cu.NematicField.random(rng, lam)
    de = cu.energy_gradient(1.2, 0.8, field, c)
    fd = cu.energy_gradient_fd(1.2, 0.8, field, c)
    np.testing.assert_allclose(de, fd, atol=1e-8 * max(1.0, np.abs(de).max()))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_ericksen_variational_residual(seed):
    rng = np.random.default_rng(seed)
    c = GasConstants()
    field = cu.NematicField.random(rng, rng.uniform(0.1, 3))
    T, M = cu.ericksen_fluxes(field, 1.1, 0.9, c)
    r = cu.variational_residual(T, M, field, 1.1, 0.9, rng.standard_normal((3, 3)),
                                rng.standard_normal((3, 3)), c)
    assert abs(r) < 1e-12
    # a wrong stress shows up in the residual
    r_bad = cu.variational_residual(T + np.eye(3), M, field, 1.1, 0.9, np.eye(3), np.zeros((3, 3)), c)
    assert abs(r_bad) == pytest.approx(3.0)


def test_director_cross_is_cross_product(rng):
    n, S = rng.standard_normal(3), rng.standard_normal((3, 3))
    X = cu.director_cross(n, S)
    for j in range(3):
        np.testing.assert_allclose(X[:, j], np.cross(n, S[j]), atol=1e-15)


def test_leslie_ratio(rng):
    c = GasConstants()
    field = cu.NematicField.random(rng, 1.7)
    cmp = cu.leslie_stress_comparison(field, 1.0, 1.0, c)
    assert cmp.ratio == pytest.approx(2.0, abs=1e-12)
    assert not cmp.degenerate and "2" in cmp.flag
    flat = cu.leslie_stress_comparison(field.with_grad(np.zeros((3, 3))), 1.0, 1.0, c)
    assert flat.degenerate and flat.flag == "degenerate"
