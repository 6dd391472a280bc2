import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from kinclosure.chapman_enskog import maxwellian_grid
from kinclosure.errors import (
    DegenerateDistributionError,
    InvalidArgumentError,
    InvalidDistributionError,
)
from kinclosure.quadrature import (
    DistributionGrid,
    GasConstants,
    MacroState,
    build_grid,
    conserved_moments,
    default_grid,
    entropy_density,
    entropy_flux,
    heat_flux,
    macro_state,
    stress_tensor,
)


def maxwellian(rho, u, e, c=GasConstants()):
    macro = MacroState(rho, u, e)
    return maxwellian_grid(macro, c, default_grid(macro)), macro


def test_uniform_three_point_weights():
    g = build_grid(np.zeros(3), 8.0, 3, mode="uniform")
    np.testing.assert_array_equal(g.nodes[0], [-8.0, 0.0, 8.0])
    np.testing.assert_array_equal(g.weights[0], [4.0, 8.0, 4.0])
    assert g.weights[0].sum() == 16.0


def test_hermite_two_point_integrates_gaussian_exactly():
    g = build_grid(np.zeros(3), 8.0, 2, mode="hermite", scale=1.0)
    x = g.nodes[0]
    val = float(g.weights[0] @ (np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)))
    assert val == pytest.approx(1.0, abs=1e-15)


def test_default_grid_recovers_density():
    f, _ = maxwellian(1.0, np.zeros(3), 1.5)
    rho, _, _ = conserved_moments(f, GasConstants())
    assert abs(rho - 1.0) < 1e-10


@pytest.mark.parametrize("kwargs", [dict(half_width=0.0, n_per_axis=4),
                                    dict(half_width=-1.0, n_per_axis=4),
                                    dict(half_width=1.0, n_per_axis=1),
                                    dict(half_width=1.0, n_per_axis=2.5)])
def test_build_grid_rejects_bad_arguments(kwargs):
    with pytest.raises(InvalidArgumentError):
        build_grid(np.zeros(3), **kwargs)


def test_build_grid_rejects_unknown_mode():
    with pytest.raises(InvalidArgumentError):
        build_grid(np.zeros(3), 1.0, 4, mode="chebyshev")


def test_moments_of_standard_maxwellian(c):
    f, _ = maxwellian(1.0, np.zeros(3), 1.5)
    rho, mom, energy = conserved_moments(f, c)
    assert rho == pytest.approx(1.0, rel=1e-8)
    assert np.abs(mom).max() < 1e-12
    assert energy == pytest.approx(1.5, rel=1e-8)


def test_moments_of_drifting_maxwellian(c):
    f, _ = maxwellian(2.0, np.array([1.0, 0.0, 0.0]), 1.5)
    rho, mom, energy = conserved_moments(f, c)
    np.testing.assert_allclose(mom, [2.0, 0.0, 0.0], atol=1e-10)
    assert energy == pytest.approx(4.0, rel=1e-10)


def test_zero_distribution_is_degenerate(c):
    g = build_grid(np.zeros(3), 4.0, 6)
    with pytest.raises(DegenerateDistributionError):
        conserved_moments(DistributionGrid(np.zeros(g.shape), g), c)


def test_distribution_shape_checked():
    g = build_grid(np.zeros(3), 4.0, 6)
    with pytest.raises(InvalidArgumentError):
        DistributionGrid(np.zeros((5, 6, 6)), g)


def test_distribution_values_read_only():
    g = build_grid(np.zeros(3), 4.0, 4)
    f = DistributionGrid(np.ones(g.shape), g)
    with pytest.raises(ValueError):
        f.values[0, 0, 0] = 2.0


def test_stress_of_maxwellians(c):
    f, m = maxwellian(1.0, np.zeros(3), 1.5)
    np.testing.assert_allclose(stress_tensor(f, m.u, c), -np.eye(3), atol=1e-10)
    f, m = maxwellian(3.0, np.array([5.0, 5.0, 5.0]), 3.0)
    np.testing.assert_allclose(stress_tensor(f, m.u, c), -6.0 * np.eye(3), atol=1e-9)


def test_heat_and_entropy_flux_vanish_for_maxwellian(c):
    f, m = maxwellian(1.3, np.array([0.3, -0.2, 0.5]), 2.0)
    assert np.linalg.norm(heat_flux(f, m.u, c)) < 1e-12
    assert np.linalg.norm(entropy_flux(f, m.u, c)) < 1e-12


def test_even_distribution_has_no_heat_flux(c, rng):
    g = build_grid(np.zeros(3), 5.0, 12)
    half = rng.uniform(0.5, 1.5, g.shape)
    vals = half + half[::-1, ::-1, ::-1]         # even in v on a symmetric grid
    f = DistributionGrid(vals, g)
    v = g.velocities
    scale = g.integrate(vals * np.linalg.norm(v, axis=-1) ** 3)
    assert np.linalg.norm(heat_flux(f, np.zeros(3), c)) < 1e-14 * scale


def test_entropy_density_matches_gaussian_differential_entropy(c):
    # -int f log f for f = n g equals n H(g) - n log n
    for rho, e in [(1.0, 1.5), (2.0, 1.5), (0.7, 2.4)]:
        f, _ = maxwellian(rho, np.zeros(3), e)
        sigma2 = 2.0 * e / 3.0
        h = stats.multivariate_normal(np.zeros(3), sigma2 * np.eye(3)).entropy()
        expected = rho * h - rho * math.log(rho)
        assert entropy_density(f, c) == pytest.approx(expected, rel=1e-10)
    f, _ = maxwellian(1.0, np.zeros(3), 1.5)
    assert entropy_density(f, c) == pytest.approx(4.2568156, abs=1e-7)


def test_negative_distribution_rejected_by_entropy(c):
    g = build_grid(np.zeros(3), 4.0, 4)
    vals = np.ones(g.shape)
    vals[0, 0, 0] = -1e-3
    with pytest.raises(InvalidDistributionError):
        entropy_density(DistributionGrid(vals, g), c)


def test_macro_state_round_trip(c):
    f, m = maxwellian(1.7, np.array([0.1, 0.2, -0.3]), 0.9)
    got = macro_state(f, c)
    assert got.rho == pytest.approx(m.rho, rel=1e-10)
    np.testing.assert_allclose(got.u, m.u, atol=1e-10)
    assert got.e == pytest.approx(m.e, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(rho=st.floats(0.2, 5.0), e=st.floats(0.2, 5.0),
       u=st.lists(st.floats(-2.0, 2.0), min_size=3, max_size=3))
def test_stokes_identity_on_maxwellians(rho, e, u):
    c = GasConstants()
    f, m = maxwellian(rho, np.array(u), e)
    T = stress_tensor(f, m.u, c)
    assert -np.trace(T) / 3.0 == pytest.approx(2.0 / 3.0 * rho * e, rel=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_stokes_identity_on_random_distributions(seed):
    c = GasConstants()
    rng = np.random.default_rng(seed)
    g = build_grid(np.zeros(3), 5.0, 10)
    f = DistributionGrid(rng.uniform(0.0, 1.0, g.shape), g)
    m = macro_state(f, c)
    T = stress_tensor(f, m.u, c)
    assert -np.trace(T) / 3.0 == pytest.approx(2.0 / 3.0 * m.rho * m.e, rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(scale=st.floats(0.3, 3.0), k=st.integers(0, 10))
def test_hermite_grid_exact_for_gaussian_weighted_polynomials(scale, k):
    # int x^k exp(-x^2/(2 s^2)) dx is exact for k <= 2n - 1
    g = build_grid(np.zeros(3), 8.0 * scale, 8, mode="hermite")
    x, w = g.nodes[0], g.weights[0]
    integrand = x ** k * np.exp(-0.5 * x * x / scale ** 2)
    got = float(w @ integrand)
    size = float(w @ np.abs(integrand))
    expected = 0.0 if k % 2 else math.sqrt(2 * math.pi) * scale ** (k + 1) * math.prod(range(k - 1, 0, -2))
    assert abs(got - expected) <= 1e-13 * size


def test_entropy_density_matches_equilibrium_entropy_for_general_constants():
    from kinclosure.thermo import equilibrium_entropy
    c = GasConstants(m=2.0, k_B=3.0)
    macro = MacroState(1.4, np.array([0.2, 0.0, -0.1]), 0.8)
    f = maxwellian_grid(macro, c, default_grid(macro))
    assert entropy_density(f, c) == pytest.approx(1.4 * equilibrium_entropy(1.4, 0.8, c), rel=1e-10)
