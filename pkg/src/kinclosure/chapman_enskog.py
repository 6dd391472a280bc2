"""Local Maxwellian, its first-order Chapman-Enskog correction, and the
entropy production and transport coefficients that follow from them.

All distributions are number densities: ``int f dv = rho / m``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, NumericalConsistencyError
from .quadrature import (
    ENTROPY_FLOOR,
    DistributionGrid,
    GasConstants,
    MacroState,
    VelocityGrid,
    conserved_moments,
    default_grid,
    entropy_density,
    entropy_flux,
    heat_flux,
    macro_state,
    stress_tensor,
)
from .thermo import AffinitySet, FluxSet, deviator, pressure, sym, temperature


def _log_maxwellian(macro: MacroState, c: GasConstants, v) -> np.ndarray:
    w = np.asarray(v, dtype=float) - macro.u
    w2 = np.einsum("...i,...i->...", w, w)
    gamma = math.log(macro.rho / c.m) - 1.5 * math.log(4.0 * math.pi * macro.e / 3.0)
    return gamma - w2 / (4.0 / 3.0 * macro.e)


def eval_maxwellian(macro: MacroState, c: GasConstants, v) -> np.ndarray:
    """Local Maxwellian at velocities ``v`` (shape ``(..., 3)``)."""
    return np.exp(_log_maxwellian(macro, c, v))


def maxwellian_grid(macro: MacroState, c: GasConstants, grid: VelocityGrid) -> DistributionGrid:
    return DistributionGrid(eval_maxwellian(macro, c, grid.velocities), grid)


@dataclass(frozen=True)
class GradientState:
    """Velocity gradient (symmetric part) and internal-energy gradient."""

    D_full: np.ndarray
    grad_e: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "D_full", sym(self.D_full))
        object.__setattr__(self, "grad_e", np.asarray(self.grad_e, dtype=float).reshape(3))

    @property
    def Dd(self) -> np.ndarray:
        return deviator(self.D_full)

    def grad_theta(self, c: GasConstants) -> np.ndarray:
        return 2.0 / (3.0 * c.R_s) * self.grad_e

    @classmethod
    def from_grad_theta(cls, D_full, grad_theta, c: GasConstants) -> "GradientState":
        return cls(D_full, 1.5 * c.R_s * np.asarray(grad_theta, dtype=float))

    def scaled(self, s) -> "GradientState":
        return GradientState(s * self.D_full, s * self.grad_e)


@dataclass(frozen=True)
class CEState:
    macro: MacroState
    grads: GradientState
    tau_tilde: float
    Kn: float

    def __post_init__(self):
        if not (self.tau_tilde > 0 and self.Kn >= 0):
            raise InvalidArgumentError("need tau_tilde > 0 and Kn >= 0")

    @property
    def tau(self) -> float:
        return self.Kn * self.tau_tilde

    def with_kn(self, Kn) -> "CEState":
        return CEState(self.macro, self.grads, self.tau_tilde, Kn)

    def theta(self, c: GasConstants) -> float:
        return temperature(self.macro.e, c)

    def pressure(self) -> float:
        return pressure(self.macro.rho, self.macro.e)

    def affinities(self, c: GasConstants) -> AffinitySet:
        return AffinitySet.from_gradients(self.grads.D_full, self.grads.grad_theta(c), self.theta(c))


@dataclass(frozen=True)
class TransportCoefficients:
    nu: float
    kappa: float


def transport_coefficients(tau, p, c: GasConstants) -> TransportCoefficients:
    """BGK viscosity ``tau p`` and conductivity ``5/2 R_s tau p``."""
    if tau < 0 or p < 0:
        raise InvalidArgumentError("tau and p must be non-negative")
    return TransportCoefficients(tau * p, 2.5 * c.R_s * tau * p)


def _f1_ratio(state: CEState, c: GasConstants, v) -> np.ndarray:
    """``f1 / f0`` at velocities ``v``; a cubic polynomial in the peculiar velocity."""
    e = state.macro.e
    w = np.asarray(v, dtype=float) - state.macro.u
    w2 = np.einsum("...i,...i->...", w, w)
    Dd = state.grads.Dd
    shear = 1.5 / e * (np.einsum("...i,ij,...j->...", w, Dd, w) - w2 / 3.0 * np.trace(Dd))
    heat = (0.75 * w2 / e - 2.5) * (w @ state.grads.grad_e) / e
    return -state.tau_tilde * (shear + heat)


def eval_f1(state: CEState, c: GasConstants, v) -> np.ndarray:
    return eval_maxwellian(state.macro, c, v) * _f1_ratio(state, c, v)


def f1_grid(state: CEState, c: GasConstants, grid: VelocityGrid) -> DistributionGrid:
    return DistributionGrid(eval_f1(state, c, grid.velocities), grid)


def ce_distribution(state: CEState, c: GasConstants, grid: VelocityGrid) -> DistributionGrid:
    """First-order truncation ``f0 + Kn f1``; may be signed for large gradients."""
    v = grid.velocities
    f0 = eval_maxwellian(state.macro, c, v)
    return DistributionGrid(f0 * (1.0 + state.Kn * _f1_ratio(state, c, v)), grid)


def max_relative_correction(state: CEState, c: GasConstants, grid: VelocityGrid) -> float:
    """``max |Kn f1 / f0|`` over the grid nodes."""
    return state.Kn * float(np.abs(_f1_ratio(state, c, grid.velocities)).max())


@dataclass(frozen=True)
class SolvabilityReport:
    residuals: np.ndarray      # int m psi f1 for psi = 1, v (3), |v|^2
    w_residuals: np.ndarray    # int w f1 (3), int |w|^2 f1
    scales: np.ndarray
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.all(np.abs(self.residuals) <= self.tolerance * self.scales))


def check_solvability(state: CEState, grid: VelocityGrid, c: GasConstants,
                      tol=1e-8) -> SolvabilityReport:
    f1 = eval_f1(state, c, grid.velocities)
    v = grid.velocities
    w = v - state.macro.u
    psi = np.concatenate([np.ones(grid.shape)[..., None], v,
                          np.einsum("...i,...i->...", v, v)[..., None]], axis=-1)
    residuals = c.m * grid.integrate(f1[..., None] * psi)
    scales = c.m * grid.integrate(np.abs(f1)[..., None] * np.abs(psi))
    w_psi = np.concatenate([w, np.einsum("...i,...i->...", w, w)[..., None]], axis=-1)
    w_residuals = c.m * grid.integrate(f1[..., None] * w_psi)
    return SolvabilityReport(residuals, w_residuals, scales, tol)


@dataclass(frozen=True)
class ExpansionReport:
    d_rho: float
    d_momentum: np.ndarray
    d_energy: float
    d_entropy: float
    scales: tuple
    tolerance: float

    @property
    def passed(self) -> bool:
        rho_s, mom_s, en_s = self.scales
        return bool(abs(self.d_rho) <= self.tolerance * rho_s
                    and np.all(np.abs(self.d_momentum) <= self.tolerance * mom_s)
                    and abs(self.d_energy) <= self.tolerance * en_s)


def expansion_independence_report(state: CEState, grid: VelocityGrid, c: GasConstants,
                                  tol=1e-8) -> ExpansionReport:
    """Differences of conserved moments and entropy between ``f0`` and ``f0 + Kn f1``."""
    f0 = maxwellian_grid(state.macro, c, grid)
    f = ce_distribution(state, c, grid)
    r0, m0, E0 = conserved_moments(f0, c)
    r1, m1, E1 = conserved_moments(f, c)
    scales = (r0, r0 * (state.macro.thermal_std() + float(np.linalg.norm(state.macro.u))), E0)
    d_entropy = entropy_density(f, c) - entropy_density(f0, c)
    return ExpansionReport(r1 - r0, m1 - m0, E1 - E0, d_entropy, scales, tol)


def first_order_fluxes(state: CEState, grid: VelocityGrid, c: GasConstants) -> FluxSet:
    """Stress and heat flux of ``f0 + Kn f1`` by quadrature."""
    f = ce_distribution(state, c, grid)
    return FluxSet(stress_tensor(f, state.macro.u, c), heat_flux(f, state.macro.u, c))


def nsf_fluxes(state: CEState, c: GasConstants) -> FluxSet:
    """Closed-form Navier-Stokes-Fourier fluxes ``-pI + 2 nu Dd``, ``-kappa grad(theta)``."""
    p = state.pressure()
    tc = transport_coefficients(state.tau, p, c)
    return FluxSet(-p * np.eye(3) + 2.0 * tc.nu * state.grads.Dd,
                   -tc.kappa * state.grads.grad_theta(c))


def entropy_production_quadrature(state: CEState, grid: VelocityGrid, c: GasConstants) -> float:
    """``(Kn^2 / tau) int k_B f1^2 / f0 dv``, evaluated as ``tau k_B int f0 (f1/(f0 tau~))^2``."""
    if state.Kn == 0.0:
        return 0.0
    v = grid.velocities
    f0 = eval_maxwellian(state.macro, c, v)
    ratio = _f1_ratio(state, c, v)
    return state.Kn ** 2 / state.tau * c.k_B * float(grid.integrate(f0 * ratio * ratio))


def entropy_production_closed_form(state: CEState, c: GasConstants) -> float:
    theta = state.theta(c)
    tc = transport_coefficients(state.tau, state.pressure(), c)
    Dd = state.grads.Dd
    gt = state.grads.grad_theta(c)
    theta_xi = 2.0 * tc.nu * float(np.tensordot(Dd, Dd)) + tc.kappa * float(gt @ gt) / theta
    return theta_xi / theta


def entropy_production_forms(f: DistributionGrid, tau, c: GasConstants,
                             macro: MacroState | None = None):
    """Both integral forms of the BGK entropy production.

    Returns ``(xi_log_f, xi_relative, residual)`` where ``xi_log_f`` is
    ``(1/tau) int k_B (f - f0) log f``, ``xi_relative`` is
    ``(1/tau) int k_B (f - f0)(log f - log f0)`` and ``residual`` is the
    integral ``(1/tau) int k_B (f0 - f) log f0`` that separates them.
    """
    if not tau > 0:
        raise InvalidArgumentError("tau must be positive")
    if macro is None:
        macro = macro_state(f, c)
    g = f.grid
    log_f0 = _log_maxwellian(macro, c, g.velocities)
    f0 = np.exp(log_f0)
    vals = f.values
    if np.any(vals < 0):
        raise NumericalConsistencyError("BGK entropy production needs a non-negative distribution")
    log_f = np.log(np.maximum(vals, ENTROPY_FLOOR))
    k = c.k_B / tau
    xi_log_f = k * float(g.integrate((vals - f0) * log_f))
    xi_relative = k * float(g.integrate((vals - f0) * (log_f - log_f0)))
    residual = k * float(g.integrate((f0 - vals) * log_f0))
    return xi_log_f, xi_relative, residual


def bgk_entropy_production(f: DistributionGrid, tau, c: GasConstants,
                           macro: MacroState | None = None, tol=1e-10) -> float:
    """BGK entropy production of ``f`` relaxing toward the Maxwellian of ``macro``.

    ``macro`` defaults to the moments of ``f`` itself, which is what makes
    the two integral forms coincide.
    """
    xi, xi_rel, _ = entropy_production_forms(f, tau, c, macro)
    scale = abs(xi_rel) + abs(xi)
    if xi < -tol * max(scale, 1.0) or xi_rel < -tol * max(scale, 1.0):
        raise NumericalConsistencyError(f"negative entropy production {xi:g}")
    return xi


def entropy_flux_defect(state: CEState, grid: VelocityGrid, c: GasConstants) -> np.ndarray:
    """``Phi - Q / theta`` for the first-order truncation."""
    f = ce_distribution(state, c, grid)
    u = state.macro.u
    return entropy_flux(f, u, c) - heat_flux(f, u, c) / state.theta(c)


def random_gradients(rng: np.random.Generator, c: GasConstants) -> GradientState:
    """Velocity gradient and temperature gradient entries uniform in [-1, 1]."""
    D = rng.uniform(-1.0, 1.0, (3, 3))
    return GradientState.from_grad_theta(D, rng.uniform(-1.0, 1.0, 3), c)


def random_near_equilibrium_state(rng: np.random.Generator, c: GasConstants,
                                  max_correction=0.1, tau_tilde=1.0):
    """Random state with ``Kn`` set so that ``max |Kn f1/f0| = max_correction``.

    Returns ``(state, grid)`` with the default Hermite grid of the state.
    """
    macro = MacroState(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0, 3), rng.uniform(0.5, 3.0))
    grid = default_grid(macro)
    state = CEState(macro, random_gradients(rng, c), tau_tilde, 1.0)
    return state.with_kn(max_correction / max_relative_correction(state, c, grid)), grid
