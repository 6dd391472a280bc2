"""Property suites behind ``kinclosure verify``.

Every check records the measured value, the expected value and the tolerance
it was judged against, so a report can be audited without rerunning it.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import chapman_enskog as ce
from . import closure as cl
from . import curtiss as cu
from . import kernel_scaling as ks
from . import thermo
from .quadrature import (
    DistributionGrid,
    GasConstants,
    MacroState,
    conserved_moments,
    default_grid,
    entropy_density,
    heat_flux,
    macro_state,
    stress_tensor,
)
from .report import SCHEMA_VERSION

SUITES = ("maxwellian", "chapman-enskog", "thermo", "closure", "curtiss", "scaling")
DEFAULT_SEED = 20240607


@dataclass
class Check:
    id: str
    description: str
    value: float
    expected: float
    tolerance: float
    passed: bool

    def as_dict(self):
        return {"id": self.id, "description": self.description, "value": self.value,
                "expected": self.expected, "tolerance": self.tolerance, "pass": self.passed}


@dataclass
class Report:
    suite: str
    checks: list = field(default_factory=list)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def below(self, id, description, value, tol, expected=0.0):
        """Record ``value <= tol`` (value is an error measure)."""
        self.checks.append(Check(id, description, float(value), expected, tol, bool(value <= tol)))

    def above(self, id, description, value, bound):
        self.checks.append(Check(id, description, float(value), bound, 0.0, bool(value >= bound)))

    def as_dict(self, timing=False):
        d = {"schema_version": SCHEMA_VERSION, "suite": self.suite, "pass": self.passed,
             "checks": [c.as_dict() for c in self.checks]}
        if timing:
            d["runtime_s"] = self.runtime
        return d


def _rel(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def _random_macro(rng):
    return MacroState(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0, 3), rng.uniform(0.5, 3.0))


def moment_error(macro: MacroState, rho, mom, energy) -> float:
    """Largest relative error of ``(rho, rho u, rho E)`` against ``macro``."""
    E = macro.rho * (macro.e + 0.5 * macro.u @ macro.u)
    return max(abs(rho - macro.rho) / macro.rho, _rel(mom, macro.rho * macro.u), abs(energy - E) / E)


def suite_maxwellian(rng, scale=1.0, n_states=50, c=GasConstants()) -> Report:
    r = Report("maxwellian")
    worst = worst_q = 0.0
    for _ in range(n_states):
        macro = _random_macro(rng)
        grid = default_grid(macro)
        f = ce.maxwellian_grid(macro, c, grid)
        rho, mom, energy = conserved_moments(f, c)
        worst = max(worst, moment_error(macro, rho, mom, energy))
        q = heat_flux(f, macro.u, c)
        worst_q = max(worst_q, float(np.linalg.norm(q)) / (macro.rho * macro.thermal_std() ** 3))
    r.below("moments", "Maxwellian moments reproduce (rho, rho u, rho E)", worst, 1e-8 * scale)
    r.below("heat_flux", "Maxwellian heat flux vanishes (scaled)", worst_q, 1e-10 * scale)

    worst = 0.0
    for _ in range(n_states):
        macro = _random_macro(rng)
        grid = default_grid(macro)
        base = ce.maxwellian_grid(macro, c, grid).values
        f = DistributionGrid(base * rng.uniform(0.2, 1.8, base.shape), grid)
        m = macro_state(f, c)
        T = stress_tensor(f, m.u, c)
        worst = max(worst, abs(-np.trace(T) / 3.0 - 2.0 / 3.0 * m.rho * m.e) / (m.rho * m.e))
    r.below("stokes", "-tr(T)/3 = (2/3) rho e for random distributions", worst, 1e-8 * scale)

    macro = MacroState(1.0, np.zeros(3), 1.5)
    f = ce.maxwellian_grid(macro, c, default_grid(macro))
    eta = thermo.equilibrium_entropy(1.0, 1.5, c)
    r.below("entropy", "grid entropy density equals rho eta(rho, e)",
            abs(entropy_density(f, c) - eta) / abs(eta), 1e-10 * scale)
    return r


def suite_chapman_enskog(rng, scale=1.0, n_states=100, c=GasConstants()) -> Report:
    r = Report("chapman-enskog")
    worst_xi = worst_T = worst_Q = 0.0
    solv = True
    for i in range(n_states):
        state, grid = ce.random_near_equilibrium_state(rng, c, max_correction=0.1)
        xi_q = ce.entropy_production_quadrature(state, grid, c)
        xi_c = ce.entropy_production_closed_form(state, c)
        worst_xi = max(worst_xi, abs(xi_q - xi_c) / xi_c)
        F = ce.first_order_fluxes(state, grid, c)
        N = ce.nsf_fluxes(state, c)
        p = state.pressure()
        worst_T = max(worst_T, float(np.linalg.norm(F.T - N.T)) / max(np.linalg.norm(N.T + p * np.eye(3)), 1e-300))
        worst_Q = max(worst_Q, _rel(F.Q, N.Q))
        if i < 10:
            solv &= ce.check_solvability(state, grid, c).passed
    r.below("xi_oracle", "quadrature vs closed-form entropy production", worst_xi, 1e-6 * scale)
    r.below("nsf_stress", "first-order stress matches -pI + 2 nu Dd", worst_T, 1e-6 * scale)
    r.below("nsf_heat", "first-order heat flux matches -kappa grad(theta)", worst_Q, 1e-6 * scale)
    r.below("solvability", "first-order correction carries no conserved moments",
            0.0 if solv else 1.0, 0.0)
    co = ce.transport_coefficients(0.7, 1.3, c)
    r.below("prandtl", "kappa / (R_s nu) = 5/2", abs(co.kappa / (c.R_s * co.nu) - 2.5), 1e-15)

    state, grid = ce.random_near_equilibrium_state(rng, c, max_correction=0.1)
    ent, phi = [], []
    for k in range(4):
        s = state.with_kn(state.Kn / 2 ** k)
        ent.append(abs(ce.expansion_independence_report(s, grid, c).d_entropy))
        phi.append(float(np.linalg.norm(ce.entropy_flux_defect(s, grid, c))))
    r.above("entropy_kn2", "entropy defect ratio under Kn halving (min of 3)",
            min(a / b for a, b in zip(ent, ent[1:])), 3.5)
    r.above("flux_kn2", "Phi - Q/theta ratio under Kn halving (min of 3)",
            min(a / b for a, b in zip(phi, phi[1:])), 3.5)
    return r


def suite_thermo(rng, scale=1.0, c=GasConstants()) -> Report:
    r = Report("thermo")
    r.below("entropy_value", "eta(1, 1.5) with m = k_B = 1",
            abs(thermo.equilibrium_entropy(1.0, 1.5, c) - 4.2568156), 1e-7 * scale, 4.2568156)
    worst = 0.0
    for _ in range(50):
        rho, e = rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0)
        eta = thermo.equilibrium_entropy(rho, e, c)
        worst = max(worst, abs(thermo.internal_energy_from_entropy(rho, eta, c) - e) / e)
    r.below("inverse", "e(rho, eta(rho, e)) = e", worst, 1e-12 * scale)
    tp = thermo.ThermoPoint.from_rho_e(1.7, 2.2, c)
    r.below("ideal_gas", "p = rho R_s theta", abs(tp.p - 1.7 * c.R_s * tp.theta) / tp.p, 1e-14)

    min_prod = math.inf
    worst_cx = 0.0
    for _ in range(50):
        theta, p = rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)
        A = thermo.AffinitySet.from_gradients(rng.uniform(-1, 1, (3, 3)), rng.uniform(-1, 1, 3), theta)
        co = ce.transport_coefficients(rng.uniform(0.1, 1.0), p, c)
        F = cl.rs_closure_quadratic(A, co, theta, p)
        min_prod = min(min_prod, thermo.clausius_duhem_production(F, A, p, theta))
        cx = thermo.counterexample_fluxes(A, p, theta, rng.uniform(-2, 2))
        gt = A.grad_theta(theta)
        ref = (np.linalg.norm(gt) ** 2 * np.linalg.norm(A.D_full)) / theta
        worst_cx = max(worst_cx, abs(thermo.clausius_duhem_production(cx, A, p, theta)) / ref)
    r.above("second_law", "NSF fluxes give non-negative production", min_prod, 0.0)
    r.below("counterexample", "alternative fluxes produce no entropy", worst_cx, 1e-12 * scale)
    return r


def _random_instance(rng, c):
    theta, p = rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)
    tau = rng.uniform(0.1, 2.0)
    co = ce.transport_coefficients(tau, p, c)
    A = thermo.AffinitySet.from_gradients(rng.uniform(-1, 1, (3, 3)), rng.uniform(-1, 1, 3), theta)
    return A, co, theta, tau


def closure_equivalence(rng, n_instances, c=GasConstants()):
    """Worst relative disagreement among the four closure routes."""
    worst = 0.0
    for _ in range(n_instances):
        A, co, theta, tau = _random_instance(rng, c)
        a = cl.flatten_affinities(A)
        J_closed = cl.flatten_fluxes(cl.rs_closure_quadratic(A, co, theta), 0.0)
        spec = cl.ProducerSpec.quadratic(co.nu, co.kappa, theta, tau=tau)
        J_rs = cl.rs_closure_numeric(spec, a)
        J_min, tau_star = cl.min_relaxation_closure(spec, a)
        J_lin = cl.flatten_fluxes(cl.linear_irreversible_closure(A, co, theta), 0.0)
        worst = max(worst, _rel(J_rs, J_closed), _rel(J_min, J_closed), _rel(J_lin, J_closed),
                    _rel(J_min, J_rs), abs(tau_star - tau) / tau)
    return worst


def reduced_brute_force(rng, n_samples=10 ** 6, c=GasConstants()):
    """``(max sample production - KKT production) / KKT production`` on the 5-D instance."""
    theta, p, tau = rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.1, 2.0)
    co = ce.transport_coefficients(tau, p, c)
    inst = cl.ReducedInstance(co.nu, co.kappa, theta, rng.uniform(-1, 1, 5))
    spec = inst.spec(tau=tau)
    J = cl.rs_closure_numeric(spec, inst.A)
    best, best_tau = inst.brute_force(n_samples, rng, tau=tau)
    kkt = spec.value(J, inst.A)
    _, tau_star = cl.min_relaxation_closure(spec, inst.A)
    return (best - kkt) / kkt, (tau_star - best_tau) / tau_star


def suite_closure(rng, scale=1.0, n_instances=100, n_samples=10 ** 6, c=GasConstants()) -> Report:
    r = Report("closure")
    r.below("equivalence", "RS numeric, closed form, min-tau and linear closures agree",
            closure_equivalence(rng, n_instances, c), 1e-8 * scale)
    excess, tau_gap = reduced_brute_force(rng, n_samples, c)
    r.below("brute_force", "no feasible sample beats the KKT production (relative)", excess, 1e-6 * scale)
    r.below("brute_force_tau", "no feasible sample has smaller relaxation time (relative)",
            tau_gap, 1e-6 * scale)

    A, co, theta, _ = _random_instance(rng, c)
    J = cl.flatten_fluxes(cl.rs_closure_quadratic(A, co, theta), 0.0)
    a_dual = cl.rs_affinity_space_quadratic(J, co, theta)
    r.below("dual", "affinity-space maximization recovers A", _rel(a_dual, cl.flatten_affinities(A)),
            1e-8 * scale)
    lin = cl.check_linear_irreversible(cl.linear_irreversible_closure, co, theta, rng)
    r.below("linear_accepted", "linear-irreversible closure passes the linearity test",
            max(lin.additive_defect, lin.homogeneity_defect, lin.constraint_defect), lin.tolerance)
    alt = cl.check_linear_irreversible(
        lambda A_, co_, th_: cl.alternative_closure(A_, co_, th_, 0.5), co, theta, rng)
    r.above("alternative_rejected", "nonlinear alternative fails the linearity test (defect)",
            max(alt.additive_defect, alt.homogeneity_defect), 1e3 * alt.tolerance)
    rho = 1.0
    E = cl.euler_limit(A, rho, theta, c)
    p = rho * c.R_s * theta
    r.below("euler", "Kn -> 0 limit is (-pI, 0)",
            (np.linalg.norm(E.T + p * np.eye(3)) + np.linalg.norm(E.Q)) / p, 1e-12 * scale)
    return r


def suite_curtiss(rng, scale=1.0, c=GasConstants()) -> Report:
    r = Report("curtiss")
    worst_T = worst_off = worst_odd = 0.0
    for _ in range(10):
        rho, theta = rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)
        if rng.uniform() < 0.5:
            B = rng.standard_normal((3, 3))
            N = B @ B.T
        else:
            n = rng.standard_normal(3)
            N = cu.uniaxial_inertia(rng.uniform(0.1, 2.0), n / np.linalg.norm(n))
        macro = cu.CurtissMacro(rho, rng.uniform(-1, 1, 3), theta, N)
        F = cu.curtiss_zeroth_fluxes(macro, c)
        p = rho * c.R_s * theta
        worst_T = max(worst_T, abs(np.trace(F.T) / 3.0 + p) / p)
        worst_off = max(worst_off, float(np.abs(F.T - np.diag(np.diag(F.T))).max()) / p)
        s = rho * (c.R_s * theta) ** 1.5
        worst_odd = max(worst_odd, (np.linalg.norm(F.Q) + np.linalg.norm(F.M)) / s)
    r.below("pressure", "T = -rho R_s theta I (diagonal)", worst_T, 1e-12 * scale)
    r.below("isotropy", "off-diagonal stress / p", worst_off, 1e-10 * scale)
    r.below("odd_moments", "Q and M vanish (scaled)", worst_odd, 1e-8 * scale)

    worst_res = worst_fd = 0.0
    for _ in range(100):
        fld = cu.NematicField.random(rng, lam=rng.uniform(0.1, 2.0))
        theta, rho = rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)
        T, M = cu.ericksen_fluxes(fld, theta, rho, c)
        res = cu.variational_residual(T, M, fld, theta, rho, rng.standard_normal((3, 3)),
                                      rng.standard_normal((3, 3)), c)
        worst_res = max(worst_res, abs(res))
        d = cu.energy_gradient(theta, rho, fld, c)
        worst_fd = max(worst_fd, _rel(cu.energy_gradient_fd(theta, rho, fld, c), d))
    r.below("variational", "energy identity residual of the Ericksen closure", worst_res, 1e-12 * scale)
    r.below("derivative", "analytic de/d(grad n) vs finite differences", worst_fd, 1e-6 * scale)
    cmp_ = cu.leslie_stress_comparison(cu.NematicField.random(rng), 1.0, 1.0, c)
    r.below("leslie_ratio", "derived / printed stress coefficient", abs(cmp_.ratio - 2.0), 1e-12, 2.0)
    return r


def suite_scaling(rng, scale=1.0, c=GasConstants()) -> Report:
    r = Report("scaling")
    for lam in (0.0, 1.0, 2.0, 3.0):
        spec = ks.KernelSpec(lam)
        slope = ks.fit_temperature_exponent(spec, c, method="quadrature")
        r.below(f"exponent_{lam:g}", f"fitted temperature exponent for lambda={lam:g}",
                abs(slope - lam / 2.0), 1e-3 * scale, lam / 2.0)
    worst = 0.0
    for lam in (0.0, 0.5, 1.0, 2.0, 3.0):
        spec = ks.KernelSpec(lam)
        a = ks.collision_frequency(spec, 1.3, 0.8, c, "closed")
        b = ks.collision_frequency(spec, 1.3, 0.8, c, "quadrature")
        worst = max(worst, abs(a - b) / a)
    r.below("quadrature", "radial quadrature vs closed-form Maxwellian average", worst, 1e-8 * scale)
    te = ks.transport_scaling_exponent(1.0)
    r.below("transport_1", "transport exponent at lambda=1", abs(te.exponent + 1.0), 1e-15, -1.0)
    return r


_RUNNERS = {
    "maxwellian": suite_maxwellian,
    "chapman-enskog": suite_chapman_enskog,
    "thermo": suite_thermo,
    "closure": suite_closure,
    "curtiss": suite_curtiss,
    "scaling": suite_scaling,
}


def run_suite(name, seed=DEFAULT_SEED, tolerance_scale=1.0, **kwargs) -> Report:
    if name not in _RUNNERS:
        raise KeyError(name)
    t0 = time.perf_counter()
    report = _RUNNERS[name](np.random.default_rng(seed), tolerance_scale, **kwargs)
    report.runtime = time.perf_counter() - t0
    return report
