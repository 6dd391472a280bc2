"""Discrete-velocity BGK solver in one space dimension and three velocity dimensions.

Each step is first-order upwind advection along x (periodic) followed by an
implicit pointwise relaxation toward the discrete equilibrium.  The discrete
equilibrium is the exponential of a quadratic in ``v`` whose grid moments
match the cell's conserved moments exactly, so the relaxation conserves mass,
momentum and energy to rounding and is the discrete entropy maximizer; both
substeps are convex combinations, which makes the integrated entropy
non-decreasing step by step.
"""
from __future__ import annotations

import configparser
import csv
import math
import re
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import ConfigurationError, InsufficientSignalError, RealizabilityError
from .quadrature import ENTROPY_FLOOR, DistributionGrid, GasConstants, VelocityGrid, build_grid

PRESETS = ("uniform", "bimodal", "shear_wave")
TAU_KINDS = ("constant", "hard_sphere")
CSV_COLUMNS = ("t", "mass", "px", "py", "pz", "energy", "H", "min_xi", "amp_shear")

_EQ_MAX_ITER = 60
_EQ_TOL = 2e-15


# --------------------------------------------------------------------- config

@dataclass(frozen=True)
class VGridSpec:
    n_per_axis: int = 16
    half_width: float = 6.0
    mode: str = "uniform"

    def build(self) -> VelocityGrid:
        return build_grid(np.zeros(3), self.half_width, self.n_per_axis, self.mode)


@dataclass(frozen=True)
class TauModel:
    kind: str = "constant"
    tau: float = 0.05
    C_B: float = 1.0

    def evaluate(self, rho, theta, c: GasConstants) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        if self.kind == "constant":
            return np.full(rho.shape, float(self.tau))
        return 1.0 / (self.C_B * rho * np.sqrt(c.R_s * np.asarray(theta, dtype=float)))


@dataclass(frozen=True)
class InitialCondition:
    preset: str = "uniform"
    params: dict = field(default_factory=dict)

    def get(self, key, default):
        return float(self.params.get(key, default))


@dataclass(frozen=True)
class SimConfig:
    n_cells: int = 64
    domain_length: float = 1.0
    v_grid: VGridSpec = VGridSpec()
    tau_model: TauModel = TauModel()
    cfl: float = 0.5
    t_end: float = 1.0
    boundary: str = "periodic"
    initial_condition: InitialCondition = InitialCondition()
    output_every: int = 1
    dt: Optional[float] = None
    gas: GasConstants = GasConstants()

    def __post_init__(self):
        errs = []
        if not (isinstance(self.n_cells, (int, np.integer)) and self.n_cells >= 4):
            errs.append(("n_cells", "must be an integer >= 4"))
        if not self.domain_length > 0:
            errs.append(("domain_length", "must be positive"))
        if not 0 < self.cfl <= 1:
            errs.append(("cfl", "must lie in (0, 1]"))
        if not self.t_end >= 0:
            errs.append(("t_end", "must be non-negative"))
        if self.boundary != "periodic":
            errs.append(("boundary", "only 'periodic' is supported"))
        if not (isinstance(self.output_every, (int, np.integer)) and self.output_every >= 1):
            errs.append(("output_every", "must be an integer >= 1"))
        if self.dt is not None and not self.dt > 0:
            errs.append(("dt", "must be positive"))
        tm = self.tau_model
        if tm.kind not in TAU_KINDS:
            errs.append(("kind", f"must be one of {TAU_KINDS}"))
        elif tm.kind == "constant" and not tm.tau >= 0:
            errs.append(("tau", "must be >= 0 (0 selects the projection control)"))
        elif tm.kind == "hard_sphere" and not tm.C_B > 0:
            errs.append(("C_B", "must be positive"))
        if self.initial_condition.preset not in PRESETS:
            errs.append(("preset", f"must be one of {PRESETS}"))
        if not (self.v_grid.n_per_axis >= 2 and self.v_grid.half_width > 0):
            errs.append(("n_per_axis", "velocity grid needs n_per_axis >= 2 and half_width > 0"))
        if errs:
            key, msg = errs[0]
            raise ConfigurationError(f"{key}: {msg}", key=key)

    @property
    def dx(self) -> float:
        return self.domain_length / self.n_cells

    def cell_centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dx


_SECTIONS = {
    "simulation": {"n_cells": int, "domain_length": float, "cfl": float, "t_end": float,
                   "boundary": str, "output_every": int, "dt": float},
    "v_grid": {"n_per_axis": int, "half_width": float, "mode": str},
    "tau_model": {"kind": str, "tau": float, "C_B": float},
    "gas": {"m": float, "k_B": float},
}
_IC_PARAMS = {"rho": float, "theta": float, "ux": float, "uy": float, "uz": float,
              "U": float, "mode": int, "drift": float, "amplitude": float}


def _key_line(text, key):
    pat = re.compile(rf"^\s*{re.escape(key)}\s*[=:]", re.IGNORECASE)
    for i, line in enumerate(text.splitlines(), 1):
        if pat.match(line):
            return i
    return None


def parse_config(text: str, source="<config>") -> SimConfig:
    """Parse an INI-style config; errors carry the offending line number."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        if line is None and getattr(exc, "errors", None):
            line = exc.errors[0][0]
        where = f"{source}:{line}" if line else source
        raise ConfigurationError(f"{where}: {exc.message.splitlines()[0]}", line=line) from exc

    def fail(key, msg):
        line = _key_line(text, key)
        where = f"{source}:{line}" if line else source
        raise ConfigurationError(f"{where}: {key}: {msg}", key=key, line=line)

    values = {}
    for section in cp.sections():
        if section == "initial_condition":
            schema = dict(_IC_PARAMS, preset=str)
        elif section in _SECTIONS:
            schema = _SECTIONS[section]
        else:
            fail(f"[{section}]", "unknown section")
        out = {}
        for key, raw in cp.items(section):
            if key not in schema:
                fail(key, f"unknown key in [{section}]")
            try:
                out[key] = schema[key](raw.strip())
            except ValueError:
                fail(key, f"cannot parse {raw!r} as {schema[key].__name__}")
        values[section] = out

    sim = values.get("simulation", {})
    ic = dict(values.get("initial_condition", {}))
    preset = ic.pop("preset", "uniform")
    try:
        return SimConfig(
            v_grid=VGridSpec(**values.get("v_grid", {})),
            tau_model=TauModel(**values.get("tau_model", {})),
            initial_condition=InitialCondition(preset, ic),
            gas=GasConstants(**values.get("gas", {})),
            **sim,
        )
    except ConfigurationError as exc:
        fail(exc.key, str(exc).split(": ", 1)[-1])
    except ValueError as exc:
        fail("gas", str(exc))


def load_config(path) -> SimConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(text, source=str(path))


# ---------------------------------------------------------------- equilibrium

class _Basis:
    """Moment basis ``phi = (1, xi, |xi|^2)`` with ``xi = (v - center)/s`` on a flattened grid."""

    def __init__(self, grid: VelocityGrid):
        self.grid = grid
        self.s = grid.half_width / 3.0
        xi = (grid.velocities.reshape(-1, 3) - grid.center) / self.s
        self.phi = np.column_stack([np.ones(len(xi)), xi, np.einsum("ij,ij->i", xi, xi)])
        self.w = grid.weight.ravel()
        self.phi_w = self.phi * self.w[:, None]
        self.outer_w = (self.phi[:, :, None] * self.phi[:, None, :]).reshape(-1, 25) * self.w[:, None]
        self.abs_phi_w = np.abs(self.phi_w)

    def moments(self, f_flat):
        """``sum_v w phi f`` for rows of ``f_flat``."""
        return f_flat @ self.phi_w

    def from_conserved(self, rho, momentum, energy, c: GasConstants):
        n = rho / c.m
        P = np.asarray(momentum, dtype=float) / c.m
        E2 = 2.0 * energy / c.m
        z = self.grid.center
        return np.concatenate([[n], (P - z * n) / self.s,
                               [(E2 - 2.0 * z @ P + (z @ z) * n) / self.s ** 2]])

    def guess(self, m):
        """Multipliers of the continuous Maxwellian with the same moments."""
        n = m[:, 0]
        d = m[:, 1:4] / n[:, None]                     # (u - center)/s
        var = (m[:, 4] / n - np.einsum("ij,ij->i", d, d)) / 3.0  # sigma^2/s^2
        if np.any(~(var > 0)) or np.any(~(n > 0)):
            raise RealizabilityError("moments are not realizable (non-positive density or energy)")
        lam = np.empty_like(m)
        lam[:, 0] = np.log(n / (2.0 * math.pi * var * self.s ** 2) ** 1.5) \
            - np.einsum("ij,ij->i", d, d) / (2.0 * var)
        lam[:, 1:4] = d / var[:, None]
        lam[:, 4] = -0.5 / var
        return lam

    def solve(self, m, lam=None):
        """Newton solve for multipliers with ``sum w phi exp(lam.phi) = m``, row-wise."""
        m = np.atleast_2d(np.asarray(m, dtype=float))
        lam = self.guess(m) if lam is None else lam.copy()
        res = np.inf
        for _ in range(_EQ_MAX_ITER):
            with np.errstate(over="ignore", invalid="ignore"):
                f = np.exp(lam @ self.phi.T)
                g = f @ self.phi_w - m
                scale = f @ self.abs_phi_w + np.abs(m)
                res = float(np.max(np.abs(g) / scale)) if np.all(np.isfinite(g)) else np.inf
            if not np.isfinite(res):
                break
            if res <= _EQ_TOL:
                return lam, f
            H = (f @ self.outer_w).reshape(-1, 5, 5)
            try:
                step = np.linalg.solve(H, g[..., None])[..., 0]
            except np.linalg.LinAlgError:
                break
            lam = lam - step
        raise RealizabilityError(
            f"discrete equilibrium did not converge (relative moment residual {res:.3g})",
            residual=res)


_BASES: dict = {}


def _basis(grid: VelocityGrid) -> _Basis:
    b = _BASES.get(id(grid))
    if b is None or b.grid is not grid:
        b = _Basis(grid)
        _BASES[id(grid)] = b
    return b


def discrete_equilibrium(conserved, grid: VelocityGrid, c: GasConstants) -> DistributionGrid:
    """Discrete Maxwellian on ``grid`` whose quadrature moments equal ``conserved``.

    ``conserved`` is ``(rho, momentum, total_energy)``.
    """
    b = _basis(grid)
    m = b.from_conserved(*conserved, c)
    _, f = b.solve(m[None, :])
    return DistributionGrid(f[0].reshape(grid.shape), grid)


def equilibrium_parameters(conserved, grid: VelocityGrid, c: GasConstants):
    """``(rho, u, sigma^2)`` implied by the exponent of the discrete equilibrium.

    For a grid that resolves the Maxwellian these coincide with the
    continuous parameters of the same moments.
    """
    b = _basis(grid)
    lam, _ = b.solve(b.from_conserved(*conserved, c)[None, :])
    lam = lam[0]
    var = -0.5 / lam[4]
    d = lam[1:4] * var
    n = math.exp(lam[0] + (d @ d) / (2.0 * var)) * (2.0 * math.pi * var * b.s ** 2) ** 1.5
    return n * c.m, grid.center + b.s * d, var * b.s ** 2


# --------------------------------------------------------------------- solver

@dataclass
class SimState:
    f: np.ndarray          # (n_cells, n0, n1, n2)
    t: float
    grid: VelocityGrid

    def cell(self, i) -> DistributionGrid:
        return DistributionGrid(self.f[i], self.grid)


def _flat(state: SimState) -> np.ndarray:
    return state.f.reshape(state.f.shape[0], -1)


def cell_moments(state: SimState):
    """Per-cell basis moments, shape (n_cells, 5)."""
    return _basis(state.grid).moments(_flat(state))


def cell_macro(state: SimState, c: GasConstants):
    """Per-cell ``(rho, u, theta)``."""
    w = state.grid.weight.ravel()
    v = state.grid.velocities.reshape(-1, 3)
    f = _flat(state)
    n = f @ w
    u = (f @ (w[:, None] * v)) / n[:, None]
    e2 = (f @ (w * np.einsum("ij,ij->i", v, v))) / n - np.einsum("ij,ij->i", u, u)
    return c.m * n, u, e2 / (3.0 * c.R_s)


def totals(state: SimState, dx, c: GasConstants):
    """Domain totals ``(mass, momentum, energy, momentum_scale)``."""
    w = state.grid.weight.ravel()
    v = state.grid.velocities.reshape(-1, 3)
    fs = _flat(state).sum(axis=0) * dx * c.m
    mass = float(fs @ w)
    mom = (fs * w) @ v
    energy = 0.5 * float((fs * w) @ np.einsum("ij,ij->i", v, v))
    mom_scale = float((fs * w) @ np.linalg.norm(v, axis=1))
    return mass, mom, energy, mom_scale


def integrated_entropy(state: SimState, dx, c: GasConstants) -> float:
    """``H = -k_B sum_x dx sum_v w f log f`` with the entropy floor."""
    f = _flat(state)
    flogf = f * np.log(np.maximum(f, ENTROPY_FLOOR))
    return -c.k_B * dx * float(flogf.sum(axis=0) @ state.grid.weight.ravel())


def cell_entropy_production(state: SimState, tau, c: GasConstants) -> np.ndarray:
    """Per-cell BGK production ``(k_B/tau) sum w (f - f_eq)(log f - log f_eq)``."""
    b = _basis(state.grid)
    f = _flat(state)
    lam, feq = b.solve(b.moments(f))
    log_f = np.log(np.maximum(f, ENTROPY_FLOOR))
    integrand = (f - feq) * (log_f - lam @ b.phi.T)
    tau = np.asarray(tau, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(tau > 0, c.k_B * (integrand @ b.w) / tau, np.nan)


def shear_amplitude(state: SimState, config: SimConfig) -> float:
    """Magnitude of the leading Fourier mode of ``rho u_y``."""
    mode = int(config.initial_condition.params.get("mode", 1))
    k = 2.0 * math.pi * mode / config.domain_length
    w = state.grid.weight.ravel()
    vy = state.grid.velocities.reshape(-1, 3)[:, 1]
    jy = config.gas.m * (_flat(state) @ (w * vy))
    x = config.cell_centers()
    return float(abs(2.0 / config.n_cells * np.sum(jy * np.exp(-1j * k * x))))


def cell_tau(state: SimState, config: SimConfig) -> np.ndarray:
    if config.tau_model.kind == "constant":
        return np.full(state.f.shape[0], float(config.tau_model.tau))
    rho, _, theta = cell_macro(state, config.gas)
    return config.tau_model.evaluate(rho, theta, config.gas)


def max_stable_dt(state: SimState, config: SimConfig) -> float:
    dt = config.cfl * config.dx / state.grid.max_speed
    tau = cell_tau(state, config)
    if np.all(tau > 0):
        dt = min(dt, config.cfl * float(tau.min()))
    return dt


def check_cfl(state: SimState, config: SimConfig, dt):
    limit = config.cfl * config.dx / state.grid.max_speed
    if dt > limit * (1 + 1e-12):
        raise ConfigurationError(f"dt={dt:.6g} violates the advection CFL limit {limit:.6g}", key="dt")
    tau = cell_tau(state, config)
    if np.all(tau > 0) and dt > config.cfl * float(tau.min()) * (1 + 1e-12):
        raise ConfigurationError(
            f"dt={dt:.6g} exceeds cfl*min(tau)={config.cfl * tau.min():.6g}", key="dt")


def _advect(f, courant):
    """Upwind step; ``courant`` holds ``v_x dt/dx`` along velocity axis 1."""
    c = courant[None, :, None, None]
    up_left = np.roll(f, 1, axis=0)     # neighbour at i-1
    up_right = np.roll(f, -1, axis=0)   # neighbour at i+1
    return np.where(c > 0, f - c * (f - up_left), f + c * (f - up_right))


def _relax(state: SimState, config: SimConfig, dt):
    b = _basis(state.grid)
    f = _flat(state)
    lam, feq = b.solve(b.moments(f))
    tau = cell_tau(state, config)
    with np.errstate(divide="ignore"):
        a = np.where(tau > 0, (dt / np.where(tau > 0, tau, 1.0)) / (1.0 + dt / np.where(tau > 0, tau, 1.0)), 1.0)
    return ((1.0 - a)[:, None] * f + a[:, None] * feq).reshape(state.f.shape)


def step(state: SimState, config: SimConfig, dt) -> SimState:
    """One advection + relaxation step of size ``dt``."""
    check_cfl(state, config, dt)
    courant = state.grid.nodes[0] * dt / config.dx
    advected = SimState(_advect(state.f, courant), state.t, state.grid)
    return SimState(_relax(advected, config, dt), state.t + dt, state.grid)


def initial_state(config: SimConfig) -> SimState:
    grid = config.v_grid.build()
    c = config.gas
    ic = config.initial_condition
    nx = config.n_cells
    x = config.cell_centers()
    k = 2.0 * math.pi * ic.get("mode", 1) / config.domain_length
    rho0, theta = ic.get("rho", 1.0), ic.get("theta", 1.0)
    if not (rho0 > 0 and theta > 0):
        raise ConfigurationError("initial rho and theta must be positive", key="rho")
    var = c.R_s * theta
    b = _basis(grid)

    def discrete_eq(rho, u):
        n = rho / c.m
        P = n[:, None] * u
        E2 = n * (np.einsum("ij,ij->i", u, u) + 3.0 * var)
        z = grid.center
        m = np.column_stack([n, (P - z * n[:, None]) / b.s,
                             (E2 - 2.0 * P @ z + (z @ z) * n) / b.s ** 2])
        return b.solve(m)[1].reshape((nx,) + grid.shape)

    if ic.preset == "uniform":
        u = np.tile([ic.get("ux", 0.0), ic.get("uy", 0.0), ic.get("uz", 0.0)], (nx, 1))
        f = discrete_eq(np.full(nx, rho0), u)
    elif ic.preset == "shear_wave":
        u = np.zeros((nx, 3))
        u[:, 1] = ic.get("U", 0.01) * np.sin(k * x)
        f = discrete_eq(np.full(nx, rho0), u)
    else:  # bimodal
        drift, amp = ic.get("drift", 1.0), ic.get("amplitude", 0.2)
        rho = rho0 * (1.0 + amp * np.sin(k * x))
        if np.any(rho <= 0):
            raise ConfigurationError("bimodal amplitude must keep the density positive",
                                     key="amplitude")
        v = grid.velocities
        lobes = sum(np.exp(-np.sum((v - s * np.array([drift, 0.0, 0.0])) ** 2, axis=-1) / (2 * var))
                    for s in (1.0, -1.0))
        f0 = lobes / (2.0 * (2.0 * math.pi * var) ** 1.5)
        f = (rho / c.m)[:, None, None, None] * f0[None]
    return SimState(np.ascontiguousarray(f, dtype=float), 0.0, grid)


@dataclass
class Diagnostics:
    t: np.ndarray
    mass: np.ndarray
    momentum: np.ndarray
    energy: np.ndarray
    H: np.ndarray
    min_xi: np.ndarray
    amp_shear: np.ndarray
    dt: float
    n_steps: int
    min_dH_rel: float            # min over steps of dH/|H|
    max_mass_drift: float        # max per-step relative drifts
    max_momentum_drift: float
    max_energy_drift: float
    total_drift: dict = field(default_factory=dict)

    def rows(self):
        for i in range(len(self.t)):
            yield (self.t[i], self.mass[i], *self.momentum[i], self.energy[i], self.H[i],
                   self.min_xi[i], self.amp_shear[i])

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for row in self.rows():
                w.writerow([format(float(x), ".17g") for x in row])

    def summary(self) -> dict:
        return {
            "n_steps": self.n_steps,
            "dt": self.dt,
            "t_end": float(self.t[-1]),
            "min_dH_rel": self.min_dH_rel,
            "max_step_drift": {"mass": self.max_mass_drift, "momentum": self.max_momentum_drift,
                               "energy": self.max_energy_drift},
            "H_initial": float(self.H[0]),
            "H_final": float(self.H[-1]),
            "min_xi": float(np.nanmin(self.min_xi)) if np.any(np.isfinite(self.min_xi)) else float("nan"),
        }


def run(config: SimConfig, state: Optional[SimState] = None) -> Diagnostics:
    """Integrate to ``t_end``; ``config.dt`` (if set) fixes the step, else the largest stable one."""
    c = config.gas
    if state is None:
        state = initial_state(config)
    dt_max = config.dt if config.dt is not None else max_stable_dt(state, config)
    n_steps = int(math.ceil(config.t_end / dt_max - 1e-9)) if config.t_end > 0 else 0
    dt = config.t_end / n_steps if n_steps else dt_max
    if n_steps:
        check_cfl(state, config, dt)

    samples = []

    def sample(s):
        mass, mom, energy, _ = totals(s, config.dx, c)
        H = integrated_entropy(s, config.dx, c)
        tau = cell_tau(s, config)
        xi = cell_entropy_production(s, tau, c) if np.all(tau > 0) else np.array([np.nan])
        samples.append((s.t, mass, mom, energy, H, float(np.min(xi)), shear_amplitude(s, config)))

    sample(state)
    mass0, mom0, en0, ms0 = totals(state, config.dx, c)
    H_prev = integrated_entropy(state, config.dx, c)
    min_dH = math.inf
    drift = np.zeros(3)
    for i in range(1, n_steps + 1):
        state = step(state, config, dt)
        mass, mom, en, ms = totals(state, config.dx, c)
        H = integrated_entropy(state, config.dx, c)
        min_dH = min(min_dH, (H - H_prev) / abs(H_prev) if H_prev else H - H_prev)
        drift = np.maximum(drift, [abs(mass - mass0) / mass0,
                                   float(np.max(np.abs(mom - mom0))) / ms0,
                                   abs(en - en0) / en0])
        mass0, mom0, en0, H_prev = mass, mom, en, H
        if i % config.output_every == 0 or i == n_steps:
            sample(state)

    t, mass, mom, en, H, xi, amp = zip(*samples)
    return Diagnostics(np.array(t), np.array(mass), np.array(mom), np.array(en), np.array(H),
                       np.array(xi), np.array(amp), dt, n_steps,
                       min_dH if n_steps else 0.0, *map(float, drift))


# ----------------------------------------------------------- shear viscosity

def decay_rate(t, amp, t_start=0.0, noise_floor=1e-12):
    """Least-squares slope of ``-log amp`` over samples with ``t >= t_start``."""
    t, amp = np.asarray(t, dtype=float), np.asarray(amp, dtype=float)
    if amp.size == 0 or not amp[0] > 0:
        raise InsufficientSignalError("shear amplitude is zero at the start of the run")
    keep = (t >= t_start) & (amp > noise_floor * max(1.0, float(amp.max())))
    if np.any(t[(t >= t_start) & ~keep]):
        raise InsufficientSignalError("shear amplitude fell below the noise floor inside the fit window")
    if keep.sum() < 3:
        raise InsufficientSignalError("fewer than three samples above the noise floor")
    slope = np.polyfit(t[keep], np.log(amp[keep]), 1)[0]
    return -float(slope)


def measure_shear_decay(diag: Diagnostics, k, rho=1.0, control: Optional[Diagnostics] = None,
                        t_start=0.0) -> float:
    """``nu_eff = (r - r_control) rho / k^2`` from the decay of the shear mode."""
    r = decay_rate(diag.t, diag.amp_shear, t_start)
    if control is not None:
        r -= decay_rate(control.t, control.amp_shear, t_start)
    return r * rho / k ** 2


@dataclass(frozen=True)
class ShearResult:
    tau: float
    nu_expected: float
    nu_eff: float
    rate: float
    control_rate: float
    dt: float

    @property
    def rel_error(self) -> float:
        return abs(self.nu_eff - self.nu_expected) / self.nu_expected


def shear_viscosity_experiment(tau, n_cells=64, U=1e-3, t_end=1.0, rho=1.0, theta=1.0,
                               cfl=0.5, v_grid=VGridSpec(), output_every=5,
                               gas=GasConstants(), dt=None) -> ShearResult:
    """Shear-wave run at ``tau`` plus the ``tau = 0`` control at the same step size."""
    ic = InitialCondition("shear_wave", {"rho": rho, "theta": theta, "U": U, "mode": 1})
    cfg = SimConfig(n_cells=n_cells, v_grid=v_grid, tau_model=TauModel("constant", tau),
                    cfl=cfl, t_end=t_end, initial_condition=ic, output_every=output_every,
                    gas=gas, dt=dt)
    diag = run(cfg)
    control = run(replace(cfg, tau_model=TauModel("constant", 0.0), dt=diag.dt))
    k = 2.0 * math.pi / cfg.domain_length
    t_start = min(10.0 * tau, 0.5 * t_end)
    r = decay_rate(diag.t, diag.amp_shear, t_start)
    r0 = decay_rate(control.t, control.amp_shear, t_start)
    p = rho * gas.R_s * theta
    return ShearResult(tau, tau * p, (r - r0) * rho / k ** 2, r, r0, diag.dt)
