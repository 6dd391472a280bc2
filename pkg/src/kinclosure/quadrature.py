"""Velocity-space grids and the macroscopic moments of a distribution.

Two quadrature modes share one grid type:

* ``"uniform"``: tensor trapezoid rule on ``[center - hw, center + hw]^3``;
  this is what the discrete-velocity solver advects on.
* ``"hermite"``: Gauss-Hermite nodes mapped to ``center + scale * x``.  The
  Gaussian weight is folded back into the quadrature weights, so both modes
  approximate the plain Lebesgue integral ``sum(W * g) ~ int g dv``.  In this
  mode any polynomial of degree <= 2n-1 per axis times the grid Gaussian is
  integrated exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from .errors import (
    DegenerateDistributionError,
    InvalidArgumentError,
    InvalidDistributionError,
)

# f log f -> 0 continuously, so clamping at a tiny floor is bias-free
ENTROPY_FLOOR = 1e-300

DEFAULT_NODES = 24
DEFAULT_SIGMAS = 8.0


@dataclass(frozen=True)
class GasConstants:
    m: float = 1.0
    k_B: float = 1.0

    def __post_init__(self):
        if not (self.m > 0 and self.k_B > 0):
            raise InvalidArgumentError("particle mass and k_B must be positive")

    @property
    def R_s(self) -> float:
        """Specific gas constant ``k_B / m``."""
        return self.k_B / self.m

    @property
    def entropy_constant(self) -> float:
        """Additive constant in the equilibrium entropy, shared with its inverse."""
        return 1.5 * (math.log(2.0 * math.pi) + 1.0) + math.log(self.m)


@dataclass(frozen=True)
class MacroState:
    rho: float
    u: np.ndarray
    e: float

    def __post_init__(self):
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float).reshape(3))
        if not (self.rho > 0 and self.e > 0):
            raise InvalidArgumentError(f"need rho > 0 and e > 0, got rho={self.rho}, e={self.e}")

    def thermal_std(self) -> float:
        """Per-axis standard deviation of the equilibrium, sqrt(2e/3) = sqrt(R_s theta)."""
        return math.sqrt(2.0 * self.e / 3.0)

    @classmethod
    def from_moments(cls, rho, momentum, total_energy) -> "MacroState":
        u = np.asarray(momentum, dtype=float) / rho
        return cls(rho, u, total_energy / rho - 0.5 * float(u @ u))


@dataclass(frozen=True, eq=False)
class VelocityGrid:
    """Tensor-product velocity nodes with Lebesgue quadrature weights."""

    nodes: tuple
    weights: tuple
    center: np.ndarray
    half_width: float
    mode: str = "uniform"

    def __post_init__(self):
        for x, w in zip(self.nodes, self.weights):
            if x.shape != w.shape:
                raise InvalidArgumentError("node/weight length mismatch")
            if np.any(w <= 0) or np.any(np.diff(x) <= 0):
                raise InvalidArgumentError("weights must be positive and nodes increasing")

    @property
    def shape(self) -> tuple:
        return tuple(len(x) for x in self.nodes)

    @property
    def node_count(self) -> int:
        return int(np.prod(self.shape))

    @cached_property
    def velocities(self) -> np.ndarray:
        """Node velocities with shape ``(n0, n1, n2, 3)``."""
        return np.stack(np.meshgrid(*self.nodes, indexing="ij"), axis=-1)

    @cached_property
    def weight(self) -> np.ndarray:
        w0, w1, w2 = self.weights
        return w0[:, None, None] * w1[None, :, None] * w2[None, None, :]

    @property
    def max_speed(self) -> float:
        return float(max(np.abs(x).max() for x in self.nodes))

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Quadrature over the three trailing velocity axes of ``values``.

        ``values`` has shape ``(*grid.shape, *extra)``; the result has shape
        ``extra``.
        """
        values = np.asarray(values)
        return np.tensordot(self.weight, values, axes=([0, 1, 2], [0, 1, 2]))


def build_grid(center, half_width, n_per_axis, mode="uniform", scale=None) -> VelocityGrid:
    """Tensor grid of ``n_per_axis**3`` nodes around ``center``.

    In Hermite mode the nodes are ``center + scale * x_i`` for the
    probabilists' Gauss-Hermite roots ``x_i``; ``scale`` defaults to
    ``half_width / 8`` so that the default grid (``hw = 8 sigma``) lands on the
    thermal scale.
    """
    center = np.broadcast_to(np.asarray(center, dtype=float), (3,)).copy()
    if not half_width > 0:
        raise InvalidArgumentError(f"half_width must be positive, got {half_width}")
    if int(n_per_axis) != n_per_axis or n_per_axis < 2:
        raise InvalidArgumentError(f"n_per_axis must be an integer >= 2, got {n_per_axis}")
    n = int(n_per_axis)

    if mode == "uniform":
        x = np.linspace(-half_width, half_width, n)
        h = x[1] - x[0]
        w = np.full(n, h)
        w[0] = w[-1] = 0.5 * h
    elif mode == "hermite":
        if scale is None:
            scale = half_width / DEFAULT_SIGMAS
        if not scale > 0:
            raise InvalidArgumentError("Hermite scale must be positive")
        xi, wi = hermegauss(n)
        x = scale * xi
        w = scale * wi * np.exp(0.5 * xi * xi)
    else:
        raise InvalidArgumentError(f"unknown grid mode {mode!r}")

    nodes = tuple(c + x for c in center)
    weights = tuple(w.copy() for _ in range(3))
    return VelocityGrid(nodes, weights, center, float(half_width), mode)


def default_grid(macro: MacroState, mode="hermite", n_per_axis=DEFAULT_NODES) -> VelocityGrid:
    """Adequate grid for ``macro``: 8 thermal deviations around its bulk velocity."""
    return build_grid(macro.u, DEFAULT_SIGMAS * macro.thermal_std(), n_per_axis, mode=mode)


@dataclass(frozen=True, eq=False)
class DistributionGrid:
    """Values of a distribution function at the nodes of ``grid`` (read-only)."""

    values: np.ndarray
    grid: VelocityGrid = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise InvalidArgumentError(
                f"values shape {values.shape} does not match grid {self.grid.shape}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __add__(self, other: "DistributionGrid") -> "DistributionGrid":
        if other.grid is not self.grid:
            raise InvalidArgumentError("distributions live on different grids")
        return DistributionGrid(self.values + other.values, self.grid)

    def scaled(self, factor: float) -> "DistributionGrid":
        return DistributionGrid(factor * self.values, self.grid)


def conserved_moments(f: DistributionGrid, c: GasConstants):
    """Return ``(rho, momentum, total_energy)`` of ``f`` by grid quadrature."""
    g = f.grid
    v = g.velocities
    mf = c.m * f.values
    rho = float(g.integrate(mf))
    scale = float(g.integrate(np.abs(mf)))
    if not rho > 1e-12 * scale or rho <= 0.0:
        raise DegenerateDistributionError(f"distribution has no mass on the grid (rho={rho})")
    momentum = g.integrate(mf[..., None] * v)
    energy = float(g.integrate(0.5 * mf * np.einsum("...i,...i->...", v, v)))
    return rho, momentum, energy


def macro_state(f: DistributionGrid, c: GasConstants) -> MacroState:
    return MacroState.from_moments(*conserved_moments(f, c))


def _peculiar(f: DistributionGrid, u) -> np.ndarray:
    return f.grid.velocities - np.asarray(u, dtype=float).reshape(3)


def stress_tensor(f: DistributionGrid, u, c: GasConstants) -> np.ndarray:
    """Cauchy stress ``-int m (v-u)(v-u) f dv``."""
    w = _peculiar(f, u)
    T = -f.grid.integrate(c.m * f.values[..., None, None] * w[..., :, None] * w[..., None, :])
    return 0.5 * (T + T.T)


def heat_flux(f: DistributionGrid, u, c: GasConstants) -> np.ndarray:
    w = _peculiar(f, u)
    w2 = np.einsum("...i,...i->...", w, w)
    return f.grid.integrate((0.5 * c.m * w2 * f.values)[..., None] * w)


def _f_log_f(f: DistributionGrid) -> np.ndarray:
    vals = f.values
    if np.any(vals < 0):
        worst = float(vals.min())
        raise InvalidDistributionError(f"distribution is negative at a weighted node (min {worst:g})")
    return vals * np.log(np.maximum(vals, ENTROPY_FLOOR))


def entropy_density(f: DistributionGrid, c: GasConstants) -> float:
    """Entropy per unit volume ``rho * eta = -k_B int f log f dv``."""
    return -c.k_B * float(f.grid.integrate(_f_log_f(f)))


def entropy_flux(f: DistributionGrid, u, c: GasConstants) -> np.ndarray:
    w = _peculiar(f, u)
    return -c.k_B * f.grid.integrate(_f_log_f(f)[..., None] * w)
