"""Zeroth-order fluxes of gases of rigid rotating molecules and the nematic energy algebra.

The equilibrium is Gaussian in the peculiar velocity ``V`` (variance
``R_s theta`` per axis) and in the peculiar angular velocity ``Omega``
(covariance ``k_B theta N^+``).  Directions in the kernel of the inertia
tensor carry no rotational energy and are left out of the angular integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from .errors import InvalidArgumentError
from .quadrature import GasConstants

_LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _LEVI_CIVITA[_i, _j, _k] = 1.0
    _LEVI_CIVITA[_i, _k, _j] = -1.0


@dataclass(frozen=True)
class CurtissMacro:
    rho: float
    u: np.ndarray
    theta: float
    inertia: np.ndarray
    gamma: np.ndarray = np.zeros(3)
    mu: Optional[np.ndarray] = None

    def __post_init__(self):
        N = np.asarray(self.inertia, dtype=float)
        if not (self.rho > 0 and self.theta > 0):
            raise InvalidArgumentError("rho and theta must be positive")
        if N.shape != (3, 3) or not np.allclose(N, N.T, atol=1e-12 * max(1.0, np.abs(N).max())):
            raise InvalidArgumentError("inertia tensor must be a symmetric 3x3 matrix")
        if np.linalg.eigvalsh(N)[0] < -1e-12 * max(1.0, np.abs(N).max()):
            raise InvalidArgumentError("inertia tensor must be positive semidefinite")
        object.__setattr__(self, "inertia", N)
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float).reshape(3))
        object.__setattr__(self, "gamma", np.asarray(self.gamma, dtype=float).reshape(3))


@dataclass(frozen=True)
class CoupleFluxSet:
    T: np.ndarray
    Q: np.ndarray
    M: np.ndarray


def uniaxial_inertia(lam, n) -> np.ndarray:
    """``N = lam (I - n n)`` for a rod-like molecule along ``n``."""
    n = np.asarray(n, dtype=float)
    return lam * (np.eye(3) - np.outer(n, n))


def curtiss_zeroth_fluxes(macro: CurtissMacro, c: GasConstants, n_nodes=6) -> CoupleFluxSet:
    """``T``, ``Q`` and ``M`` of the rotational Maxwellian by tensor Gauss-Hermite quadrature.

    Translational axes and the positive-inertia angular axes each get
    ``n_nodes`` probabilists' Hermite nodes, exact for the polynomial
    moments involved (degree <= 3).
    """
    kT = c.k_B * macro.theta
    evals, evecs = np.linalg.eigh(macro.inertia)
    keep = evals > 1e-12 * max(1.0, evals.max())
    x, w = hermegauss(n_nodes)
    w = w / math.sqrt(2.0 * math.pi)
    n_ang = int(keep.sum())
    dim = 3 + n_ang
    pts = np.stack([g.ravel() for g in np.meshgrid(*([x] * dim), indexing="ij")], axis=-1)
    wts = np.prod([g.ravel() for g in np.meshgrid(*([w] * dim), indexing="ij")], axis=0)

    V = math.sqrt(kT / c.m) * pts[:, :3]
    Omega = (pts[:, 3:] * np.sqrt(kT / evals[keep])) @ evecs[:, keep].T
    NOmega = Omega @ macro.inertia

    n = macro.rho / c.m
    T = -n * c.m * np.einsum("k,ki,kj->ij", wts, V, V)
    energy = 0.5 * c.m * np.einsum("ki,ki->k", V, V) + 0.5 * np.einsum("ki,ki->k", Omega, NOmega)
    Q = n * np.einsum("k,k,ki->i", wts, energy, V)
    M = -n * np.einsum("k,ki,kj->ij", wts, V, NOmega)
    return CoupleFluxSet(T, Q, M)


@dataclass(frozen=True)
class NematicField:
    n: np.ndarray
    grad_n: np.ndarray
    lambda_inertia: float = 1.0

    def __post_init__(self):
        n = np.asarray(self.n, dtype=float).reshape(3)
        G = np.asarray(self.grad_n, dtype=float).reshape(3, 3)
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise InvalidArgumentError(f"director must be a unit vector, |n| = {np.linalg.norm(n)!r}")
        if np.linalg.norm(n @ G) > 1e-10 * max(1.0, np.linalg.norm(G)):
            raise InvalidArgumentError("grad_n must satisfy n . dn/dx_j = 0 (unit-length constraint)")
        if not self.lambda_inertia >= 0:
            raise InvalidArgumentError("inertia coefficient must be non-negative")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "grad_n", G)

    @property
    def inertia(self) -> np.ndarray:
        return uniaxial_inertia(self.lambda_inertia, self.n)

    def with_grad(self, grad_n) -> "NematicField":
        return NematicField(self.n, grad_n, self.lambda_inertia)

    @classmethod
    def random(cls, rng: np.random.Generator, lam=1.0, scale=1.0) -> "NematicField":
        n = rng.standard_normal(3)
        n /= np.linalg.norm(n)
        G = scale * rng.standard_normal((3, 3))
        return cls(n, (np.eye(3) - np.outer(n, n)) @ G, lam)


def nematic_internal_energy(theta, rho, field: NematicField, c: GasConstants, grad_n=None) -> float:
    """``e = (5/2) R_s theta + (lam/2) rho R_s theta tr(grad_n^T grad_n)``."""
    G = field.grad_n if grad_n is None else np.asarray(grad_n, dtype=float)
    return (2.5 * c.R_s * theta
            + 0.5 * field.lambda_inertia * rho * c.R_s * theta * float(np.sum(G * G)))


def energy_gradient(theta, rho, field: NematicField, c: GasConstants) -> np.ndarray:
    """Analytic ``de/d(grad_n) = lam rho R_s theta grad_n``."""
    return field.lambda_inertia * rho * c.R_s * theta * field.grad_n


def energy_gradient_fd(theta, rho, field: NematicField, c: GasConstants, h=1e-5) -> np.ndarray:
    """Central finite differences of :func:`nematic_internal_energy` in each entry of grad_n."""
    out = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            dG = np.zeros((3, 3))
            dG[i, j] = h
            out[i, j] = (nematic_internal_energy(theta, rho, field, c, field.grad_n + dG)
                         - nematic_internal_energy(theta, rho, field, c, field.grad_n - dG)) / (2 * h)
    return out


def director_cross(n, S) -> np.ndarray:
    """Row-wise cross product ``(n x S)_ij = eps_iqp n_q S_jp``."""
    return np.einsum("iqp,q,jp->ij", _LEVI_CIVITA, np.asarray(n, dtype=float), S)


def ericksen_fluxes(field: NematicField, theta, rho, c: GasConstants):
    """``T* = -(de/d grad_n)^T grad_n`` and ``M* = n x de/d grad_n``."""
    de = energy_gradient(theta, rho, field, c)
    return -de.T @ field.grad_n, director_cross(field.n, de)


def variational_residual(T, M, field: NematicField, theta, rho, grad_v, grad_omega,
                         c: GasConstants) -> float:
    """``(-T - de^T grad_n) : grad_v + (-M + n x de) : grad_omega``."""
    de = energy_gradient(theta, rho, field, c)
    a = -np.asarray(T, dtype=float) - de.T @ field.grad_n
    b = -np.asarray(M, dtype=float) + director_cross(field.n, de)
    return float(np.sum(a * grad_v) + np.sum(b * grad_omega))


@dataclass(frozen=True)
class LeslieComparison:
    derived_stress: np.ndarray   # -T* from the energy derivative: p lam grad_n^T grad_n
    printed_stress: np.ndarray   # p (lam/2) grad_n^T grad_n in the momentum equation
    ratio: float                 # |derived| / |printed|, nan when degenerate
    degenerate: bool

    @property
    def flag(self) -> str:
        return "degenerate" if self.degenerate else f"coefficient ratio {self.ratio:.12g}"


def leslie_stress_comparison(field: NematicField, theta, rho, c: GasConstants) -> LeslieComparison:
    T_star, _ = ericksen_fluxes(field, theta, rho, c)
    p = rho * c.R_s * theta
    G = field.grad_n
    printed = p * 0.5 * field.lambda_inertia * G.T @ G
    derived = -T_star
    norm_p = np.linalg.norm(printed)
    if norm_p == 0.0:
        return LeslieComparison(derived, printed, float("nan"), True)
    return LeslieComparison(derived, printed, float(np.linalg.norm(derived) / norm_p), False)
