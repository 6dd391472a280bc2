"""Equilibrium thermodynamics of the monatomic ideal gas.

Sign convention: :class:`AffinitySet` stores ``g_theta = -grad(theta)/theta``,
so the entropy production is ``[(T + pI) : D + Q . g_theta] / theta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .quadrature import GasConstants


def _positive(**kwargs):
    for name, value in kwargs.items():
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}")


def deviator(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    return A - np.trace(A) / 3.0 * np.eye(3)


def sym(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    return 0.5 * (A + A.T)


def equilibrium_entropy(rho, e, c: GasConstants) -> float:
    """Specific entropy ``eta(rho, e)`` of the local Maxwellian."""
    _positive(rho=rho, e=e)
    return c.R_s * (1.5 * math.log(2.0 / 3.0 * e * rho ** (-2.0 / 3.0)) + c.entropy_constant)


def internal_energy_from_entropy(rho, eta, c: GasConstants) -> float:
    """Inverse of :func:`equilibrium_entropy` at fixed density."""
    _positive(rho=rho)
    return 1.5 * rho ** (2.0 / 3.0) * math.exp(2.0 / 3.0 * (eta / c.R_s - c.entropy_constant))


def temperature(e, c: GasConstants) -> float:
    _positive(e=e)
    return 2.0 * e / (3.0 * c.R_s)


def pressure(rho, e, c: GasConstants | None = None) -> float:
    _positive(rho=rho, e=e)
    return 2.0 / 3.0 * rho * e


def mechanical_pressure(T) -> float:
    """Spherical part of the stress, ``tr(T)/3``."""
    return float(np.trace(np.asarray(T, dtype=float))) / 3.0


@dataclass(frozen=True)
class ThermoPoint:
    rho: float
    e: float
    eta: float
    theta: float
    T_em: float
    p: float

    @classmethod
    def from_rho_e(cls, rho, e, c: GasConstants) -> "ThermoPoint":
        theta = temperature(e, c)
        return cls(rho, e, equilibrium_entropy(rho, e, c), theta, c.R_s * theta,
                   pressure(rho, e))


@dataclass(frozen=True)
class AffinitySet:
    Dd: np.ndarray
    D_full: np.ndarray
    g_theta: np.ndarray

    @classmethod
    def from_gradients(cls, D_full, grad_theta, theta) -> "AffinitySet":
        _positive(theta=theta)
        D = sym(D_full)
        return cls(deviator(D), D, -np.asarray(grad_theta, dtype=float) / theta)

    @classmethod
    def from_deviator(cls, Dd, g_theta) -> "AffinitySet":
        Dd = deviator(sym(Dd))
        return cls(Dd, Dd.copy(), np.asarray(g_theta, dtype=float))

    def grad_theta(self, theta) -> np.ndarray:
        return -theta * self.g_theta

    def scaled(self, s) -> "AffinitySet":
        return AffinitySet(s * self.Dd, s * self.D_full, s * self.g_theta)


@dataclass(frozen=True)
class FluxSet:
    T: np.ndarray
    Q: np.ndarray

    def irreversible_stress(self, p) -> np.ndarray:
        return self.T + p * np.eye(3)


def clausius_duhem_production(F: FluxSet, A: AffinitySet, p, theta) -> float:
    """Entropy production ``xi`` from the flux/affinity pairing."""
    _positive(theta=theta)
    stress_work = float(np.tensordot(F.T + p * np.eye(3), A.D_full))
    return (stress_work + float(np.dot(F.Q, A.g_theta))) / theta


def counterexample_fluxes(A: AffinitySet, p, theta, alpha) -> FluxSet:
    """Zero-production fluxes ``T = -pI - a grad(th) grad(th)``, ``Q = -a th D grad(th)``."""
    gt = A.grad_theta(theta)
    return FluxSet(-p * np.eye(3) - alpha * np.outer(gt, gt), -alpha * theta * A.D_full @ gt)
