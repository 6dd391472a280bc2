"""Collision frequency and transport scaling for power-law kernels ``B = b(beta) |w|^lambda``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln

from .errors import DomainError, InvalidArgumentError
from .quadrature import GasConstants

FIT_TEMPERATURES = (0.5, 1.0, 2.0, 4.0)
# |w|/sigma beyond 12 carries < 1e-30 of the Maxwellian mass
_RADIAL_CUTOFF = 12.0
_RADIAL_NODES = 96


@dataclass(frozen=True)
class KernelSpec:
    lam: float
    b_bar: float = 1.0

    def __post_init__(self):
        if not self.lam >= 0:
            raise InvalidArgumentError(f"kernel exponent must be >= 0, got {self.lam}")
        if not self.b_bar > 0:
            raise InvalidArgumentError("b_bar must be positive")


def mean_speed_power_closed_form(lam, sigma2) -> float:
    """``E|w|^lam`` for a Maxwellian with per-axis variance ``sigma2``."""
    return math.exp(0.5 * lam * math.log(2.0 * sigma2)
                    + gammaln(0.5 * (lam + 3.0)) - gammaln(1.5))


def mean_speed_power_quadrature(lam, sigma2, n_nodes=_RADIAL_NODES) -> float:
    """Radial Gauss-Legendre quadrature of ``E|w|^lam``.

    With ``|w| = sigma t`` and ``t = s^2`` the integrand
    ``2 s^(5 + 2 lam) exp(-s^4/2)`` is smooth at the origin for every
    ``lam >= 0``.
    """
    x, w = leggauss(n_nodes)
    s_max = math.sqrt(_RADIAL_CUTOFF)
    s = 0.5 * s_max * (x + 1.0)
    integrand = 2.0 * s ** (5.0 + 2.0 * lam) * np.exp(-0.5 * s ** 4)
    radial = 0.5 * s_max * float(w @ integrand)
    return math.sqrt(2.0 / math.pi) * sigma2 ** (0.5 * lam) * radial


def collision_frequency(spec: KernelSpec, rho, theta, c: GasConstants, method="closed") -> float:
    """``1/tau = b_bar (rho/m) E|w|^lam`` under the local Maxwellian."""
    if not (rho > 0 and theta > 0):
        raise DomainError("rho and theta must be positive")
    sigma2 = c.R_s * theta
    if method == "closed":
        moment = mean_speed_power_closed_form(spec.lam, sigma2)
    elif method == "quadrature":
        moment = mean_speed_power_quadrature(spec.lam, sigma2)
    else:
        raise InvalidArgumentError(f"unknown method {method!r}")
    return spec.b_bar * rho / c.m * moment


def fit_temperature_exponent(spec: KernelSpec, c: GasConstants, rho=1.0,
                             temperatures=FIT_TEMPERATURES, method="closed") -> float:
    """Slope of ``log(1/tau)`` against ``log(theta)`` at fixed density."""
    th = np.asarray(temperatures, dtype=float)
    freq = [collision_frequency(spec, rho, t, c, method) for t in th]
    return float(np.polyfit(np.log(th), np.log(freq), 1)[0])


@dataclass(frozen=True)
class TransportExponent:
    exponent: float
    in_range: bool

    @property
    def flag(self) -> str:
        return "ok" if self.in_range else "outside-validity-range"


def transport_scaling_exponent(lam) -> TransportExponent:
    """Exponent of ``rho tau`` in ``nu ~ R_s (rho tau)^(1 - 2/lam)``.

    The flag marks ``1 <= lam < 2`` as the range where the inverse scaling
    is known to hold.
    """
    if lam == 0:
        raise DomainError("transport exponent 1 - 2/lam is undefined at lam = 0")
    if not lam > 0:
        raise DomainError(f"kernel exponent must be positive, got {lam}")
    return TransportExponent(1.0 - 2.0 / lam, 1.0 <= lam < 2.0)
