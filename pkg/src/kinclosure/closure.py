"""Selection of constitutive closures from an entropy-production function.

Fluxes and affinities are handled as flat 8-vectors: five coordinates of a
symmetric traceless tensor in an orthonormal basis (so the flat dot product
equals the double contraction) followed by three vector components.

    J = [ (T + pI)^d , Q ]          A = [ Dd , -grad(theta)/theta ]

The producer functions below return ``theta * xi``; the balance-law
constraint is ``theta * xi = J . A``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .chapman_enskog import TransportCoefficients, transport_coefficients
from .errors import ConvergenceError, InvalidArgumentError, NonConvexProducerError
from .quadrature import GasConstants
from .thermo import AffinitySet, FluxSet, clausius_duhem_production, deviator

_S2, _S6 = math.sqrt(2.0), math.sqrt(6.0)

# orthonormal basis of symmetric traceless 3x3 tensors under A:B
DEVIATOR_BASIS = np.array([
    np.diag([1.0, -1.0, 0.0]) / _S2,
    np.diag([1.0, 1.0, -2.0]) / _S6,
    (np.eye(3)[[0]].T @ np.eye(3)[[1]] + np.eye(3)[[1]].T @ np.eye(3)[[0]]) / _S2,
    (np.eye(3)[[0]].T @ np.eye(3)[[2]] + np.eye(3)[[2]].T @ np.eye(3)[[0]]) / _S2,
    (np.eye(3)[[1]].T @ np.eye(3)[[2]] + np.eye(3)[[2]].T @ np.eye(3)[[1]]) / _S2,
])

N_FLAT = 8
STRESS = slice(0, 5)
HEAT = slice(5, 8)


def flatten_deviator(S) -> np.ndarray:
    return np.tensordot(DEVIATOR_BASIS, np.asarray(S, dtype=float), axes=([1, 2], [0, 1]))


def unflatten_deviator(s) -> np.ndarray:
    return np.tensordot(np.asarray(s, dtype=float), DEVIATOR_BASIS, axes=1)


def flatten_affinities(A: AffinitySet) -> np.ndarray:
    return np.concatenate([flatten_deviator(A.Dd), A.g_theta])


def unflatten_affinities(a) -> AffinitySet:
    a = np.asarray(a, dtype=float)
    return AffinitySet.from_deviator(unflatten_deviator(a[STRESS]), a[HEAT])


def flatten_fluxes(F: FluxSet, p) -> np.ndarray:
    """Flat flux vector; the spherical part of ``T + pI`` is dropped."""
    return np.concatenate([flatten_deviator(deviator(F.T + p * np.eye(3))), F.Q])


def unflatten_fluxes(j, p=0.0) -> FluxSet:
    j = np.asarray(j, dtype=float)
    return FluxSet(-p * np.eye(3) + unflatten_deviator(j[STRESS]), j[HEAT].copy())


def _quadratic_weights(nu, kappa, theta):
    # theta*xi(A) = A.K.A in affinity space, with K = diag(2 nu, kappa theta)
    return np.concatenate([np.full(5, 2.0 * nu), np.full(3, kappa * theta)])


@dataclass(frozen=True)
class ProducerSpec:
    """Entropy-production function ``theta*xi(J, A)`` with its relaxation structure.

    ``iota`` and ``alpha`` describe the factorization
    ``theta*xi(J, A) = iota(A) / tau(J, A)**alpha`` used by the minimal
    relaxation-time route.  ``hess`` is optional; without it the Hessian is
    taken by central differences of ``grad``.
    """

    value: Callable[[np.ndarray, np.ndarray], float]
    grad: Callable[[np.ndarray, np.ndarray], np.ndarray]
    iota: Callable[[np.ndarray], float]
    hess: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    alpha: float = 1.0
    kind: str = "custom-convex"
    coeffs: Optional[tuple] = field(default=None)

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidArgumentError("alpha must be positive")

    def hessian(self, J, A) -> np.ndarray:
        if self.hess is not None:
            return np.asarray(self.hess(J, A), dtype=float)
        n = len(J)
        H = np.empty((n, n))
        for i in range(n):
            h = 1e-6 * max(1.0, abs(J[i]))
            dJ = np.zeros(n)
            dJ[i] = h
            H[:, i] = (self.grad(J + dJ, A) - self.grad(J - dJ, A)) / (2 * h)
        return 0.5 * (H + H.T)

    def relaxation_time(self, J, A) -> float:
        return (self.iota(A) / self.value(J, A)) ** (1.0 / self.alpha)

    @classmethod
    def quadratic(cls, nu, kappa, theta, tau=1.0, alpha=1.0, iota=None) -> "ProducerSpec":
        """Navier-Stokes-Fourier producer ``|S|^2/(2 nu) + |Q|^2/(kappa theta)``.

        By default ``iota = tau**alpha A.K.A`` so the minimal relaxation time
        equals ``tau`` for every ``alpha``; pass ``iota`` to hold the numerator
        fixed instead.
        """
        if not (nu > 0 and kappa > 0 and theta > 0):
            raise InvalidArgumentError("quadratic producer needs nu, kappa, theta > 0")
        k = _quadratic_weights(nu, kappa, theta)
        minv = 2.0 / k          # diagonal of the flux-space quadratic form

        return cls(
            value=lambda J, A: 0.5 * float(J @ (minv * J)),
            grad=lambda J, A: minv * J,
            hess=lambda J, A: np.diag(minv),
            iota=iota if iota is not None else (lambda A: tau ** alpha * float(A @ (k * A))),
            alpha=alpha, kind="quadratic", coeffs=(nu, kappa, theta, tau),
        )

    @classmethod
    def quartic(cls, epsilon, alpha=1.0, iota=None) -> "ProducerSpec":
        """``|J|^2/2 + epsilon |J|^4``; non-convex for ``epsilon < 0``."""
        if iota is None:
            iota = lambda A: float(A @ A)

        def hess(J, A):
            n = len(J)
            return (1.0 + 4.0 * epsilon * float(J @ J)) * np.eye(n) + 8.0 * epsilon * np.outer(J, J)

        return cls(
            value=lambda J, A: 0.5 * float(J @ J) + epsilon * float(J @ J) ** 2,
            grad=lambda J, A: (1.0 + 4.0 * epsilon * float(J @ J)) * J,
            hess=hess, iota=iota, alpha=alpha, kind="quartic", coeffs=(epsilon,),
        )


def _check_convex(spec: ProducerSpec, J, A, where):
    eig = np.linalg.eigvalsh(spec.hessian(J, A))
    if eig[0] < -1e-10 * max(1.0, abs(eig[-1])):
        raise NonConvexProducerError(
            f"producer is not convex at the {where} (min Hessian eigenvalue {eig[0]:.3g})")


def feasible_scaling(spec: ProducerSpec, A, d) -> float:
    """Largest ``t > 0`` with ``value(t d) = t d.A``, i.e. where the ray leaves the feasible set."""
    da = float(d @ A)

    def h(t):
        return spec.value(t * d, A) - t * da

    t_hi = 1.0
    while h(t_hi) <= 0:
        _check_convex(spec, t_hi * d, A, "search ray")
        t_hi *= 2.0
        if t_hi > 1e12:
            raise ConvergenceError("feasible set is unbounded along the search ray")
    res = optimize.minimize_scalar(h, bounds=(0.0, t_hi), method="bounded",
                                   options={"xatol": 1e-14 * t_hi})
    if res.fun >= 0:
        raise ConvergenceError("empty feasible set: producer stays above J.A along the ray",
                               residual=float(res.fun))
    return optimize.brentq(h, res.x, t_hi, xtol=1e-15 * t_hi, rtol=4 * np.finfo(float).eps)


def _kkt_newton(obj_grad, obj_hess, spec: ProducerSpec, A, J0, max_iter=100, tol=1e-12):
    """Newton iteration on the KKT system of ``extremize obj(J) s.t. value(J) = J.A``."""
    J = J0.copy()
    n = len(J)
    cg = spec.grad(J, A) - A
    og = obj_grad(J)
    lam = -float(og @ cg) / float(cg @ cg)

    def residual(J, lam):
        cg = spec.grad(J, A) - A
        return np.concatenate([obj_grad(J) + lam * cg, [spec.value(J, A) - J @ A]])

    r = residual(J, lam)
    scale = 1.0 + np.linalg.norm(og) + np.linalg.norm(A) * (1.0 + np.linalg.norm(J))
    for _ in range(max_iter):
        rn = np.linalg.norm(r)
        if rn <= tol * scale:
            return J, lam
        cg = spec.grad(J, A) - A
        K = np.zeros((n + 1, n + 1))
        K[:n, :n] = obj_hess(J) + lam * spec.hessian(J, A)
        K[:n, n] = K[n, :n] = cg
        try:
            step = np.linalg.solve(K, -r)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(K, -r, rcond=None)[0]
        s = 1.0
        while s > 1e-8:
            Jn, ln = J + s * step[:n], lam + s * step[n]
            rn_new = residual(Jn, ln)
            if np.linalg.norm(rn_new) < (1.0 - 1e-4 * s) * rn or rn <= 10 * tol * scale:
                break
            s *= 0.5
        J, lam, r = Jn, ln, rn_new
        scale = 1.0 + np.linalg.norm(obj_grad(J)) + np.linalg.norm(A) * (1.0 + np.linalg.norm(J))
    raise ConvergenceError(f"KKT Newton did not converge in {max_iter} iterations",
                           residual=float(np.linalg.norm(r)))


def _initial_guess(spec: ProducerSpec, A) -> np.ndarray:
    d = np.asarray(A, dtype=float) / np.linalg.norm(A)
    return feasible_scaling(spec, A, d) * d


def rs_closure_numeric(spec: ProducerSpec, A, max_iter=100, tol=1e-12) -> np.ndarray:
    """Maximize ``theta*xi(J, A)`` over ``J`` subject to ``theta*xi = J.A``."""
    A = np.asarray(A, dtype=float)
    if not np.any(A):
        return np.zeros_like(A)
    J0 = _initial_guess(spec, A)
    _check_convex(spec, J0, A, "initial guess")
    # maximization written as minimization of -value
    J, _ = _kkt_newton(lambda J: -spec.grad(J, A), lambda J: -spec.hessian(J, A),
                       spec, A, J0, max_iter, tol)
    _check_convex(spec, J, A, "solution")
    return J


def min_relaxation_closure(spec: ProducerSpec, A, max_iter=100, tol=1e-12):
    """Minimize ``tau(J, A) = (iota(A)/theta*xi(J, A))**(1/alpha)`` over the feasible set.

    Returns ``(J, tau_star)``.
    """
    A = np.asarray(A, dtype=float)
    if not np.any(A):
        return np.zeros_like(A), float("nan")
    a = 1.0 / spec.alpha
    iota = spec.iota(A)
    if not iota > 0:
        raise InvalidArgumentError("iota(A) must be positive for A != 0")

    def tau_grad(J):
        v = spec.value(J, A)
        return -a * (iota / v) ** a / v * spec.grad(J, A)

    def tau_hess(J):
        v = spec.value(J, A)
        g = spec.grad(J, A)
        t = (iota / v) ** a
        return t * (a * (a + 1.0) / v ** 2 * np.outer(g, g) - a / v * spec.hessian(J, A))

    J0 = _initial_guess(spec, A)
    _check_convex(spec, J0, A, "initial guess")
    # tau is scale-free in iota; normalize so the KKT tolerance is relative
    J, _ = _kkt_newton(lambda J: tau_grad(J) / spec.relaxation_time(J0, A),
                       lambda J: tau_hess(J) / spec.relaxation_time(J0, A),
                       spec, A, J0, max_iter, tol)
    _check_convex(spec, J, A, "solution")
    return J, spec.relaxation_time(J, A)


def rs_closure_quadratic(A: AffinitySet, coeffs: TransportCoefficients, theta, p=0.0) -> FluxSet:
    """Closed-form maximizer for the quadratic producer (Lagrange multiplier -2).

    Returns ``T = -pI + 2 nu Dd`` and ``Q = kappa theta g_theta = -kappa grad(theta)``;
    with the default ``p = 0`` the stress field holds ``T + pI``.
    """
    return FluxSet(-p * np.eye(3) + 2.0 * coeffs.nu * A.Dd, coeffs.kappa * theta * A.g_theta)


def rs_affinity_space_quadratic(J, coeffs: TransportCoefficients, theta) -> np.ndarray:
    """Dual form: maximize ``theta*xi(A) = 2 nu |Dd|^2 + kappa theta |g|^2`` over ``A``
    with the fluxes ``J`` held fixed, subject to ``theta*xi = J.A``."""
    k = _quadratic_weights(coeffs.nu, coeffs.kappa, theta)
    dual = ProducerSpec(
        value=lambda A, J_: float(A @ (k * A)),
        grad=lambda A, J_: 2.0 * k * A,
        hess=lambda A, J_: np.diag(2.0 * k),
        iota=lambda J_: 1.0,
    )
    return rs_closure_numeric(dual, np.asarray(J, dtype=float))


def quadratic_entropy_production(A: AffinitySet, coeffs: TransportCoefficients, theta) -> float:
    """``theta * xi = 2 nu Dd:Dd + kappa |grad theta|^2 / theta`` as a function of affinities."""
    return (2.0 * coeffs.nu * float(np.tensordot(A.Dd, A.Dd))
            + coeffs.kappa * theta * float(A.g_theta @ A.g_theta))


def linear_irreversible_closure(A: AffinitySet, coeffs: TransportCoefficients, theta,
                                p=0.0) -> FluxSet:
    """The symmetric linear flux-affinity map with ``J.A = theta*xi(A)`` for every ``A``.

    The matrix is recovered from the production function by polarization, so
    this route never uses the Lagrange condition.
    """
    def prod(a):
        return quadratic_entropy_production(unflatten_affinities(a), coeffs, theta)

    E = np.eye(N_FLAT)
    diag = np.array([prod(E[i]) for i in range(N_FLAT)])
    L = np.diag(diag)
    for i in range(N_FLAT):
        for j in range(i + 1, N_FLAT):
            L[i, j] = L[j, i] = 0.5 * (prod(E[i] + E[j]) - diag[i] - diag[j])
    return unflatten_fluxes(L @ flatten_affinities(A), p)


def alternative_closure(A: AffinitySet, coeffs: TransportCoefficients, theta, alpha,
                        p=0.0) -> FluxSet:
    """Nonlinear closure with the same entropy production as Navier-Stokes-Fourier."""
    gt = A.grad_theta(theta)
    return FluxSet(-p * np.eye(3) + 2.0 * coeffs.nu * A.Dd - alpha * np.outer(gt, gt),
                   -coeffs.kappa * gt - alpha * theta * A.D_full @ gt)


@dataclass(frozen=True)
class LinearityReport:
    additive_defect: float
    homogeneity_defect: float
    constraint_defect: float
    tolerance: float

    @property
    def linear(self) -> bool:
        return self.additive_defect <= self.tolerance and self.homogeneity_defect <= self.tolerance

    @property
    def accepted(self) -> bool:
        return self.linear and self.constraint_defect <= self.tolerance


def check_linear_irreversible(closure, coeffs: TransportCoefficients, theta,
                              rng: np.random.Generator, n_trials=10, tol=1e-10) -> LinearityReport:
    """Test a closure ``closure(A, coeffs, theta) -> FluxSet`` (irreversible stress, ``p = 0``)
    for additivity, homogeneity and the production identity on random affinities."""
    def J(a):
        F = closure(a, coeffs, theta)
        return np.concatenate([F.T.ravel(), F.Q])

    def rand():
        return AffinitySet.from_gradients(rng.uniform(-1, 1, (3, 3)), rng.uniform(-1, 1, 3), theta)

    add = hom = con = 0.0
    for _ in range(n_trials):
        a1, a2 = rand(), rand()
        s = rng.uniform(-3, 3)
        a12 = AffinitySet(a1.Dd + a2.Dd, a1.D_full + a2.D_full, a1.g_theta + a2.g_theta)
        ref = np.linalg.norm(J(a1)) + np.linalg.norm(J(a2))
        add = max(add, np.linalg.norm(J(a12) - J(a1) - J(a2)) / ref)
        hom = max(hom, np.linalg.norm(J(a1.scaled(s)) - s * J(a1)) / (abs(s) * ref))
        prod = quadratic_entropy_production(a1, coeffs, theta)
        got = theta * clausius_duhem_production(closure(a1, coeffs, theta), a1, 0.0, theta)
        con = max(con, abs(got - prod) / prod)
    return LinearityReport(add, hom, con, tol)


def bgk_relaxation_time_model(rho, theta, c: GasConstants, C_B=1.0) -> float:
    """Hard-sphere relaxation time, ``1/tau = C_B rho sqrt(R_s theta)``."""
    if not (rho > 0 and theta > 0 and C_B > 0):
        raise InvalidArgumentError("rho, theta and C_B must be positive")
    return 1.0 / (C_B * rho * math.sqrt(c.R_s * theta))


def theta_from_relaxation_time(rho, tau, c: GasConstants, C_B=1.0) -> float:
    return (C_B * rho * tau) ** -2 / c.R_s


def iota_hard_sphere(A: AffinitySet, rho, theta, c: GasConstants, C_B=1.0) -> float:
    """Numerator of ``theta*xi = iota / tau`` once ``theta`` is eliminated via the hard-sphere law."""
    grad_theta = A.grad_theta(theta)
    k = 1.0 / (C_B ** 2 * rho)
    return (2.0 * k * float(np.tensordot(A.Dd, A.Dd))
            + 2.5 * c.R_s * k * float(grad_theta @ grad_theta) / theta)


def relaxation_time_from_knudsen(Kn, length, theta, c: GasConstants) -> float:
    """``tau = Kn L / V_theta`` with the most probable speed ``V_theta = sqrt(2 R_s theta)``."""
    return Kn * length / math.sqrt(2.0 * c.R_s * theta)


def euler_limit(A: AffinitySet, rho, theta, c: GasConstants, length=1.0,
                kn_values=(1e-2, 1e-3, 1e-4), closure=rs_closure_quadratic) -> FluxSet:
    """Zero-Knudsen limit of the first-order closure, by linear extrapolation in ``Kn``."""
    p = rho * c.R_s * theta
    kn = np.asarray(kn_values, dtype=float)
    rows = []
    for k in kn:
        tau = relaxation_time_from_knudsen(k, length, theta, c)
        F = closure(A, transport_coefficients(tau, p, c), theta)
        rows.append(np.concatenate([F.T.ravel(), F.Q]))
    coef = np.polyfit(kn, np.array(rows), 1)
    intercept = coef[1]
    return FluxSet(-p * np.eye(3) + intercept[:9].reshape(3, 3), intercept[9:])


def kn_sweep(A: AffinitySet, rho, theta, c: GasConstants, length=1.0,
             kn_values=(1e-2, 1e-3, 1e-4), closure=rs_closure_quadratic):
    """Norms ``(|T + pI|, |Q|)`` of the closure along a Knudsen sequence."""
    p = rho * c.R_s * theta
    out = []
    for k in kn_values:
        tau = relaxation_time_from_knudsen(k, length, theta, c)
        F = closure(A, transport_coefficients(tau, p, c), theta)
        out.append((float(np.linalg.norm(F.T)), float(np.linalg.norm(F.Q))))
    return np.array(out)


def sample_feasible(spec: ProducerSpec, A, n_samples, rng: np.random.Generator,
                    batch=200_000):
    """Brute-force points on the feasible set for the quadratic producer.

    Random directions are scaled to the boundary ``value(J) = J.A``; returns
    ``(max value, min relaxation time)`` over the samples.
    """
    if spec.kind != "quadratic" or len(A) != N_FLAT:
        raise InvalidArgumentError("vectorized sampling needs a full quadratic producer")
    nu, kappa, theta, _ = spec.coeffs
    return _sample_quadratic(2.0 / _quadratic_weights(nu, kappa, theta), spec, A,
                             n_samples, rng, batch)


def _sample_quadratic(minv, spec, A, n_samples, rng, batch):
    best_val, best_tau = -np.inf, np.inf
    iota = spec.iota(A)
    done = 0
    while done < n_samples:
        m = min(batch, n_samples - done)
        d = rng.standard_normal((m, len(A)))
        da = d @ A
        d[da < 0] *= -1
        da = np.abs(da)
        t = 2.0 * da / np.einsum("ij,j,ij->i", d, minv, d)
        val = t * da
        best_val = max(best_val, float(val.max()))
        best_tau = min(best_tau, float(((iota / val) ** (1.0 / spec.alpha)).min()))
        done += m
    return best_val, best_tau


@dataclass(frozen=True)
class ReducedInstance:
    """Five-dimensional quadratic problem: diagonal deviatoric stress (2) + heat flux (3)."""

    nu: float
    kappa: float
    theta: float
    A: np.ndarray

    @property
    def weights(self) -> np.ndarray:
        return np.concatenate([np.full(2, 2.0 * self.nu), np.full(3, self.kappa * self.theta)])

    def spec(self, tau=1.0, alpha=1.0) -> ProducerSpec:
        k = self.weights
        minv = 2.0 / k
        return ProducerSpec(
            value=lambda J, A: 0.5 * float(J @ (minv * J)),
            grad=lambda J, A: minv * J,
            hess=lambda J, A: np.diag(minv),
            iota=lambda A: tau ** alpha * float(A @ (k * A)),
            alpha=alpha, kind="quadratic-reduced", coeffs=(self.nu, self.kappa, self.theta, tau),
        )

    def brute_force(self, n_samples, rng, tau=1.0, alpha=1.0):
        """``(max production, min relaxation time)`` over random feasible points."""
        return _sample_quadratic(2.0 / self.weights, self.spec(tau, alpha), self.A,
                                 n_samples, rng, 200_000)
