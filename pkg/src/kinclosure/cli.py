"""Command-line entry point.

Exit codes: 0 when every check passes, 1 on a failed check or solver error,
2 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import asdict, replace

import numpy as np

from . import bgk_sim, closure, kernel_scaling, report, verify
from .chapman_enskog import transport_coefficients
from .errors import (
    ConfigurationError,
    DomainError,
    InvalidArgumentError,
    KinClosureError,
    NonConvexProducerError,
)
from .quadrature import GasConstants
from .thermo import AffinitySet

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _emit(payload, out):
    text = report.dumps(payload)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _floats(n):
    def parse(s):
        try:
            vals = [float(x) for x in s.replace(",", " ").split()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {n} numbers, got {s!r}")
        if len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} numbers, got {len(vals)}")
        return np.array(vals)
    return parse


def cmd_verify(args) -> int:
    names = verify.SUITES if args.suite == "all" else (args.suite,)
    reports = [verify.run_suite(n, seed=args.seed, tolerance_scale=args.tolerance_scale)
               for n in names]
    payload = {
        "schema_version": report.SCHEMA_VERSION,
        "seed": args.seed,
        "tolerance_scale": args.tolerance_scale,
        "pass": all(r.passed for r in reports),
        "suites": [r.as_dict(timing=args.timing) for r in reports],
    }
    _emit(payload, args.out)
    for r in reports:
        for c in r.checks:
            if not c.passed:
                print(f"FAIL {r.suite}/{c.id}: {c.value:.3g} (tol {c.tolerance:.3g})", file=sys.stderr)
    return EXIT_OK if payload["pass"] else EXIT_FAIL


def _shear_summary(cfg: bgk_sim.SimConfig, diag: bgk_sim.Diagnostics):
    control = bgk_sim.run(replace(cfg, tau_model=bgk_sim.TauModel("constant", 0.0), dt=diag.dt))
    ic = cfg.initial_condition
    rho, theta = ic.get("rho", 1.0), ic.get("theta", 1.0)
    k = 2.0 * math.pi * ic.get("mode", 1) / cfg.domain_length
    tau = float(cfg.tau_model.evaluate(np.array([rho]), np.array([theta]), cfg.gas)[0])
    t_start = min(10.0 * tau, 0.5 * cfg.t_end)
    nu = bgk_sim.measure_shear_decay(diag, k, rho, control, t_start)
    expected = tau * rho * cfg.gas.R_s * theta
    return {"nu_effective": nu, "nu_expected": expected,
            "rel_error": abs(nu - expected) / expected,
            "decay_rate": bgk_sim.decay_rate(diag.t, diag.amp_shear, t_start),
            "control_decay_rate": bgk_sim.decay_rate(control.t, control.amp_shear, t_start)}


def cmd_simulate(args) -> int:
    cfg = bgk_sim.load_config(args.config)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    t0 = time.perf_counter()
    diag = bgk_sim.run(cfg)
    summary = {"schema_version": report.SCHEMA_VERSION, "config": _config_dict(cfg)}
    summary.update(diag.summary())
    if cfg.initial_condition.preset == "shear_wave" and diag.n_steps:
        summary["shear"] = _shear_summary(cfg, diag)
    if args.timing:
        summary["runtime_s"] = time.perf_counter() - t0
    diag.write_csv(os.path.join(out, "series.csv"))
    report.dump(summary, os.path.join(out, "summary.json"))
    print(f"wrote {os.path.join(out, 'series.csv')} and summary.json ({diag.n_steps} steps)")
    return EXIT_OK


def _config_dict(cfg):
    d = asdict(cfg)
    d["initial_condition"] = {"preset": cfg.initial_condition.preset,
                              **cfg.initial_condition.params}
    return d


def cmd_closure(args) -> int:
    c = GasConstants()
    theta, p = args.theta, args.p
    co = transport_coefficients(args.tau, p, c)
    if args.nu is not None or args.kappa is not None:
        co = type(co)(args.nu if args.nu is not None else co.nu,
                      args.kappa if args.kappa is not None else co.kappa)
    if args.D is not None:
        A = AffinitySet.from_gradients(args.D.reshape(3, 3), args.grad_theta, theta)
    else:
        A = AffinitySet.from_deviator(args.Dd.reshape(3, 3), -args.grad_theta / theta)
    a = closure.flatten_affinities(A)

    k = np.concatenate([np.full(5, 2.0 * co.nu), np.full(3, co.kappa * theta)])
    iota_value = args.tau * float(a @ (k * a))
    if args.producer == "quadratic":
        spec = closure.ProducerSpec.quadratic(co.nu, co.kappa, theta, args.tau, args.alpha,
                                              iota=lambda A_: iota_value)
    else:
        spec = closure.ProducerSpec.quartic(args.epsilon, args.alpha, iota=lambda A_: iota_value)

    if not np.any(a):
        J, tau_star = np.zeros(8), float("nan")
    else:
        J = closure.rs_closure_numeric(spec, a)
        _, tau_star = closure.min_relaxation_closure(spec, a)
    F = closure.unflatten_fluxes(J, p)
    theta_xi = spec.value(J, a)
    payload = {
        "schema_version": report.SCHEMA_VERSION,
        "producer": args.producer,
        "nu": co.nu, "kappa": co.kappa, "theta": theta, "p": p, "alpha": args.alpha,
        "T": F.T, "T_plus_pI": F.T + p * np.eye(3), "Q": F.Q,
        "theta_xi": theta_xi,
        "constraint_residual": theta_xi - float(J @ a),
        "tau_star": tau_star,
    }
    if args.producer == "quadratic":
        ref = closure.rs_closure_quadratic(A, co, theta, p)
        payload["closed_form_deviation"] = float(
            np.linalg.norm(F.T - ref.T) + np.linalg.norm(F.Q - ref.Q))
    _emit(payload, args.out)
    return EXIT_OK


def cmd_scaling(args) -> int:
    c = GasConstants()
    rows = []
    ok = True
    for lam in args.lam:
        spec = kernel_scaling.KernelSpec(lam, args.b_bar)
        slope = kernel_scaling.fit_temperature_exponent(spec, c, args.rho, method="quadrature")
        err = abs(slope - lam / 2.0)
        passed = err <= 1e-3 * args.tolerance_scale
        ok &= passed
        row = {"lambda": lam, "fitted_exponent": slope, "expected": lam / 2.0, "pass": passed,
               "collision_frequency_theta1": kernel_scaling.collision_frequency(spec, args.rho, 1.0, c)}
        if lam > 0:
            te = kernel_scaling.transport_scaling_exponent(lam)
            row["transport_exponent"] = te.exponent
            row["transport_flag"] = te.flag
        else:
            row["transport_exponent"] = None
            row["transport_flag"] = "undefined-at-lambda-0"
        rows.append(row)
    _emit({"schema_version": report.SCHEMA_VERSION, "pass": ok, "kernels": rows}, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance-scale", type=float, default=1.0,
                        help="multiply default tolerances by this factor")
    common.add_argument("--out", default=None,
                        help="output file (JSON commands) or directory (simulate)")
    common.add_argument("--seed", type=int, default=verify.DEFAULT_SEED,
                        help="seed for randomized property suites")
    common.add_argument("--timing", action="store_true",
                        help="include wall-clock runtime in the output (not reproducible)")

    parser = argparse.ArgumentParser(prog="kinclosure", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("suite", choices=verify.SUITES + ("all",))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", parents=[common], help="run the BGK solver from a config file")
    p.add_argument("config")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("closure", parents=[common], help="evaluate the entropy-production closure")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--Dd", type=_floats(9), default=np.zeros(9),
                   help="deviatoric strain rate, 9 row-major numbers")
    g.add_argument("--D", type=_floats(9), default=None,
                   help="velocity gradient, 9 row-major numbers (symmetrized)")
    p.add_argument("--grad-theta", type=_floats(3), default=np.zeros(3))
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--nu", type=float, default=None, help="override nu = tau p")
    p.add_argument("--kappa", type=float, default=None, help="override kappa = 5/2 R_s tau p")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--producer", choices=("quadratic", "quartic"), default="quadratic")
    p.add_argument("--epsilon", type=float, default=0.0, help="quartic coefficient")
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("scaling", parents=[common], help="power-law kernel scaling fits")
    p.add_argument("--lam", type=float, nargs="+", default=[0.0, 1.0, 2.0, 3.0])
    p.add_argument("--b-bar", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=1.0)
    p.set_defaults(func=cmd_scaling)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, NonConvexProducerError, InvalidArgumentError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KinClosureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
