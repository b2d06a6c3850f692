"""Command-line interface: constants, evolve, sweep, oracle, compare.

Everything is emitted as CSV (17 significant digits) or JSON; there is
no randomness anywhere, so identical inputs give byte-identical output.
Exit codes: 0 success, 1 usage/config error, 2 oracle failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import magicecho, oracles, phonon
from .core import ConfigError, gypsum_config, parse_config

_LEVEL_TAGS = ("Tp", "T0", "Tm", "S")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        raise _UsageError(message)


def _fmt(value):
    return "{:.17g}".format(float(value))


def _load_config(path):
    if path is None:
        return gypsum_config()
    try:
        with open(path) as handle:
            return parse_config(handle.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def _parse_grid(spec):
    """start:stop:steps -> ascending numpy grid (inclusive endpoints)."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise _UsageError(f"grid {spec!r} must be start:stop:steps")
    try:
        start, stop = float(parts[0]), float(parts[1])
        steps = int(parts[2])
    except ValueError:
        raise _UsageError(f"grid {spec!r} has non-numeric parts") from None
    if steps < 1:
        raise _UsageError("grid steps must be >= 1")
    if steps == 1:
        return np.array([start])
    if stop < start:
        raise _UsageError("grid stop must be >= start")
    return np.linspace(start, stop, steps)


def _open_out(path):
    return open(path, "w", newline="") if path else sys.stdout


def cmd_constants(args):
    cfg = _load_config(args.config)
    rates = phonon.rate_constants(cfg)
    rows = [
        ("Omega0_radps", rates.Omega0),
        ("nu0_Hz", rates.nu0),
        ("nu0_hat_Hz", rates.nu0_hat),
        ("nuD_Hz", rates.nuD),
        ("tau_gamma_s", rates.tau_gamma),
        ("tau_gamma_min_s", rates.tau_gamma_min),
        ("tau_X_s", rates.tau_X),
        ("tau_X_hat_s", rates.tau_X_hat),
        ("tau_echo_s", 2.0 * rates.tau_X),
        ("tau_echo_hat_s", 2.0 * rates.tau_X / 3.0),
        ("sigma_X", rates.sigma_X),
        ("sigma_Xprime", rates.sigma_Xprime),
    ]
    out = _open_out(args.out)
    try:
        writer = csv.writer(out)
        writer.writerow(["quantity", "value"])
        for name, value in rows:
            writer.writerow([name, _fmt(value)])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_evolve(args):
    cfg = _load_config(args.config)
    t_grid = _parse_grid(args.grid)
    if np.any(np.diff(t_grid) <= 0) and len(t_grid) > 1:
        raise _UsageError("t grid must be strictly ascending")
    if t_grid[0] < 0:
        raise _UsageError("t grid must be non-negative")
    sigma0 = phonon.initial_after_pulse(cfg.omega0_larmor, cfg.T,
                                        cfg.constants)
    evolve = phonon.free_sigma if args.mode == "free" else magicecho.me_sigma
    header = ["t_s"]
    for i in _LEVEL_TAGS:
        for j in _LEVEL_TAGS:
            header += [f"re_{i}_{j}", f"im_{i}_{j}"]
    out = _open_out(args.out)
    try:
        writer = csv.writer(out)
        writer.writerow(header)
        for t in t_grid:
            sigma = evolve(cfg, sigma0, float(t), exact_path=args.exact_path)
            row = [_fmt(t)]
            for i in range(4):
                for j in range(4):
                    row += [_fmt(sigma[i, j].real), _fmt(sigma[i, j].imag)]
            writer.writerow(row)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_sweep(args):
    cfg = _load_config(args.config)
    n_grid = _parse_grid(args.n_grid)
    vs_grid = _parse_grid(args.vs_grid)
    out = _open_out(args.out)
    try:
        writer = csv.writer(out)
        writer.writerow(["N", "v_s_mps", "tau_X_s"])
        for n in n_grid:
            for vs in vs_grid:
                sub = gypsum_config(d=cfg.d, a=cfg.a, T=cfg.T,
                                    theta=cfg.theta, N=float(n),
                                    v_s=float(vs))
                rates = phonon.rate_constants(sub)
                writer.writerow([_fmt(n), _fmt(vs), _fmt(rates.tau_X)])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_oracle(args):
    tol = args.tol if args.tol is not None else 1e-8
    reports = oracles.run_suites(which=args.which, tol=tol, quick=args.quick)
    payload = {"reports": reports,
               "failures": sum(r["failures"] for r in reports)}
    out = _open_out(args.out)
    try:
        json.dump(payload, out, indent=2, sort_keys=True)
        out.write("\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 2 if payload["failures"] else 0


def cmd_compare(args):
    cfg = _load_config(args.config)
    try:
        with open(args.data) as handle:
            records = magicecho.load_experiment_csv(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read data {args.data}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    report = magicecho.compare_experiment(records, cfg.v_s, cfg.N)
    out = _open_out(args.out)
    try:
        magicecho.write_comparison_csv(report, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def build_parser():
    parser = _Parser(prog="pairdeco",
                     description="Spin-pair decoherence in a phonon bath")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None,
                       help="config file path (default: reference sample)")
        p.add_argument("--out", default=None,
                       help="output file path (default: stdout)")

    p = sub.add_parser("constants", help="characteristic rate table")
    common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("evolve", help="deviation-matrix trajectory CSV")
    common(p)
    p.add_argument("--mode", choices=("free", "me"), default="free")
    p.add_argument("--exact-path", action="store_true",
                   help="keep the slow kernels and quadratic phases")
    p.add_argument("--grid", required=True, metavar="START:STOP:STEPS",
                   help="time grid in seconds")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("sweep", help="tau_X over an (N, v_s) grid")
    common(p)
    p.add_argument("--n-grid", required=True, metavar="START:STOP:STEPS")
    p.add_argument("--vs-grid", required=True, metavar="START:STOP:STEPS")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="verification suites, JSON report")
    common(p)
    p.add_argument("which", choices=("fock", "eigdist", "ksum", "all"))
    p.add_argument("--tol", type=float, default=None,
                   help="relative tolerance for the fock suite")
    p.add_argument("--quick", action="store_true",
                   help="reduced grid for smoke testing")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare", help="experimental decay-time comparison")
    common(p)
    p.add_argument("data", help="CSV with header nu_hat_khz,tau_exp_us")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
