"""Command-line entry point.

Subcommands: run a sweep spec to CSV, list or validate bundled specs,
and query the closed-form bounds for a single configuration.  Exit
codes: 0 on success, 2 on configuration or usage errors, 3 on numeric
failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import experiments
from .analytic import Scenario
from .channel import ConfigError, epsilon, phase_error_from_string
from .experiments import (DEFAULTS, bundled_spec_names, load_spec, run_sweep,
                          spec_with_overrides, write_csv)
from .geometry import correlation_matrix, magnitude_moment_matrix, trace_rbar_sq

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_BOUND_FLAGS = {
    # flag -> config key
    "n_h": "n_h", "n_v": "n_v",
    "wavelength": "wavelength_m",
    "element_len": "element_len_m", "element_width": "element_width_m",
    "d_b": "d_b_m", "d_t": "d_t_m", "d_r": "d_r_m",
    "d_tp": "d_tp_m", "d_rp": "d_rp_m",
    "chi": "chi", "alpha": "alpha", "beta": "beta",
    "qt": "q_t", "qr": "q_r", "qtp": "q_tp", "qrp": "q_rp",
    "lambda_t_db": "lambda_t_db", "lambda_r_db": "lambda_r_db",
    "lambda_tp_db": "lambda_tp_db", "lambda_rp_db": "lambda_rp_db",
    "p_dbm": "p_dbm", "noise_dbm": "noise_dbm",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ios-noma",
        description="Monte Carlo sweeps and closed-form rate bounds for an "
                    "omni-surface assisted NOMA/OMA downlink")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a sweep spec and write a CSV")
    p_run.add_argument("--spec", required=True,
                       help="bundled spec name or path to an INI file")
    p_run.add_argument("--out", required=True, help="output CSV path")
    p_run.add_argument("--seed", type=int, default=None, help="master seed override")
    p_run.add_argument("--trials", type=int, default=None, help="trial count override")
    p_run.add_argument("--workers", type=int, default=1, help="worker processes")

    sub.add_parser("list-specs", help="list bundled sweep specs")

    p_val = sub.add_parser("validate", help="parse and check a sweep spec")
    p_val.add_argument("--spec", required=True)

    p_bound = sub.add_parser("bound", help="closed-form bounds for one setup")
    p_bound.add_argument("--scenario", required=True,
                         choices=[s.value for s in Scenario])
    for flag, key in _BOUND_FLAGS.items():
        arg_type = int if key in ("n_h", "n_v") else float
        p_bound.add_argument(f"--{flag.replace('_', '-')}", dest=flag,
                             type=arg_type, default=None)
    p_bound.add_argument("--phase-error-t", default=None,
                         help="perfect | uniform | vonmises:K | quantized:B")
    p_bound.add_argument("--phase-error-r", default=None)
    p_bound.add_argument("--uncorrelated", action="store_true",
                         help="use the identity correlation matrix")
    p_bound.add_argument("--inf-snr", action="store_true",
                         help="print only the large-SNR limit")
    p_bound.add_argument("--json", action="store_true", dest="as_json")
    return parser


def _cmd_run(args) -> int:
    spec = load_spec(args.spec)
    spec = spec_with_overrides(spec, trials=args.trials, master_seed=args.seed)
    rows = run_sweep(spec, workers=args.workers)
    write_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def _cmd_list_specs() -> int:
    for name in bundled_spec_names():
        print(name)
    return EXIT_OK


def _cmd_validate(args) -> int:
    spec = load_spec(args.spec)
    # dry-build the first axis point of every scenario to surface bad keys
    for scen in spec.scenarios:
        cfg = {**DEFAULTS, **spec.defaults, **scen.overrides}
        cfg = experiments._apply_axis(cfg, spec.axis, spec.values[0])
        experiments._build_geometry(cfg)
        experiments._build_params(cfg)
        phase_error_from_string(str(cfg["phase_error_t"]))
        phase_error_from_string(str(cfg["phase_error_r"]))
    print(f"ok: axis={spec.axis} values={len(spec.values)} "
          f"scenarios={len(spec.scenarios)}")
    return EXIT_OK


def _cmd_bound(args) -> int:
    cfg = dict(DEFAULTS)
    for flag, key in _BOUND_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            cfg[key] = value
    if args.phase_error_t is not None:
        cfg["phase_error_t"] = args.phase_error_t
    if args.phase_error_r is not None:
        cfg["phase_error_r"] = args.phase_error_r
    scenario = Scenario(args.scenario)
    geom = experiments._build_geometry(cfg)
    params = experiments._build_params(cfg)
    err_t = phase_error_from_string(str(cfg["phase_error_t"]))
    err_r = phase_error_from_string(str(cfg["phase_error_r"]))
    corr = np.eye(geom.n_elements) if args.uncorrelated else correlation_matrix(geom)
    tr = trace_rbar_sq(magnitude_moment_matrix(corr))

    estimators = ("limit",) if args.inf_snr else ("jensen", "hardening", "limit")
    bounds = {}
    notes = {}
    for est in estimators:
        try:
            bounds[est] = experiments._analytic_rows(
                scenario, est, params, geom, tr, epsilon(err_t), epsilon(err_r))
        except (ConfigError, ValueError) as exc:
            if args.inf_snr or (est == "jensen" and not args.inf_snr):
                raise  # limit explicitly requested, or the core bound failed
            notes[est] = str(exc)

    if args.as_json:
        payload = {
            "scenario": scenario.value,
            "n_elements": geom.n_elements,
            "gamma0_db": 10.0 * np.log10(params.gamma0) if params.gamma0 > 0 else None,
            "bounds": {est: {"value": b.value, "branch": b.branch}
                       for est, b in bounds.items()},
            "skipped": notes,
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
        return EXIT_OK
    if args.inf_snr:
        print(f"{bounds['limit'].value:.4f} bits/s/Hz")
        return EXIT_OK
    print(f"scenario {scenario.value}  (N={geom.n_elements}, "
          f"gamma0={10.0 * np.log10(params.gamma0):.1f} dB)")
    for est in ("jensen", "hardening", "limit"):
        if est in bounds:
            b = bounds[est]
            branch = f"  [branch {b.branch}]" if b.branch else ""
            print(f"{est:10s} {b.value:.4f} bits/s/Hz{branch}")
        elif est in notes:
            print(f"{est:10s} n/a ({notes[est]})")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list-specs":
            return _cmd_list_specs()
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_bound(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
