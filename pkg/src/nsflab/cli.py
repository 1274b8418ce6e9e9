"""Command-line interface.

Subcommands: riemann (wave pattern as JSON), profile / contact (CSV
tabulations), simulate (full scenario run), sweep (parameter sweep).
Exit code 0 only when every measured property passes.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .errors import ConfigError, NSFLabError
from .gas import GasParams, ThermoState, pressure
from .lab import ScenarioConfig, format_float, run_scenario, sweep
from .profiles import shock_profile_from_pattern, solve_contact_wave
from .riemann import build_pattern, solve_pattern


def _add_pattern_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="scenario JSON supplying gas/right-state/amplitudes")
    p.add_argument("--gas", nargs=4, type=float, metavar=("R", "GAMMA", "MU", "KAPPA"),
                   default=[1.0, 5.0 / 3.0, 1.0, 1.0])
    p.add_argument("--right", nargs=3, type=float, metavar=("V", "U", "THETA"),
                   default=[1.0, 0.0, 1.0])
    p.add_argument("--delta1", type=float, default=0.1)
    p.add_argument("--deltaC", type=float, default=0.05)
    p.add_argument("--delta3", type=float, default=0.1)
    p.add_argument("--contact-decreasing", action="store_true",
                   help="orient the contact with volume decreasing left to right")


def _pattern_from_args(args):
    if args.config:
        cfg = ScenarioConfig.from_json(args.config)
        g = cfg.gas
        pattern = build_pattern(cfg.right_state, cfg.delta1, cfg.deltaC, cfg.delta3,
                                g, cfg.contact_increasing)
    else:
        g = GasParams(*args.gas)
        right = ThermoState(*args.right)
        pattern = build_pattern(right, args.delta1, args.deltaC, args.delta3, g,
                                not args.contact_decreasing)
    return pattern, g


def _write_csv(path, header, columns):
    rows = [header]
    for row in zip(*columns):
        rows.append(",".join(format_float(v) for v in row))
    text = "\n".join(rows) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_riemann(args) -> int:
    if args.solve_left:
        g = GasParams(*args.gas)
        pattern = solve_pattern(ThermoState(*args.solve_left),
                                ThermoState(*args.right), g)
    else:
        pattern, _ = _pattern_from_args(args)
    json.dump(pattern.as_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def cmd_profile(args) -> int:
    pattern, g = _pattern_from_args(args)
    profile = shock_profile_from_pattern(pattern, args.family, g)
    _write_csv(args.out, "xi,v,u,theta",
               (profile.xi_grid, profile.v_tab, profile.u_tab, profile.theta_tab))
    return 0


def cmd_contact(args) -> int:
    pattern, g = _pattern_from_args(args)
    cw = solve_contact_wave(pattern.mid_left.theta, pattern.mid_right.theta,
                            pressure(pattern.mid_left, g), pattern.mid_left.u, g)
    _write_csv(args.out, "xi,Theta,dTheta", (cw.xi_grid, cw.Theta_tab, cw.dTheta_tab))
    return 0


def cmd_simulate(args) -> int:
    cfg = ScenarioConfig.from_json(args.config)
    report = run_scenario(cfg, args.output_root)
    for name, res in report.properties.items():
        status = "PASS" if res.passed else "FAIL"
        extra = f" [{' '.join(res.codes)}]" if res.codes else ""
        print(f"{status} {name}{extra}")
    if report.error is not None:
        print(f"ERROR in stage {report.error['stage']}: {report.error['message']}")
    print(f"scenario {report.scenario_id}: {'all pass' if report.all_pass else 'FAILED'}")
    return 0 if report.all_pass else 1


def cmd_sweep(args) -> int:
    cfg = ScenarioConfig.from_json(args.config)
    if args.values.startswith("random:"):
        if args.axis != "perturbation.center":
            raise ConfigError("random sweep values are only supported for perturbation.center")
        k = int(args.values.split(":", 1)[1])
        rng = np.random.default_rng(cfg.seed)
        half = 0.25 * (cfg.grid.x_max - cfg.grid.x_min)
        values = [float(v) for v in rng.uniform(-half, half, size=k)]
    else:
        values = [float(v) for v in args.values.split(",") if v.strip() != ""]
    reports, summary = sweep(cfg, args.axis, values, args.output_root, args.workers)
    for value, rep in zip(values, reports):
        status = "all pass" if rep.all_pass else "FAILED"
        print(f"{args.axis}={value}: {status}")
    print(f"summary: {summary}")
    return 0 if all(r.all_pass for r in reports) else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nsflab",
        description="Composite viscous wave laboratory for the 1-D heat-conducting "
                    "compressible gas system",
    )
    parser.add_argument("--output-root", default=None,
                        help="root for run outputs (default: $NSFLAB_OUTPUT_ROOT or cwd)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("riemann", help="print the wave pattern as JSON")
    _add_pattern_args(p)
    p.add_argument("--solve-left", nargs=3, type=float, metavar=("V", "U", "THETA"),
                   help="solve for the pattern connecting this left state to --right")
    p.set_defaults(func=cmd_riemann)

    p = sub.add_parser("profile", help="tabulate a shock profile as CSV")
    _add_pattern_args(p)
    p.add_argument("--family", type=int, choices=(1, 3), required=True)
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("contact", help="tabulate the contact wave as CSV")
    _add_pattern_args(p)
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_contact)

    p = sub.add_parser("simulate", help="run one scenario")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a parameter sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--axis", required=True, help="dotted scalar config field")
    p.add_argument("--values", required=True,
                   help="comma-separated numbers, or random:K for seeded centers")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    args = parser.parse_args(argv)
    if args.output_root is None:
        args.output_root = os.environ.get("NSFLAB_OUTPUT_ROOT")
    try:
        return args.func(args)
    except NSFLabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
