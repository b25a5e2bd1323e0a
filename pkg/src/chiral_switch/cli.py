"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 solver failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

import numpy as np

from .config import RunConfig, load_config
from .errors import InvalidConfigError, SolverError
from .liouvillian import steady_state
from .protocol import AMPLITUDE, PHASE, Mixture, critical_deviation, run_two_detections
from .qmodel import Chirality, DriveConfig
from .sweeps import SWEEPS, baseline_switch, delta_grid, run_sweep
from .switchfinder import switch_curve

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _common(top: bool):
    # flags may appear before or after the subcommand; only the top level sets defaults
    p = argparse.ArgumentParser(add_help=False)
    unset = {} if top else {"default": argparse.SUPPRESS}
    p.add_argument("--config", help="config file path or preset name (default: baseline)",
                   **({"default": None} | unset))
    p.add_argument("--out", help="write output here instead of stdout", **({"default": None} | unset))
    p.add_argument("--format", choices=("csv", "json"), **({"default": None} | unset),
                   help="output format (sweeps default to csv, other commands to text)")
    p.add_argument("--grid", type=int, help="resolution override for sweeps and curves",
                   **({"default": None} | unset))
    p.add_argument("--quiet", action="store_true", help="suppress log messages",
                   **({"default": False} | unset))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chiral-switch", description="Enantioselective switch toolkit.",
                     parents=[_common(top=True)])
    common = _common(top=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.add_parser("steady", parents=[common], help="steady state of both enantiomers")
    sw = sub.add_parser("switch", parents=[common], help="locate the enantioselective switch")
    sw.add_argument("--silenced", default=None, help="L or R (overrides config)")
    cv = sub.add_parser("curve", parents=[common], help="switch point along the detuning grid")
    cv.add_argument("--silenced", default=None)
    sp = sub.add_parser("sweep", parents=[common], help="regenerate figure data")
    sp.add_argument("name", choices=SWEEPS)
    ee = sub.add_parser("ee", parents=[common], help="two-detection enantiomeric-excess estimate")
    ee.add_argument("--n-left", type=float, default=None)
    ee.add_argument("--n-right", type=float, default=None)
    ee.add_argument("--summation", choices=("coherent", "amplitude"), default="coherent")
    rb = sub.add_parser("robust", parents=[common], help="critical drive deviations")
    rb.add_argument("--axis", choices=(AMPLITUDE, PHASE, "both"), default="both")
    rb.add_argument("--target-eta", type=float, default=None)
    return parser


def _emit(args, record: dict):
    if args.format == "json":
        text = json.dumps(record, indent=1, sort_keys=True) + "\n"
    else:
        text = "".join(f"{k}: {_plain(v)}\n" for k, v in record.items())
    _write(args, text)


def _plain(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return v


def _write(args, text):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _switch_record(sw) -> dict:
    return {
        "omega0": sw.omega0,
        "phi0_deg": sw.phi0,
        "silenced": str(sw.silenced),
        "residual": sw.residual,
        "surviving_abs_rho21": sw.surviving_amp,
        "seed_branch": sw.branch,
        "method": sw.method,
        "iterations": sw.iterations,
    }


def _cmd_steady(args, cfg: RunConfig):
    record = {}
    for q in Chirality:
        rho = steady_state(cfg.drives, cfg.decoherence, q)
        record[f"abs_rho21_{q}"] = abs(rho.rho21)
        if args.format == "json":
            record[f"rho_{q}"] = {"re": rho.entries.real.tolist(), "im": rho.entries.imag.tolist()}
        else:
            record[f"rho_{q}"] = "\n" + np.array2string(rho.entries, precision=6, max_line_width=120)
    _emit(args, record)


def _cmd_switch(args, cfg):
    _emit(args, _switch_record(baseline_switch(cfg)))


def _cmd_curve(args, cfg):
    d = cfg.drives
    deltas = delta_grid(cfg)
    points = switch_curve(deltas, d.omega31, d.omega32, cfg.decoherence, cfg.equilibrium, cfg.silenced)
    rows = [
        dict(delta=float(delta), converged=p.converged, **_switch_record(p))
        for delta, p in zip(deltas, points)
    ]
    if args.format == "json":
        _write(args, json.dumps(rows, indent=1) + "\n")
        return
    cols = ["delta", "omega0", "phi0_deg", "residual", "surviving_abs_rho21", "converged", "method"]
    lines = [",".join(cols)]
    lines += [",".join(str(_plain(r[c])) for c in cols) for r in rows]
    _write(args, "\n".join(lines) + "\n")
    if not all(p.converged for p in points):
        raise SolverError("switch curve has unconverged points")


def _cmd_sweep(args, cfg):
    table = run_sweep(args.name, cfg)
    _write(args, table.to_json() if args.format == "json" else table.to_csv())


def _cmd_ee(args, cfg):
    n_left = cfg.n_left if args.n_left is None else args.n_left
    n_right = cfg.n_right if args.n_right is None else args.n_right
    mix = Mixture(n_left, n_right)
    sw = baseline_switch(cfg)
    res = run_two_detections(mix, sw, cfg.drives, cfg.decoherence, args.summation)
    _emit(args, {
        "n_left": n_left,
        "n_right": n_right,
        "ee_true": mix.ee,
        "e_d1": res.e_d1,
        "e_d2": res.e_d2,
        "ee_estimate": res.ee_estimate,
        "omega0": sw.omega0,
        "phi0_deg": sw.phi0,
    })


def _cmd_robust(args, cfg):
    target = cfg.target_eta if args.target_eta is None else args.target_eta
    sw = baseline_switch(cfg)
    axes = (AMPLITUDE, PHASE) if args.axis == "both" else (args.axis,)
    record = {"target_eta": target, "omega0": sw.omega0, "phi0_deg": sw.phi0}
    drives = DriveConfig(sw.omega21, cfg.drives.omega31, cfg.drives.omega32, cfg.drives.delta)
    for axis in axes:
        key = "domega_rel_c" if axis == AMPLITUDE else "dphi_c_deg"
        record[key] = critical_deviation(axis, sw, drives, cfg.decoherence, target)
    _emit(args, record)


COMMANDS = {
    "steady": _cmd_steady,
    "switch": _cmd_switch,
    "curve": _cmd_curve,
    "sweep": _cmd_sweep,
    "ee": _cmd_ee,
    "robust": _cmd_robust,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError(parser.format_help())
    except _UsageError as exc:
        sys.stderr.write(str(exc).rstrip() + "\n")
        return EXIT_CONFIG
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.grid is not None:
            cfg = dataclasses.replace(cfg, sweep=cfg.sweep.with_grid(args.grid))
        if getattr(args, "silenced", None):
            cfg = dataclasses.replace(cfg, silenced=Chirality.parse(args.silenced))
        COMMANDS[args.command](args, cfg)
    except InvalidConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except SolverError as exc:
        sys.stderr.write(f"solver failure: {exc}\n")
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
