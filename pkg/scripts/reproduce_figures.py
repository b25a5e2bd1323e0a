"""Write the data behind every figure panel as CSV (or JSON) files.

    python3 scripts/reproduce_figures.py --out data/ [--config run.ini] [--grid 41]
"""

import argparse
import dataclasses
import logging
import time
from pathlib import Path

from chiral_switch.config import load_config
from chiral_switch.sweeps import SWEEPS, regime_curves, run_sweep, sweep_fig1ef, sweep_fig2ef

log = logging.getLogger("reproduce")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="figure_data")
    ap.add_argument("--config", default=None)
    ap.add_argument("--grid", type=int, default=None)
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--only", nargs="*", choices=SWEEPS, default=SWEEPS)
    args = ap.parse_args()
    logging.basicConfig(level=logging.WARNING, format="%(message)s")
    log.setLevel(logging.INFO)

    cfg = load_config(args.config)
    if args.grid:
        cfg = dataclasses.replace(cfg, sweep=cfg.sweep.with_grid(args.grid))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    curves = None
    if {"fig1ef", "fig2ef"} & set(args.only):
        # both panels share the same continuation runs
        curves = regime_curves(cfg)
    for name in args.only:
        t0 = time.perf_counter()
        if name == "fig1ef":
            table = sweep_fig1ef(cfg, curves)
        elif name == "fig2ef":
            table = sweep_fig2ef(cfg, curves)
        else:
            table = run_sweep(name, cfg)
        path = out / f"{name}.{args.format}"
        table.write(path, args.format)
        log.info("%-7s %6d rows  %6.2fs  -> %s", name, len(table.rows), time.perf_counter() - t0, path)


if __name__ == "__main__":
    main()
