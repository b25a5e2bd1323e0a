"""Parameter grids that regenerate the data behind the figures.

Each sweep returns a :class:`SweepTable`.  Rows are ordered
lexicographically over the axis indices (first axis slowest) regardless of
how the work pool schedules them, so identical configs give byte-identical
files.  CSV columns per sweep:

=======  ==============================================================
fig1ab   omega, phi_deg, log10_rho21_L, log10_rho21_R
fig1cd   phi_deg, abs_rho21_L, abs_rho21_R, log10_rho21_L, log10_rho21_R
fig1ef   gamma_ratio, delta, omega0, phi0_deg, residual, surviving_abs_rho21,
         seed_abs, seed_phase_deg, converged, method
fig2b    dphi_deg, domega_rel, eta
fig2cd   axis, deviation, eta   (deviation is relative for amplitude, degrees for phase)
fig2ef   gamma_ratio, delta, domega_rel_c, dphi_c_deg, omega0, phi0_deg
=======  ==============================================================

log10 of an exact zero is written as the sentinel -99.
"""

from __future__ import annotations

import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig
from .errors import InvalidConfigError, SolverError
from .liouvillian import coherence_stack
from .perturbation import switch_seed
from .protocol import AMPLITUDE, PHASE, critical_deviation, relative_error_stack
from .qmodel import Chirality, DecoherenceConfig, DriveConfig, normalize_deg
from .switchfinder import find_switch, switch_curve

LOG_ZERO = -99.0
THREADS_ENV = "CHIRAL_SWITCH_THREADS"
SWEEPS = ("fig1ab", "fig1cd", "fig1ef", "fig2b", "fig2cd", "fig2ef")


@dataclass(frozen=True)
class Axis:
    name: str
    unit: str
    values: tuple


@dataclass
class SweepTable:
    name: str
    axes: list
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        expected = math.prod(len(a.values) for a in self.axes)
        if len(self.rows) != expected:
            raise ValueError(f"{self.name}: {len(self.rows)} rows for axis product {expected}")

    def column(self, name) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def array(self, name) -> np.ndarray:
        return np.array(self.column(name), dtype=float)

    def _header(self):
        return {
            "sweep": self.name,
            "axes": [{"name": a.name, "unit": a.unit, "length": len(a.values)} for a in self.axes],
            "metadata": self.metadata,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# " + json.dumps(self._header(), sort_keys=True, default=_json_default) + "\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        doc = self._header()
        doc["axes"] = [
            {"name": a.name, "unit": a.unit, "values": [_num(v) for v in a.values]} for a in self.axes
        ]
        doc["columns"] = self.columns
        doc["rows"] = [[_num(v) for v in row] for row in self.rows]
        return json.dumps(doc, sort_keys=True, default=_json_default, indent=1) + "\n"

    def write(self, path, fmt="csv"):
        text = self.to_json() if fmt == "json" else self.to_csv()
        Path(path).write_text(text)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else f"{float(v):.12g}"
    return str(v)


def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return None if not math.isfinite(v) else float(f"{float(v):.12g}")
    return v


def _json_default(obj):
    if isinstance(obj, Chirality):
        return str(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def pool_map(fn, items) -> list:
    """Order-preserving map over a thread pool capped by CHIRAL_SWITCH_THREADS."""
    items = list(items)
    n = min(threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def log10_abs(z) -> np.ndarray:
    a = np.abs(np.asarray(z))
    with np.errstate(divide="ignore"):
        out = np.log10(a)
    return np.where(a == 0, LOG_ZERO, out)


def _phase_grid(lo, hi, n):
    full_circle = math.isclose(hi - lo, 360.0)
    return np.linspace(lo, hi, n, endpoint=not full_circle)


def _meta(cfg: RunConfig, **extra) -> dict:
    meta = {"version": __version__, "config": cfg.to_dict()}
    meta.update(extra)
    return meta


def _switch_meta(sw):
    return {
        "omega0": sw.omega0,
        "phi0_deg": sw.phi0,
        "silenced": str(sw.silenced),
        "residual": sw.residual,
        "surviving_abs_rho21": sw.surviving_amp,
    }


def baseline_switch(cfg: RunConfig):
    d = cfg.drives
    return find_switch(d.omega31, d.omega32, d.delta, cfg.decoherence, cfg.equilibrium, cfg.silenced)


def sweep_fig1ab(cfg: RunConfig) -> SweepTable:
    s = cfg.sweep
    omegas = np.linspace(s.omega_min, s.omega_max, s.n_omega)
    phis = _phase_grid(s.phi_min_deg, s.phi_max_deg, s.n_phi)
    phase = np.exp(1j * np.radians(phis))

    def row_block(omega):
        o21 = omega * phase
        return (
            log10_abs(coherence_stack(o21, cfg.drives, cfg.decoherence, Chirality.LEFT)),
            log10_abs(coherence_stack(o21, cfg.drives, cfg.decoherence, Chirality.RIGHT)),
        )

    blocks = pool_map(row_block, omegas)
    rows = []
    for omega, (left, right) in zip(omegas, blocks):
        rows.extend(zip([float(omega)] * len(phis), phis.tolist(), left.tolist(), right.tolist()))
    return SweepTable(
        "fig1ab",
        [Axis("omega", "2pi*MHz", tuple(omegas)), Axis("phi_deg", "deg", tuple(phis))],
        ["omega", "phi_deg", "log10_rho21_L", "log10_rho21_R"],
        rows,
        _meta(cfg),
    )


def sweep_fig1cd(cfg: RunConfig) -> SweepTable:
    sw = baseline_switch(cfg)
    phis = np.linspace(0.0, 360.0, cfg.sweep.n_phi_line)
    o21 = sw.omega0 * np.exp(1j * np.radians(phis))
    left = coherence_stack(o21, cfg.drives, cfg.decoherence, Chirality.LEFT)
    right = coherence_stack(o21, cfg.drives, cfg.decoherence, Chirality.RIGHT)
    rows = list(
        zip(
            phis.tolist(),
            np.abs(left).tolist(),
            np.abs(right).tolist(),
            log10_abs(left).tolist(),
            log10_abs(right).tolist(),
        )
    )
    return SweepTable(
        "fig1cd",
        [Axis("phi_deg", "deg", tuple(phis))],
        ["phi_deg", "abs_rho21_L", "abs_rho21_R", "log10_rho21_L", "log10_rho21_R"],
        rows,
        _meta(cfg, switch=_switch_meta(sw)),
    )


def regime_decoherence(cfg: RunConfig, ratio: float) -> DecoherenceConfig:
    """All relaxation and dephasing rates equal to ratio * Omega_bar."""
    return DecoherenceConfig.uniform(ratio * cfg.omega_bar)


def delta_grid(cfg: RunConfig) -> np.ndarray:
    s = cfg.sweep
    return np.linspace(s.delta_min, s.delta_max, s.n_delta)


def regime_curves(cfg: RunConfig):
    """Switch curves over the detuning grid, one per decoherence ratio."""
    deltas = delta_grid(cfg)
    d = cfg.drives

    def curve(ratio):
        dec = regime_decoherence(cfg, ratio)
        return switch_curve(deltas, d.omega31, d.omega32, dec, cfg.equilibrium, cfg.silenced)

    return deltas, pool_map(curve, cfg.sweep.gamma_ratios)


def sweep_fig1ef(cfg: RunConfig, curves=None) -> SweepTable:
    deltas, curves = regime_curves(cfg) if curves is None else curves
    d = cfg.drives
    rows = []
    for ratio, curve in zip(cfg.sweep.gamma_ratios, curves):
        dec = regime_decoherence(cfg, ratio)
        for delta, p in zip(deltas, curve):
            seed = switch_seed(d.omega31, d.omega32, delta, dec, cfg.equilibrium, cfg.silenced.sign)
            rows.append((
                float(ratio), float(delta), p.omega0, p.phi0, p.residual, p.surviving_amp,
                abs(seed), normalize_deg(math.degrees(np.angle(seed))), p.converged, p.method,
            ))
    return SweepTable(
        "fig1ef",
        [Axis("gamma_ratio", "1", tuple(cfg.sweep.gamma_ratios)), Axis("delta", "2pi*MHz", tuple(deltas))],
        ["gamma_ratio", "delta", "omega0", "phi0_deg", "residual", "surviving_abs_rho21",
         "seed_abs", "seed_phase_deg", "converged", "method"],
        rows,
        _meta(cfg, silenced=str(cfg.silenced)),
    )


def _deviation_grids(cfg):
    s = cfg.sweep
    return (
        np.linspace(-s.dphi_max_deg, s.dphi_max_deg, s.n_dev),
        np.linspace(-s.domega_rel_max, s.domega_rel_max, s.n_dev),
    )


def sweep_fig2b(cfg: RunConfig) -> SweepTable:
    sw = baseline_switch(cfg)
    dphis, domegas = _deviation_grids(cfg)

    def row_block(dphi):
        return relative_error_stack(domegas, dphi, sw, cfg.drives, cfg.decoherence)

    blocks = pool_map(row_block, dphis)
    rows = []
    for dphi, etas in zip(dphis, blocks):
        rows.extend(zip([float(dphi)] * len(domegas), domegas.tolist(), etas.tolist()))
    return SweepTable(
        "fig2b",
        [Axis("dphi_deg", "deg", tuple(dphis)), Axis("domega_rel", "1", tuple(domegas))],
        ["dphi_deg", "domega_rel", "eta"],
        rows,
        _meta(cfg, switch=_switch_meta(sw)),
    )


def sweep_fig2cd(cfg: RunConfig) -> SweepTable:
    sw = baseline_switch(cfg)
    dphis, domegas = _deviation_grids(cfg)
    amp = relative_error_stack(domegas, 0.0, sw, cfg.drives, cfg.decoherence)
    pha = relative_error_stack(0.0, dphis, sw, cfg.drives, cfg.decoherence)
    rows = [(AMPLITUDE, float(x), float(e)) for x, e in zip(domegas, amp)]
    rows += [(PHASE, float(x), float(e)) for x, e in zip(dphis, pha)]
    return SweepTable(
        "fig2cd",
        [Axis("axis", "-", (AMPLITUDE, PHASE)), Axis("index", "-", tuple(range(cfg.sweep.n_dev)))],
        ["axis", "deviation", "eta"],
        rows,
        _meta(cfg, switch=_switch_meta(sw)),
    )


def sweep_fig2ef(cfg: RunConfig, curves=None) -> SweepTable:
    deltas, curves = regime_curves(cfg) if curves is None else curves
    d = cfg.drives
    jobs = []
    for ratio, curve in zip(cfg.sweep.gamma_ratios, curves):
        dec = regime_decoherence(cfg, ratio)
        for delta, p in zip(deltas, curve):
            jobs.append((ratio, delta, dec, p))

    def critical(job):
        ratio, delta, dec, p = job
        crit = [math.nan, math.nan]
        if p.converged:
            drives = DriveConfig(p.omega21, d.omega31, d.omega32, float(delta))
            for i, axis in enumerate((AMPLITUDE, PHASE)):
                try:
                    crit[i] = critical_deviation(axis, p, drives, dec, cfg.target_eta)
                except SolverError:
                    pass
        return (float(ratio), float(delta), crit[0], crit[1], p.omega0, p.phi0)

    rows = pool_map(critical, jobs)
    return SweepTable(
        "fig2ef",
        [Axis("gamma_ratio", "1", tuple(cfg.sweep.gamma_ratios)), Axis("delta", "2pi*MHz", tuple(deltas))],
        ["gamma_ratio", "delta", "domega_rel_c", "dphi_c_deg", "omega0", "phi0_deg"],
        rows,
        _meta(cfg, target_eta=cfg.target_eta, silenced=str(cfg.silenced)),
    )


RUNNERS = {
    "fig1ab": sweep_fig1ab,
    "fig1cd": sweep_fig1cd,
    "fig1ef": sweep_fig1ef,
    "fig2b": sweep_fig2b,
    "fig2cd": sweep_fig2cd,
    "fig2ef": sweep_fig2ef,
}


def run_sweep(name: str, cfg: RunConfig) -> SweepTable:
    if name not in RUNNERS:
        raise InvalidConfigError(f"unknown sweep {name!r}; expected one of {SWEEPS}")
    return RUNNERS[name](cfg)
