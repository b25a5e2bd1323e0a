"""Exact (non-perturbative) location of the enantioselective switch.

rho21 depends on both omega21 and its conjugate, so the root is posed as a
real 2-D problem in (Re omega21, Im omega21) and solved by damped Newton with
a central-difference Jacobian.  Iterating in Cartesian coordinates means a
step through omega21 = 0 simply folds (Omega, phi) into (Omega, phi + 180).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError, SolverError, SwitchNotFoundError
from .liouvillian import coherence_stack
from .perturbation import switch_seed
from .qmodel import (
    GROUND_STATE,
    Chirality,
    DecoherenceConfig,
    DriveConfig,
    EquilibriumState,
    normalize_deg,
    polar,
)

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-12
STEP_TOL = 1e-14
ACCEPT_RESIDUAL = 1e-10
SHARPNESS = 1e4
MAX_ITER = 100
GRID_SIZE = 64
GRID_CANDIDATES = 8
RUNAWAY = 1e3
NEAR = 0.5


@dataclass(frozen=True)
class SwitchPoint:
    omega0: float
    phi0: float
    silenced: Chirality
    residual: float
    surviving_amp: float
    branch: int = 0
    iterations: int = 0
    method: str = "newton"
    converged: bool = True

    @property
    def omega21(self) -> complex:
        return polar(self.omega0, self.phi0)

    @property
    def surviving(self) -> Chirality:
        return self.silenced.mirror

    @property
    def is_genuine(self) -> bool:
        return (
            self.converged
            and self.residual <= ACCEPT_RESIDUAL
            and self.surviving_amp > SHARPNESS * self.residual
        )

    def drives(self, omega31, omega32, delta) -> DriveConfig:
        return DriveConfig(self.omega21, omega31, omega32, delta)


class _Problem:
    """rho21 of both enantiomers as a function of omega21, everything else fixed."""

    def __init__(self, omega31, omega32, delta, dec, silenced):
        self.drives = DriveConfig(0.0, omega31, omega32, delta)
        self.dec = dec
        self.silenced = silenced

    def coherences(self, omega21, q):
        return coherence_stack(np.asarray(omega21, dtype=complex), self.drives, self.dec, q)

    def silenced_at(self, omega21):
        return self.coherences(omega21, self.silenced)

    def point(self, omega21, **info) -> SwitchPoint:
        both = self.coherences(np.array([omega21]), self.silenced)[0], self.coherences(
            np.array([omega21]), self.silenced.mirror
        )[0]
        return SwitchPoint(
            omega0=abs(omega21),
            phi0=normalize_deg(math.degrees(np.angle(omega21))),
            silenced=self.silenced,
            residual=float(abs(both[0])),
            surviving_amp=float(abs(both[1])),
            **info,
        )


def _newton(problem: _Problem, omega21: complex, max_iter: int, bound: float):
    """Damped Newton on F(x) = (Re rho21, Im rho21); returns (omega21, |F|, iterations)."""
    x = np.array([omega21.real, omega21.imag])
    unit = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=float)
    for it in range(max_iter):
        h = max(1e-7, 1e-7 * math.hypot(*x))
        probe = x + h * unit
        values = problem.silenced_at(
            np.concatenate([[complex(*x)], probe[:, 0] + 1j * probe[:, 1]])
        )
        F = np.array([values[0].real, values[0].imag])
        fnorm = math.hypot(*F)
        if not math.isfinite(fnorm):
            break
        if fnorm <= RESIDUAL_TOL:
            return complex(*x), fnorm, it
        d_re = (values[1] - values[2]) / (2 * h)
        d_im = (values[3] - values[4]) / (2 * h)
        J = np.array([[d_re.real, d_im.real], [d_re.imag, d_im.imag]])
        try:
            dx = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(dx)):
            break
        lam = 1.0
        while True:
            trial = x + lam * dx
            ftrial = abs(problem.silenced_at(np.array([complex(*trial)]))[0])
            if ftrial < fnorm or lam < 1e-4:
                break
            lam *= 0.5
        x = trial
        if math.hypot(*x) > bound:
            break
        if lam * math.hypot(*dx) < STEP_TOL:
            return complex(*x), float(ftrial), it + 1
    return complex(*x), float(abs(problem.silenced_at(np.array([complex(*x)]))[0])), max_iter


def _grid_candidates(problem: _Problem, omega_max: float):
    """Local minima of |rho_silenced| / |rho_surviving| on a polar grid, best first."""
    amps = omega_max * np.logspace(-3, 0, GRID_SIZE)
    phis = np.radians(np.arange(GRID_SIZE) * 360.0 / GRID_SIZE)
    grid = amps[:, None] * np.exp(1j * phis[None, :])
    sil = np.abs(problem.silenced_at(grid))
    sur = np.abs(problem.coherences(grid, problem.silenced.mirror))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(sur > 0, sil / sur, np.inf)
    ratio = np.nan_to_num(ratio, nan=np.inf)
    # phase axis is periodic, amplitude axis is not
    padded = np.pad(ratio, ((1, 1), (0, 0)), constant_values=np.inf)
    is_min = np.ones_like(ratio, dtype=bool)
    for da in (-1, 0, 1):
        for dp in (-1, 0, 1):
            if da == 0 and dp == 0:
                continue
            neighbour = np.roll(padded, dp, axis=1)[1 + da : 1 + da + GRID_SIZE]
            is_min &= ratio <= neighbour
    idx = np.argwhere(is_min & np.isfinite(ratio))
    order = np.argsort(ratio[idx[:, 0], idx[:, 1]], kind="stable")
    return [complex(grid[i, j]) for i, j in idx[order][:GRID_CANDIDATES]]


def _genuine(problem, omega21, fnorm):
    if fnorm > ACCEPT_RESIDUAL or not math.isfinite(fnorm):
        return False
    surviving = abs(problem.coherences(np.array([omega21]), problem.silenced.mirror)[0])
    return surviving > SHARPNESS * fnorm


def find_switch(
    omega31: complex,
    omega32: complex,
    delta: float,
    dec: DecoherenceConfig,
    es: EquilibriumState = GROUND_STATE,
    silenced: Chirality = Chirality.LEFT,
    seed: complex | None = None,
    max_iter: int = MAX_ITER,
) -> SwitchPoint:
    """Find (Omega0, phi0) nulling rho21 of ``silenced`` in the full steady state.

    Without an explicit ``seed`` the weak-drive formula is used, choosing the
    branch whose seed gives the smaller |rho21| for the silenced enantiomer.
    If Newton fails, or converges to a root farther than half the seed modulus
    away, a coarse polar grid supplies fresh starting points and the root
    closest to the seed wins.
    """
    if omega31 == 0 or omega32 == 0:
        raise InvalidConfigError("switch needs omega31 * omega32 != 0 (no interference partner)")
    if dec.is_degenerate:
        raise InvalidConfigError("switch needs at least one relaxation rate > 0")
    problem = _Problem(omega31, omega32, delta, dec, silenced)

    branch = 0
    if seed is None:
        seeds = {b: switch_seed(omega31, omega32, delta, dec, es, b) for b in (1, -1)}
        residuals = {b: abs(problem.silenced_at(np.array([s]))[0]) for b, s in seeds.items()}
        # ties resolve to +1 (dict order)
        branch = min(residuals, key=residuals.get)
        seed = seeds[branch]
        method = "newton"
    else:
        method = "continuation"

    scale = max(abs(omega31), abs(omega32), abs(seed))
    bound = RUNAWAY * scale
    omega21, fnorm, iterations = _newton(problem, complex(seed), max_iter, bound)
    roots = []
    if _genuine(problem, omega21, fnorm):
        if abs(omega21 - seed) <= NEAR * abs(seed):
            return problem.point(omega21, branch=branch, iterations=iterations, method=method)
        # converged, but to a root far from the seed: look for a closer one
        roots.append((abs(omega21 - seed), omega21, iterations, method))
    else:
        log.info("newton from %s failed (|rho21|=%.3g); trying polar grid", seed, fnorm)

    best = (fnorm, omega21)
    for start in _grid_candidates(problem, 3.0 * scale):
        omega21, fnorm, its = _newton(problem, start, max_iter, bound)
        if _genuine(problem, omega21, fnorm):
            roots.append((abs(omega21 - seed), omega21, iterations + its, "grid+newton"))
        elif fnorm < best[0]:
            best = (fnorm, omega21)
    if roots:
        _, omega21, its, how = min(roots, key=lambda r: r[0])
        return problem.point(omega21, branch=branch, iterations=its, method=how)
    raise SwitchNotFoundError(
        f"no switch found for delta={delta}, decoherence={dec}; best |rho21|={best[0]:.3g}",
        best_residual=best[0],
        best_omega21=best[1],
    )


def switch_curve(
    delta_grid,
    omega31: complex,
    omega32: complex,
    dec: DecoherenceConfig,
    es: EquilibriumState = GROUND_STATE,
    silenced: Chirality = Chirality.LEFT,
) -> list[SwitchPoint]:
    """Track the switch along a detuning grid, seeding each solve with the previous root.

    Failed points are returned with ``converged=False`` and the best residual
    found; the next point then restarts from the weak-drive seed.
    """
    deltas = [float(d) for d in delta_grid]
    if not deltas:
        raise InvalidConfigError("delta grid is empty")
    out = []
    previous = None
    for delta in deltas:
        try:
            point = find_switch(omega31, omega32, delta, dec, es, silenced, seed=previous)
        except SwitchNotFoundError as exc:
            log.warning("switch_curve: delta=%g failed: %s", delta, exc)
            point = SwitchPoint(
                omega0=abs(exc.best_omega21),
                phi0=normalize_deg(math.degrees(np.angle(exc.best_omega21))),
                silenced=silenced,
                residual=exc.best_residual,
                surviving_amp=float("nan"),
                method="failed",
                converged=False,
            )
        except SolverError as exc:
            log.warning("switch_curve: delta=%g failed: %s", delta, exc)
            point = SwitchPoint(float("nan"), float("nan"), silenced, float("nan"), float("nan"),
                                method="failed", converged=False)
        out.append(point)
        previous = point.omega21 if point.converged else None
    return out
