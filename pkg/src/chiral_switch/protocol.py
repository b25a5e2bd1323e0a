"""Enantiomeric-excess estimation from two detections and its robustness.

Detection 1 is taken at the drive setting that silences the right-handed
molecules, detection 2 at the setting 180 degrees away, which silences the
left-handed ones.  Then ee = (E1 - E2) / (E1 + E2).

Signals are emitted amplitudes in units where one molecule contributes its
steady-state rho21.  Two summation rules are available:

``"coherent"`` (default)
    complex sum of the per-molecule coherences, then the modulus;
``"amplitude"``
    sum of the per-molecule moduli, the in-phase limit.

Both agree exactly at a switch point.  Away from it only ``"amplitude"``
makes the relative error independent of the mixture composition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegeneratePerturbationError,
    InvalidConfigError,
    NoCrossingError,
    UndefinedEstimateError,
)
from .liouvillian import coherence_stack, steady_state
from .qmodel import Chirality, DecoherenceConfig, DriveConfig
from .switchfinder import ACCEPT_RESIDUAL, SwitchPoint

SUMMATIONS = ("coherent", "amplitude")
AMPLITUDE = "amplitude"
PHASE = "phase"
AXIS_START = {AMPLITUDE: 1e-5, PHASE: 0.01}
AXIS_LIMIT = {AMPLITUDE: 1.0, PHASE: 180.0}


@dataclass(frozen=True)
class Mixture:
    n_left: float
    n_right: float

    def __post_init__(self):
        if self.n_left < 0 or self.n_right < 0:
            raise InvalidConfigError("particle numbers must be >= 0")
        if not self.n_left + self.n_right > 0:
            raise InvalidConfigError("mixture is empty")

    @classmethod
    def from_ee(cls, ee: float, total: float = 1.0) -> "Mixture":
        if not -1 <= ee <= 1:
            raise InvalidConfigError("enantiomeric excess must lie in [-1, 1]")
        return cls(total * (1 + ee) / 2, total * (1 - ee) / 2)

    @property
    def ee(self) -> float:
        return (self.n_left - self.n_right) / (self.n_left + self.n_right)

    def swapped(self) -> "Mixture":
        return Mixture(self.n_right, self.n_left)


@dataclass(frozen=True)
class DetectionResult:
    e_d1: float
    e_d2: float
    ee_estimate: float


def _combine(mix, rho_left, rho_right, summation):
    if summation == "coherent":
        return float(abs(mix.n_left * rho_left + mix.n_right * rho_right))
    if summation == "amplitude":
        return float(mix.n_left * abs(rho_left) + mix.n_right * abs(rho_right))
    raise InvalidConfigError(f"unknown summation {summation!r}; expected one of {SUMMATIONS}")


def mixture_signal(
    mix: Mixture,
    drives: DriveConfig,
    dec: DecoherenceConfig,
    summation: str = "coherent",
) -> float:
    rho_left = steady_state(drives, dec, Chirality.LEFT).rho21
    rho_right = steady_state(drives, dec, Chirality.RIGHT).rho21
    return _combine(mix, rho_left, rho_right, summation)


def estimate_ee(e_d1: float, e_d2: float) -> float:
    total = e_d1 + e_d2
    if total == 0:
        raise UndefinedEstimateError("both detections are zero; the sample does not radiate")
    return (e_d1 - e_d2) / total


def detection_settings(switch: SwitchPoint, drives: DriveConfig) -> tuple[DriveConfig, DriveConfig]:
    """Drive settings of detection 1 (right-handed silenced) and detection 2."""
    at_switch = drives.with_omega21(switch.omega21)
    flipped = drives.with_omega21(-switch.omega21)
    if switch.silenced is Chirality.RIGHT:
        return at_switch, flipped
    return flipped, at_switch


def run_two_detections(
    mix: Mixture,
    switch: SwitchPoint,
    drives: DriveConfig,
    dec: DecoherenceConfig,
    summation: str = "coherent",
) -> DetectionResult:
    """Measure the mixture at the switch point and with the phase advanced by 180 degrees.

    ``drives`` supplies omega31, omega32 and delta; its omega21 is replaced.
    """
    if not switch.residual <= ACCEPT_RESIDUAL:
        raise InvalidConfigError(f"not an exact switch point (residual {switch.residual:.3g})")
    first, second = detection_settings(switch, drives)
    e1 = mixture_signal(mix, first, dec, summation)
    e2 = mixture_signal(mix, second, dec, summation)
    return DetectionResult(e1, e2, estimate_ee(e1, e2))


def perturbed_omega21(switch: SwitchPoint, delta_omega_rel, delta_phi_deg):
    """omega21 at Omega0 (1 + dOmega_rel) and phi0 + dphi; broadcasts over arrays."""
    amp = switch.omega0 * (1 + np.asarray(delta_omega_rel, dtype=float))
    phase = np.radians(switch.phi0 + np.asarray(delta_phi_deg, dtype=float))
    return amp * np.exp(1j * phase)


def relative_error_stack(delta_omega_rel, delta_phi_deg, switch, drives, dec):
    """eta = 2 |rho21 silenced| / |rho21 surviving| for arrays of deviations."""
    omega21 = perturbed_omega21(switch, delta_omega_rel, delta_phi_deg)
    silenced = np.abs(coherence_stack(omega21, drives, dec, switch.silenced))
    surviving = np.abs(coherence_stack(omega21, drives, dec, switch.surviving))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(surviving > 1e-14, 2 * silenced / surviving, np.nan)


def relative_error(
    delta_omega_rel: float,
    delta_phi: float,
    switch: SwitchPoint,
    drives: DriveConfig,
    dec: DecoherenceConfig,
) -> float:
    """Relative ee error caused by detuning the drive from the switch point.

    ``delta_phi`` in degrees.
    """
    omega21 = complex(perturbed_omega21(switch, delta_omega_rel, delta_phi))
    d = drives.with_omega21(omega21)
    silenced = abs(steady_state(d, dec, switch.silenced).rho21)
    surviving = abs(steady_state(d, dec, switch.surviving).rho21)
    if surviving < 1e-14:
        raise DegeneratePerturbationError(
            f"surviving coherence vanishes at omega21={omega21:.6g}; relative error undefined"
        )
    return 2 * silenced / surviving


def critical_deviation(
    axis: str,
    switch: SwitchPoint,
    drives: DriveConfig,
    dec: DecoherenceConfig,
    target_eta: float = 0.01,
    rel_precision: float = 1e-6,
) -> float:
    """Smallest positive deviation along ``axis`` at which eta reaches ``target_eta``.

    Amplitude deviations are relative, phase deviations in degrees.  The
    bracket starts at 1e-5 (amplitude) or 0.01 deg (phase) and doubles until
    eta exceeds the target; bisection then narrows it to ``rel_precision``.
    """
    if axis not in AXIS_START:
        raise InvalidConfigError(f"axis must be 'amplitude' or 'phase', got {axis!r}")
    if not target_eta > 0:
        raise InvalidConfigError("target_eta must be > 0")

    def eta(x):
        if axis == AMPLITUDE:
            return relative_error(x, 0.0, switch, drives, dec)
        return relative_error(0.0, x, switch, drives, dec)

    lo, hi = 0.0, AXIS_START[axis]
    while eta(hi) < target_eta:
        lo, hi = hi, 2 * hi
        if hi > AXIS_LIMIT[axis]:
            raise NoCrossingError(
                f"relative error stays below {target_eta} up to the physical bound on the {axis} axis"
            )
    while hi - lo > rel_precision * hi:
        mid = 0.5 * (lo + hi)
        if eta(mid) < target_eta:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ee_error(mix: Mixture, delta_omega_rel, delta_phi, switch, drives, dec, summation="coherent"):
    """End-to-end (ee_true - ee_estimate) / ee_true for detections at a perturbed setting.

    Both detections keep the same deviation, the second just adds 180 degrees.
    """
    omega21 = complex(perturbed_omega21(switch, delta_omega_rel, delta_phi))
    perturbed = SwitchPoint(
        abs(omega21), math.degrees(np.angle(omega21)), switch.silenced, 0.0, switch.surviving_amp
    )
    first, second = detection_settings(perturbed, drives)
    e1 = mixture_signal(mix, first, dec, summation)
    e2 = mixture_signal(mix, second, dec, summation)
    return (mix.ee - estimate_ee(e1, e2)) / mix.ee

