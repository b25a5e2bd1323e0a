"""Domain types for the driven, dissipative cyclic three-level model.

Unit convention: every rate, coupling and frequency is a plain float in units
of 2*pi x MHz, so a rate of 2*pi x 0.1 MHz is stored as ``0.1``.  Only ratios
enter the dimensionless observables.  Phases are exchanged in degrees at the
API boundary and converted to radians internally.

States are labelled 1, 2, 3 in prose and 0, 1, 2 as array indices.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidConfigError


class Chirality(enum.Enum):
    LEFT = "L"
    RIGHT = "R"

    @property
    def sign(self) -> int:
        return 1 if self is Chirality.LEFT else -1

    @property
    def mirror(self) -> "Chirality":
        return Chirality.RIGHT if self is Chirality.LEFT else Chirality.LEFT

    @classmethod
    def parse(cls, text: str) -> "Chirality":
        key = str(text).strip().upper()
        if key in ("L", "LEFT"):
            return cls.LEFT
        if key in ("R", "RIGHT"):
            return cls.RIGHT
        raise InvalidConfigError(f"unknown chirality {text!r} (expected L or R)")

    def __str__(self) -> str:
        return self.value


def _finite(name, value):
    if not math.isfinite(abs(value)):
        raise InvalidConfigError(f"{name} must be finite, got {value!r}")


def _rate(name, value):
    _finite(name, value)
    if value < 0:
        raise InvalidConfigError(f"{name} must be >= 0, got {value!r}")


def normalize_deg(phi: float) -> float:
    """Map a phase in degrees onto [0, 360)."""
    out = math.fmod(phi, 360.0)
    if out < 0:
        out += 360.0
    # fmod of e.g. -1e-17 lands exactly on 360.0 after the shift
    return 0.0 if out >= 360.0 else out


def polar(amplitude: float, phase_deg: float) -> complex:
    return complex(amplitude * np.exp(1j * np.radians(phase_deg)))


@dataclass(frozen=True)
class DriveConfig:
    """Complex Rabi couplings of the three fields plus the detuning of state 3.

    ``omega21`` is usually built from its amplitude and phase, see
    :meth:`from_polar`.
    """

    omega21: complex
    omega31: complex
    omega32: complex
    delta: float

    def __post_init__(self):
        for name in ("omega21", "omega31", "omega32"):
            object.__setattr__(self, name, complex(getattr(self, name)))
            _finite(name, getattr(self, name))
        object.__setattr__(self, "delta", float(self.delta))
        _finite("delta", self.delta)

    @classmethod
    def from_polar(cls, omega, phi_deg, omega31=1.0, omega32=1.0, delta=10.0):
        if omega < 0:
            raise InvalidConfigError("drive amplitude must be >= 0")
        return cls(polar(omega, phi_deg), omega31, omega32, delta)

    @property
    def amplitude(self) -> float:
        return abs(self.omega21)

    @property
    def phase_deg(self) -> float:
        return normalize_deg(math.degrees(math.atan2(self.omega21.imag, self.omega21.real)))

    def with_omega21(self, omega21: complex) -> "DriveConfig":
        return replace(self, omega21=complex(omega21))

    def scaled(self, factor: float) -> "DriveConfig":
        return replace(
            self,
            omega21=self.omega21 * factor,
            omega31=self.omega31 * factor,
            omega32=self.omega32 * factor,
        )


@dataclass(frozen=True)
class DecoherenceConfig:
    """Relaxation rates Gamma_{j'j} (decay j -> j', j' < j) and pure dephasing rates."""

    gamma12: float = 0.1
    gamma13: float = 0.1
    gamma23: float = 0.1
    deph21: float = 0.1
    deph31: float = 0.1
    deph32: float = 0.1

    def __post_init__(self):
        for name in ("gamma12", "gamma13", "gamma23", "deph21", "deph31", "deph32"):
            value = float(getattr(self, name))
            _rate(name, value)
            object.__setattr__(self, name, value)

    @classmethod
    def uniform(cls, gamma: float) -> "DecoherenceConfig":
        return cls(gamma, gamma, gamma, gamma, gamma, gamma)

    @property
    def decay_totals(self) -> tuple[float, float, float]:
        """Total out-decay rate of each level (gamma_1, gamma_2, gamma_3)."""
        return 0.0, self.gamma12, self.gamma13 + self.gamma23

    @property
    def rates(self) -> tuple[float, ...]:
        return (self.gamma12, self.gamma13, self.gamma23, self.deph21, self.deph31, self.deph32)

    @property
    def is_degenerate(self) -> bool:
        """True when no population relaxes, so the steady state cannot be unique."""
        return self.gamma12 == 0 and self.gamma13 == 0 and self.gamma23 == 0

    @property
    def min_positive_rate(self) -> float:
        positive = [r for r in self.rates if r > 0]
        return min(positive) if positive else 0.0

    @property
    def is_completely_positive(self) -> bool:
        """Whether the dephasing rates come from a Lindblad generator.

        Independent pure-dephasing rates are only realizable by diagonal jump
        operators when sqrt(deph) obeys the triangle inequality over the three
        transitions.  Otherwise the dynamics is not completely positive and the
        steady state can acquire small negative eigenvalues.
        """
        a, b, c = (math.sqrt(r) for r in (self.deph21, self.deph31, self.deph32))
        slack = 1e-12 * (a + b + c)
        return a <= b + c + slack and b <= a + c + slack and c <= a + b + slack

    def transverse(self) -> tuple[float, float, float]:
        return transverse_rates(self)


@dataclass(frozen=True)
class EquilibriumState:
    """Diagonal field-free equilibrium populations."""

    p1: float = 1.0
    p2: float = 0.0
    p3: float = 0.0

    def __post_init__(self):
        for name in ("p1", "p2", "p3"):
            value = float(getattr(self, name))
            _rate(name, value)
            object.__setattr__(self, name, value)
        if abs(self.p1 + self.p2 + self.p3 - 1.0) > 1e-12:
            raise InvalidConfigError("equilibrium populations must sum to 1")


@dataclass(frozen=True)
class DensityMatrix:
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.entries, dtype=complex).reshape(3, 3)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def pure(cls, level: int) -> "DensityMatrix":
        """Projector onto ``level`` (1-based)."""
        rho = np.zeros((3, 3), dtype=complex)
        rho[level - 1, level - 1] = 1.0
        return cls(rho)

    @property
    def rho21(self) -> complex:
        return complex(self.entries[1, 0])

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    @property
    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    @property
    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.entries + self.entries.conj().T)
        return float(np.linalg.eigvalsh(herm)[0])

    def is_physical(self, herm_tol=1e-12, trace_tol=1e-10, psd_tol=1e-10) -> bool:
        return (
            self.hermiticity_error <= herm_tol
            and abs(self.trace - 1.0) <= trace_tol
            and self.min_eigenvalue >= -psd_tol
        )

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


@dataclass(frozen=True)
class MoleculeMetadata:
    """Bare transition frequencies. Documentation only; the rotating-frame model ignores them."""

    name: str = "1,2-propanediol"
    nu21: float = 100.9613e6
    nu31: float = 100.9621e6
    nu32: float = 846.8

    @property
    def resonance_mismatch(self) -> float:
        """Relative violation of nu31 = nu21 + nu32."""
        return abs(self.nu31 - self.nu21 - self.nu32) / abs(self.nu31)


def signed_couplings(drives: DriveConfig, q: Chirality) -> tuple[complex, complex, complex]:
    s = q.sign
    return s * drives.omega21, s * drives.omega31, s * drives.omega32


def transverse_rates(dec: DecoherenceConfig) -> tuple[float, float, float]:
    """Coherence decay rates (G21, G31, G32).

    G_lj = (gamma_l + gamma_j) / 2 + dephasing_lj with gamma_j the total
    out-decay of level j.
    """
    g1, g2, g3 = dec.decay_totals
    return (
        0.5 * (g2 + g1) + dec.deph21,
        0.5 * (g3 + g1) + dec.deph31,
        0.5 * (g3 + g2) + dec.deph32,
    )


BASELINE_DRIVES = DriveConfig(0.1, 1.0, 1.0, 10.0)
BASELINE_DECOHERENCE = DecoherenceConfig.uniform(0.1)
GROUND_STATE = EquilibriumState()
