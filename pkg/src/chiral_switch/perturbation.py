"""Weak-drive susceptibilities and the analytic switch seed.

Susceptibilities are normalized: dipole and vacuum-permittivity prefactors
are divided out, leaving quantities in units of 1/frequency (first order) and
1/frequency^2 (second order).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidConfigError
from .qmodel import (
    Chirality,
    DecoherenceConfig,
    DriveConfig,
    EquilibriumState,
    transverse_rates,
)


@dataclass(frozen=True)
class Susceptibilities:
    chi1: complex
    chi2: complex


def _checked_rates(dec):
    G21, G31, G32 = transverse_rates(dec)
    if G21 <= 0:
        raise InvalidConfigError("invalid decoherence: G21 must be > 0 for perturbative response")
    return G21, G31, G32


def _two_photon_factor(delta, es, G31, G32):
    # rho11/(Delta - i G31) - rho22/(Delta + i G32)
    return es.p1 / complex(delta, -G31) - es.p2 / complex(delta, G32)


def susceptibilities(
    dec: DecoherenceConfig,
    delta: float,
    es: EquilibriumState,
    q: Chirality = Chirality.LEFT,
) -> Susceptibilities:
    """First-order (achiral) and second-order (chiral) normalized susceptibilities."""
    G21, G31, G32 = _checked_rates(dec)
    chi1 = 1j * (es.p1 - es.p2) / G21
    chi2 = 1j / (2 * G21) * _two_photon_factor(delta, es, G31, G32)
    return Susceptibilities(chi1, q.sign * chi2)


def perturbative_coherence(
    drives: DriveConfig,
    dec: DecoherenceConfig,
    es: EquilibriumState,
    q: Chirality,
) -> complex:
    """Lowest-order steady-state rho21: one-photon term plus the two-photon path via |3>.

    The one-photon term is odd in the chirality sign, the two-photon term even,
    so the two interfere destructively for one enantiomer and constructively
    for the other.
    """
    G21, G31, G32 = _checked_rates(dec)
    s = q.sign
    one_photon = -(es.p1 - es.p2) * s * drives.omega21
    two_photon = drives.omega31 * drives.omega32.conjugate() * _two_photon_factor(
        drives.delta, es, G31, G32
    )
    return complex(1j * (one_photon + two_photon) / G21)


def switch_seed(
    omega31: complex,
    omega32: complex,
    delta: float,
    dec: DecoherenceConfig,
    es: EquilibriumState,
    branch: int = 1,
) -> complex:
    """omega21 at which the weak-drive rho21 of one enantiomer vanishes.

    The two branches differ by a sign; with the coupling-sign convention used
    here ``branch=+1`` silences the left-handed molecule and ``branch=-1`` the
    right-handed one (to lowest order).
    """
    if branch not in (1, -1):
        raise InvalidConfigError("branch must be +1 or -1")
    population_gap = es.p1 - es.p2
    if population_gap == 0:
        raise InvalidConfigError("no switch seed: equilibrium populations of levels 1 and 2 are equal")
    _, G31, G32 = transverse_rates(dec)
    factor = _two_photon_factor(delta, es, G31, G32)
    return complex(branch * omega31 * complex(omega32).conjugate() / population_gap * factor)


def seed_branch(q: Chirality) -> int:
    """Seed branch that silences ``q`` at lowest order."""
    return q.sign
