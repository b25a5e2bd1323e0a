"""Random physical configurations shared by the tests.

Rates are drawn in [0.01, 10], coupling moduli in [0, 10] with uniform
phases, detuning in [-20, 20].  Dephasing triples that are not completely
positive are redrawn.
"""

import numpy as np

from chiral_switch import DecoherenceConfig, DriveConfig

RATE_RANGE = (0.01, 10.0)


def random_decoherence(rng) -> DecoherenceConfig:
    while True:
        dec = DecoherenceConfig(*rng.uniform(*RATE_RANGE, 6))
        if dec.is_completely_positive:
            return dec


def random_coupling(rng, top=10.0) -> complex:
    return complex(rng.uniform(0, top) * np.exp(1j * rng.uniform(0, 2 * np.pi)))


def random_drives(rng) -> DriveConfig:
    return DriveConfig(
        random_coupling(rng), random_coupling(rng), random_coupling(rng), rng.uniform(-20, 20)
    )


def random_density(rng) -> np.ndarray:
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real
