"""Steady states, enantioselective switches and ee estimation for cyclic three-level chiral molecules."""

__version__ = "0.1.0"

from .liouvillian import build_generator, build_hamiltonian, evolve_to_steady, steady_state
from .perturbation import perturbative_coherence, susceptibilities, switch_seed
from .protocol import Mixture, critical_deviation, relative_error, run_two_detections
from .qmodel import (
    Chirality,
    DecoherenceConfig,
    DensityMatrix,
    DriveConfig,
    EquilibriumState,
    MoleculeMetadata,
    signed_couplings,
    transverse_rates,
)
from .switchfinder import SwitchPoint, find_switch, switch_curve
