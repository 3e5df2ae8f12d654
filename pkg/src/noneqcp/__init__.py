"""Equilibrium and nonequilibrium Casimir-Polder atom-surface potentials."""
from .atom import RUBIDIUM, MultiLineAtom, Transition, TwoLevelAtom, rb_polarizability, rubidium_two_level
from .errors import ConfigError, ConvergenceError, DomainError, PoleError, TabulationError
from .landscape import PotentialConfig, PotentialCurve, find_barrier, find_well, total_potential
from .laser import (CoherentModeState, LaserBeam, counterprop_lattice, k_parallel, one_laser_potential,
                    two_laser_potential, verify_thermal_decoupling)
from .materials import GOLD, ConstantDielectric, DrudeMetal, LayerStack, TabulatedDielectric, load_sapphire
from .potentials import (delta_real_axis, delta_rotated, equilibrium_U, equilibrium_U_finiteT, nonretarded_split,
                         split_energies)
from .spectral import ImbalanceConfig, imbalanced_total, k_sp, omega_sp, residue

__version__ = "0.1.0"
