"""Driven dissipative anharmonic-oscillator simulator: quantum-state-diffusion
trajectories, master-equation oracle, Wigner functions, Poincare sections."""

__version__ = "0.1.0"

from .fock import (DensityMatrix, FockVector, Observables, accumulate_outer,
                   apply_annihilation, apply_creation, apply_number,
                   apply_number_squared, coherent_state, expectation_ladder)
from .model import ModelParams, chi_at, f_at, hamiltonian_apply, lindblad_apply, scale_params
from .qsd import NoiseStream, TrajectoryConfig, TrajectoryRecord, qsd_step, \
    quantum_poincare, run_trajectory, sample_noise
from .master import MasterConfig, integrate_master, lindblad_rhs
from .wigner import GridSpec, WignerGrid, contour_export, negativity_volume, \
    wigner_coeff, wigner_from_density
from .classical import classical_poincare, classical_rhs, integrate_classical, \
    lyapunov_largest
from .sections import PoincareSection, bhattacharyya, occupancy_histogram, section_overlap
from .ensemble import EnsembleConfig, EnsembleResult, interference_scan, \
    run_ensemble, snapshot_wigner
