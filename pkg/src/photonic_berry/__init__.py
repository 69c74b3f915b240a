"""Trotterised single-photon simulation of Berry and Aharonov-Anandan phases."""

from .evolution import (ContourSpec, TrotterConfig, build_evolution_circuit,
                        field_direction, gadget_first_order, gadget_strang)
from .experiment import (AAPair, ExperimentResult, aa_average, delta_from_counts,
                         delta_from_two_runs, extract_delta_exact, geometric_phase,
                         prepare_initial_state, readout_counts, run_aa_pair,
                         run_evolution, run_experiment)
from .oracle import OracleConfig, exact_evolve, hamiltonian_1photon
from .photonics import (BeamSplitter, PassiveCircuit, PhaseShift, SinglePhotonState,
                        apply_gate, bs_single_photon_matrix, compose,
                        detection_probabilities, sample_counts)
from .theory import adiabaticity_epsilon, berry_phase_closed, berry_phase_path

from .sweep import PRESETS, ResultRow, SweepConfig, emit, preset, run_sweep

__version__ = "0.1.0"
