"""Simulator for phase-controlled closed-contour dynamics in driven three-level
systems and coupled qubit pairs, built from digital (gate) and analog
(continuous evolution) blocks.

Conventions used throughout: hbar = 1, amplitudes and couplings are angular
frequencies in rad/us, time is in us. The command line accepts ordinary
frequencies in MHz and multiplies by 2*pi.
"""

__version__ = "0.1.0"

from .linalg import eig_hermitian, expm_i, fidelity, phase_dist, tensor
from .model import (
    DriveParams,
    PhysicalDrives,
    TwoQubitParams,
    chiral_hamiltonian,
    ladder_hamiltonian,
    loop_hamiltonian,
    loop_spectrum,
    map_drives,
    triplet_hamiltonian,
    two_qubit_hamiltonian,
)
from .gates import (
    bell_frame_gate,
    chiral_entangling_gates,
    iswap_like_gate,
    ladder_to_loop_gate,
    rotation,
    triplet_cycle_gates,
)
from .pulses import (
    ConvergenceError,
    PulseSchedule,
    counterdiabatic,
    gaussian_pair,
    mixing_angle,
    propagate_td,
)
from .experiments import (
    SweepResult,
    effective_coupling,
    evolution_period,
    fit_exchange,
    run_cci_dynamics,
    run_chiral_separation,
    run_entanglement,
    run_spectrum,
    trs_metric,
)

__all__ = [
    "__version__",
    "eig_hermitian", "expm_i", "fidelity", "phase_dist", "tensor",
    "DriveParams", "PhysicalDrives", "TwoQubitParams",
    "map_drives", "ladder_hamiltonian", "loop_hamiltonian", "loop_spectrum",
    "two_qubit_hamiltonian", "triplet_hamiltonian", "chiral_hamiltonian",
    "rotation", "ladder_to_loop_gate", "bell_frame_gate",
    "iswap_like_gate", "triplet_cycle_gates", "chiral_entangling_gates",
    "PulseSchedule", "gaussian_pair", "mixing_angle", "counterdiabatic",
    "propagate_td", "ConvergenceError",
    "SweepResult", "run_cci_dynamics", "trs_metric", "run_spectrum",
    "run_chiral_separation", "run_entanglement", "effective_coupling",
    "fit_exchange", "evolution_period",
]
