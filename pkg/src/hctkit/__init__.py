"""Symmetry discovery and hierarchical Clifford transformations for qubit Hamiltonians."""

__version__ = "0.1.0"

from .pauli import PauliString, PauliSum
from .symmetry import (CliffordFactor, SymmetryBasis, conjugate_pauli,
                       conjugate_sum, find_symmetries, taper)
from .hct import (HctStage, HctTransform, ThresholdSchedule, build_hct,
                  conjugate_by_hct, extend_symmetries, fine_grid_schedule,
                  scan_symmetries, violation_bound, violation_norm)
from .solver import (Statevector, GroundState, apply_clifford_to_state,
                     apply_pauli, apply_pauli_sum, basis_state,
                     entanglement_entropy, entropy_profile, ground_state,
                     mutual_information, operator_norm, permute_qubits,
                     reduced_density)
from .vqe import (AnsatzCircuit, Gate, OptimizeResult, PoolAnsatz, VqeRun,
                  VqeStage, apply_exponential, build_hwe_ansatz,
                  build_pool_ansatz, embed_parameters, energy,
                  extend_hwe_ansatz, filter_pool, hct_vqe, optimize)

__all__ = [
    "PauliString",
    "PauliSum",
    "CliffordFactor",
    "SymmetryBasis",
    "conjugate_pauli",
    "conjugate_sum",
    "find_symmetries",
    "taper",
    "HctStage",
    "HctTransform",
    "ThresholdSchedule",
    "build_hct",
    "conjugate_by_hct",
    "extend_symmetries",
    "fine_grid_schedule",
    "scan_symmetries",
    "violation_bound",
    "violation_norm",
    "Statevector",
    "GroundState",
    "apply_clifford_to_state",
    "apply_pauli",
    "apply_pauli_sum",
    "basis_state",
    "entanglement_entropy",
    "entropy_profile",
    "ground_state",
    "mutual_information",
    "operator_norm",
    "permute_qubits",
    "reduced_density",
    "AnsatzCircuit",
    "Gate",
    "OptimizeResult",
    "PoolAnsatz",
    "VqeRun",
    "VqeStage",
    "apply_exponential",
    "build_hwe_ansatz",
    "build_pool_ansatz",
    "embed_parameters",
    "energy",
    "extend_hwe_ansatz",
    "filter_pool",
    "hct_vqe",
    "optimize",
]
