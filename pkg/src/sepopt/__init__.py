"""Separable-state optimization: see-saw, ansatz reduction and a simulated co-processor."""

__version__ = "0.1.0"

from .ansatz import AnsatzSet, build_ansatz, krylov_pauli_strings, reference_state
from .coprocessor import EXACT, BackendConfig, PreparationCircuit, hadamard_test, prepare, swap_test
from .errors import ConvergenceError, DegenerateGramError, DimensionError, ResourceError, UndefinedMeasureError
from .ising import (AnsatzSettings, IsingParams, ansatz_sweep, build_ising, delta_hat, delta_scan,
                    entanglement_measure, separable_ground_energy, special_hamiltonian, split_ising_kron)
from .numerics import ansatz_extremal_energy, inv_sqrt_psd, lanczos_extremal, project_psd
from .operators import (KronOperator, PauliString, PauliSum, contract_a, contract_b, kron_contract, load_operator,
                        save_operator)
from .reduction import (ReducedProblem, build_reduced_kron_problem, build_reduced_state_problem, lift,
                        reduce_general)
from .seesaw import SeesawConfig, SeesawResult, seesaw_dense, seesaw_kron

__all__ = [
    "AnsatzSet", "AnsatzSettings", "BackendConfig", "ConvergenceError", "DegenerateGramError", "DimensionError",
    "EXACT", "IsingParams", "KronOperator", "PauliString", "PauliSum", "PreparationCircuit", "ReducedProblem",
    "ResourceError", "SeesawConfig", "SeesawResult", "UndefinedMeasureError", "ansatz_extremal_energy",
    "ansatz_sweep", "build_ansatz", "build_ising", "build_reduced_kron_problem", "build_reduced_state_problem",
    "contract_a", "contract_b", "delta_hat", "delta_scan", "entanglement_measure", "hadamard_test",
    "inv_sqrt_psd", "krylov_pauli_strings", "kron_contract", "lanczos_extremal", "lift", "load_operator",
    "prepare", "project_psd", "reduce_general", "reference_state", "save_operator", "seesaw_dense", "seesaw_kron",
    "separable_ground_energy", "special_hamiltonian", "split_ising_kron", "swap_test",
]
