"""parakit: a numerical workbench for Z3 parafermion chains and qutrit gates.

Modules
-------
clock      qutrit clock algebra, parafermion operators, Pauli/Clifford tests
chain      chain Hamiltonians, exact diagonalization, edge modes
effective  degenerate perturbation theory, closed forms, decimation
gates      dynamical gate and Clifford-hierarchy classification
magic      discrete Wigner functions, contextuality, word sampling
rydberg    four-level rotating frame, adiabatic elimination, Berry loops
cli        deterministic command-line front end
"""

__version__ = "0.1.0"

from .chain import ChainSpec, SpectrumResult, build_hamiltonian, diagonalize
from .clock import clock_generators, displacement, parafermion, parity_operator
from .effective import (
    EffectiveHamiltonian,
    closed_form_second,
    closed_form_third,
    perturbative_effective,
)
from .gates import HierarchyVerdict, diagonal_level, dynamical_gate, hierarchy_level
from .magic import contextuality_score, sample_words, strange_states, wigner
from .rydberg import BerryLoop, RydbergParams, adiabatic_eliminate, rotating_hamiltonian

__all__ = [
    "__version__",
    "ChainSpec",
    "SpectrumResult",
    "build_hamiltonian",
    "diagonalize",
    "clock_generators",
    "displacement",
    "parafermion",
    "parity_operator",
    "EffectiveHamiltonian",
    "closed_form_second",
    "closed_form_third",
    "perturbative_effective",
    "HierarchyVerdict",
    "diagonal_level",
    "dynamical_gate",
    "hierarchy_level",
    "contextuality_score",
    "sample_words",
    "strange_states",
    "wigner",
    "BerryLoop",
    "RydbergParams",
    "adiabatic_eliminate",
    "rotating_hamiltonian",
]
