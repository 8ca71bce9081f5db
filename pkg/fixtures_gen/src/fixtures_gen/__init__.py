"""Generator for the committed molecular-Hamiltonian JSON fixtures.

Self-contained minimal electronic-structure stack: STO-nG basis sets,
Gaussian integrals, restricted Hartree-Fock, fermion-to-qubit mappings,
and a determinant-CI oracle used to validate every emitted fixture.
"""

from .basis import build_basis
from .scf import rhf, active_space
from .mapping import jordan_wigner_terms, parity_reduced_terms
from .fci import fci_ground_energy
from .specs import FixtureSpec, FIXTURES, POOLS
from .generate import generate, generate_pool, main

__all__ = [
    "FIXTURES",
    "POOLS",
    "FixtureSpec",
    "active_space",
    "build_basis",
    "fci_ground_energy",
    "generate",
    "generate_pool",
    "jordan_wigner_terms",
    "main",
    "parity_reduced_terms",
    "rhf",
]
