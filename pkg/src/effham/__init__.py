"""
Approximate diagonalization of transverse-field Ising Hamiltonians.

Builds per-level perturbative effective Hamiltonians in a low-energy
classical subspace and diagonalizes them, with an exact-diagonalization
oracle for small problems.
"""

__version__ = "1.0.0"
__author__ = "effham developers"
