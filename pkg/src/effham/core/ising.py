"""
Ising problem Hamiltonians.

Problem definition, computational-basis states and classical energies
of H_P = sum_i h_i z_i + sum_{i<j} J_ij z_i z_j. Bit b_i = 0 means
z_i = +1 and b_i = 1 means z_i = -1, everywhere in the package.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Dict, Mapping, Sequence, Tuple

import networkx as nx
import numpy as np

from effham.core.exceptions import ContractViolationError
from effham.core.topology import STRONG, Edge, validate_edges


THIRD = 1.0 / 3.0
FIELD_VALUES = (-THIRD, THIRD)
RANDOM_COUPLING_VALUES = (-THIRD, THIRD)
STRONG_COUPLING = -1.0


@dataclass(frozen=True)
class IsingProblem:
    """
    Classical Ising problem on n qubits.

    Attributes:
        n: Qubit count.
        h: Local fields, one per qubit.
        couplings: Map from (i, j), i < j, to J_ij. Absent pairs mean J_ij = 0.
    """
    n: int
    h: Tuple[float, ...]
    couplings: Mapping[Tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ContractViolationError(f"n must be a positive integer, got {self.n!r}")
        h = tuple(float(x) for x in self.h)
        if len(h) != self.n:
            raise ContractViolationError(f"Expected {self.n} fields, got {len(h)}")
        if not all(math.isfinite(x) for x in h):
            raise ContractViolationError("Local fields must be finite")

        couplings: Dict[Tuple[int, int], float] = {}
        for (i, j), value in sorted(self.couplings.items()):
            if not (0 <= i < j < self.n):
                raise ContractViolationError(
                    f"Coupling pair ({i}, {j}) must satisfy 0 <= i < j < {self.n}"
                )
            if not math.isfinite(value):
                raise ContractViolationError(f"Coupling ({i}, {j}) must be finite")
            couplings[(int(i), int(j))] = float(value)

        object.__setattr__(self, "h", h)
        object.__setattr__(self, "couplings", MappingProxyType(couplings))

    @classmethod
    def from_triples(
        cls,
        n: int,
        h: Sequence[float],
        triples: Sequence[Tuple[int, int, float]],
    ) -> "IsingProblem":
        """
        Build a problem from [i, j, J] triples, rejecting duplicate pairs.

        Raises:
            ContractViolationError: On duplicates or invalid pairs.
        """
        couplings: Dict[Tuple[int, int], float] = {}
        for i, j, value in triples:
            key = (int(i), int(j))
            if key in couplings:
                raise ContractViolationError(f"Duplicate coupling pair {key}")
            couplings[key] = float(value)
        return cls(n=n, h=tuple(h), couplings=couplings)

    @cached_property
    def h_array(self) -> np.ndarray:
        return np.asarray(self.h, dtype=np.float64)

    @cached_property
    def coupling_arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(i indices, j indices, values) in sorted pair order."""
        pairs = list(self.couplings.items())
        rows = np.array([p[0][0] for p in pairs], dtype=np.int64)
        cols = np.array([p[0][1] for p in pairs], dtype=np.int64)
        values = np.array([p[1] for p in pairs], dtype=np.float64)
        return rows, cols, values

    @cached_property
    def coupling_matrix(self) -> np.ndarray:
        """Dense symmetric J with zero diagonal."""
        matrix = np.zeros((self.n, self.n))
        rows, cols, values = self.coupling_arrays
        matrix[rows, cols] = values
        matrix[cols, rows] = values
        return matrix

    @cached_property
    def graph(self) -> nx.Graph:
        """Interaction graph over all qubits, nonzero couplings only."""
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(pair for pair, value in self.couplings.items() if value != 0.0)
        return graph


@dataclass(frozen=True)
class SpinState:
    """
    Computational basis state of n qubits.

    Attributes:
        n: Qubit count.
        bits: Integer whose bit i is b_i.
    """
    n: int
    bits: int

    def __post_init__(self) -> None:
        if self.n < 1 or not (0 <= self.bits < (1 << self.n)):
            raise ContractViolationError(f"bits={self.bits} does not fit {self.n} qubits")

    @classmethod
    def from_string(cls, text: str) -> "SpinState":
        """Parse a bit string whose character i is b_i."""
        if not text or set(text) - {"0", "1"}:
            raise ContractViolationError(f"Not a bit string: {text!r}")
        return cls(n=len(text), bits=bits_from_string(text))

    @classmethod
    def from_spins(cls, spins: Sequence[int]) -> "SpinState":
        """Build from z values (+1 / -1)."""
        bits = 0
        for i, z in enumerate(spins):
            if z not in (1, -1):
                raise ContractViolationError(f"Spin values must be +1 or -1, got {z!r}")
            if z == -1:
                bits |= 1 << i
        return cls(n=len(spins), bits=bits)

    def to_string(self) -> str:
        return bits_to_string(self.bits, self.n)

    def spins(self) -> np.ndarray:
        """z values as a float array."""
        return spins_from_bits(self.bits, self.n)


def bits_to_string(bits: int, n: int) -> str:
    """Character i of the result is bit i."""
    return format(bits, f"0{n}b")[::-1]


def bits_from_string(text: str) -> int:
    return int(text[::-1], 2)


def spins_from_bits(bits: int, n: int) -> np.ndarray:
    return np.array([1.0 - 2.0 * ((bits >> i) & 1) for i in range(n)])


def classical_energies(problem: IsingProblem, spins: np.ndarray) -> np.ndarray:
    """
    Classical energies for a batch of spin configurations.

    Terms are accumulated field by field, then coupling by coupling in sorted
    pair order, so every code path yields bit-identical energies.

    Args:
        problem: The Ising problem.
        spins: Array of shape (M, n) holding +1 / -1.

    Returns:
        Array of M dimensionless energies.
    """
    spins = np.asarray(spins, dtype=np.float64)
    if spins.ndim != 2 or spins.shape[1] != problem.n:
        raise ContractViolationError(
            f"Expected spins of shape (M, {problem.n}), got {spins.shape}"
        )
    energies = np.zeros(spins.shape[0])
    for i, hi in enumerate(problem.h):
        energies += hi * spins[:, i]
    for (i, j), value in problem.couplings.items():
        energies += value * (spins[:, i] * spins[:, j])
    return energies


def classical_energy(problem: IsingProblem, state: SpinState) -> float:
    """
    Evaluate sum_i h_i z_i + sum_{i<j} J_ij z_i z_j for one state.

    Raises:
        ContractViolationError: If the state width differs from problem.n.
    """
    if state.n != problem.n:
        raise ContractViolationError(
            f"State has {state.n} bits, problem has {problem.n} qubits"
        )
    return float(classical_energies(problem, state.spins()[None, :])[0])


def all_classical_energies(problem: IsingProblem) -> np.ndarray:
    """
    Energies of all 2^n states, indexed by the state's bit integer.

    Same accumulation order as classical_energies; memory is O(2^n).
    """
    index = np.arange(1 << problem.n, dtype=np.int64)
    energies = np.zeros(index.shape[0])
    for i, hi in enumerate(problem.h):
        energies += hi * (1.0 - 2.0 * ((index >> i) & 1))
    for (i, j), value in problem.couplings.items():
        energies += value * (1.0 - 2.0 * (((index >> i) ^ (index >> j)) & 1))
    return energies


def generate_instance(n: int, topology: Sequence[Edge], rng_seed: int) -> IsingProblem:
    """
    Draw a random problem on a given interaction graph.

    Fields come uniformly from {-1/3, +1/3}. Strong edges get J = -1; random
    edges get J uniformly from {-1/3, +1/3}, drawn in edge-list order.

    Args:
        n: Qubit count.
        topology: Edge triples (i, j, kind).
        rng_seed: Seed; equal inputs give equal problems.

    Returns:
        The generated IsingProblem.

    Raises:
        ContractViolationError: On invalid edges.
    """
    if n < 1:
        raise ContractViolationError(f"n must be positive, got {n}")
    edges = validate_edges(n, topology)
    rng = np.random.default_rng(rng_seed)

    h = tuple(float(FIELD_VALUES[k]) for k in rng.integers(0, 2, size=n))
    couplings: Dict[Tuple[int, int], float] = {}
    for i, j, kind in edges:
        if kind == STRONG:
            couplings[(i, j)] = STRONG_COUPLING
        else:
            couplings[(i, j)] = RANDOM_COUPLING_VALUES[int(rng.integers(0, 2))]
    return IsingProblem(n=n, h=h, couplings=couplings)
