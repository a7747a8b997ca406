"""
Perturbative effective Hamiltonians.

For H(s) = H0 + V with H0 = (Eps/2) H_P and V = -(Delta/2) sum_i sigma^x_i,
builds the N_S x N_S matrix H~(k) for one target level k in the subspace S:
diagonal elements to fourth order, off-diagonal elements to second order.

V only flips single bits, so every state outside S that enters a sum is
one or two flips away from a basis state. The odd orders vanish on the
diagonal by flip parity and are not computed.
"""

import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional, Tuple

import numpy as np

from effham.config import settings
from effham.core.enumeration import SubspaceBasis
from effham.core.exceptions import ContractViolationError, SingularDenominatorError
from effham.core.ising import IsingProblem, bits_to_string
from effham.core.schedule import Schedule, schedule_at
from effham.infrastructure.metrics import get_metrics


# Cache double-flip energies when the (N_S, n, n) tensor stays below this size
_DOUBLE_CACHE_ELEMENTS = 20_000_000
_HAMMING_BLOCK_ROWS = 512


@dataclass(frozen=True)
class OrderConfig:
    """Perturbation orders for diagonal and off-diagonal elements."""
    diag_order: int = 4
    offdiag_order: int = 2

    def __post_init__(self) -> None:
        if self.diag_order not in (2, 4):
            raise ContractViolationError(f"diag_order must be 2 or 4, got {self.diag_order}")
        if self.offdiag_order not in (1, 2):
            raise ContractViolationError(
                f"offdiag_order must be 1 or 2, got {self.offdiag_order}"
            )


@dataclass(frozen=True)
class PerturbationSplit:
    """
    H0 / V scales at one schedule point.

    Attributes:
        h0_scale: Eps(s)/2, multiplies classical energies.
        v_amplitude: -Delta(s)/2, every single-flip matrix element of V.
    """
    h0_scale: float
    v_amplitude: float

    @classmethod
    def at(cls, schedule: Schedule, s: float) -> "PerturbationSplit":
        delta, eps = schedule_at(schedule, s)
        return cls(h0_scale=eps / 2.0, v_amplitude=-delta / 2.0)


@dataclass(frozen=True, eq=False)
class EffectiveHamiltonian:
    """
    Effective Hamiltonian H~(k) at one schedule point.

    Attributes:
        matrix: (N_S, N_S) real symmetric matrix.
        k_index: Target level, as a position in the basis.
        s: Schedule point.
        orders: Orders used for diagonal and off-diagonal elements.
        second_order_energy: E_k^(2).
    """
    matrix: np.ndarray = field(repr=False)
    k_index: int
    s: float
    orders: OrderConfig
    second_order_energy: float


@dataclass(frozen=True)
class SmallParameterEstimate:
    """
    Per-level expansion parameter bound.

    Attributes:
        lambda_k: (Delta/2) / (E_min_outside - E_k^(0)); 0 when nothing lies outside S.
        e_min_outside: Lowest unperturbed energy outside S reachable by <= 2 flips.
        trusted: False when the bound is invalid or not small.
    """
    lambda_k: float
    e_min_outside: Optional[float]
    trusted: bool


class FlipNeighborhood:
    """
    Single- and double-flip geometry of a basis.

    Independent of k and s, read-only once built, and safe to share between
    concurrent builds.
    """

    def __init__(self, problem: IsingProblem, basis: SubspaceBasis) -> None:
        if basis.n != problem.n:
            raise ContractViolationError("Basis and problem qubit counts differ")
        self.problem = problem
        self.basis = basis
        spins = basis.spins
        local_field = spins @ problem.coupling_matrix + problem.h_array
        # Classical energy change of each single flip
        self.flip_delta = -2.0 * spins * local_field
        self.single_energy = basis.energies[:, None] + self.flip_delta

        pairs1, pairs2 = self._hamming_pairs()
        self.pairs1 = pairs1
        self.pairs2 = pairs2

        self.single_inside = np.zeros((basis.size, problem.n), dtype=bool)
        alpha, beta, qubit = pairs1
        self.single_inside[alpha, qubit] = True
        self.single_inside[beta, qubit] = True

        alpha, beta, qa, qb = pairs2
        self._double_rows = np.concatenate([alpha, beta])
        self._double_a = np.concatenate([qa, qa])
        self._double_b = np.concatenate([qb, qb])

    def _hamming_pairs(
        self,
    ) -> Tuple[Tuple[np.ndarray, ...], Tuple[np.ndarray, ...]]:
        """Basis pairs (alpha < beta) at Hamming distance 1 and 2 with their flipped qubits."""
        bits = self.basis.bits
        dense = bits.astype(np.float32)
        weight = dense.sum(axis=1)
        found = {1: ([], []), 2: ([], [])}
        for start in range(0, self.basis.size, _HAMMING_BLOCK_ROWS):
            stop = min(start + _HAMMING_BLOCK_ROWS, self.basis.size)
            distance = weight[start:stop, None] + weight[None, :] - 2.0 * (dense[start:stop] @ dense.T)
            for d in (1, 2):
                rows, cols = np.nonzero(distance == d)
                rows = rows + start
                upper = cols > rows
                found[d][0].append(rows[upper])
                found[d][1].append(cols[upper])

        def stacked(d: int) -> Tuple[np.ndarray, np.ndarray]:
            return (
                np.concatenate(found[d][0]).astype(np.int64),
                np.concatenate(found[d][1]).astype(np.int64),
            )

        alpha1, beta1 = stacked(1)
        diff1 = bits[alpha1] != bits[beta1]
        qubit1 = np.argmax(diff1, axis=1) if alpha1.size else np.zeros(0, dtype=np.int64)

        alpha2, beta2 = stacked(2)
        diff2 = bits[alpha2] != bits[beta2]
        if alpha2.size:
            qa = np.argmax(diff2, axis=1)
            qb = self.problem.n - 1 - np.argmax(diff2[:, ::-1], axis=1)
        else:
            qa = qb = np.zeros(0, dtype=np.int64)
        return (alpha1, beta1, qubit1), (alpha2, beta2, qa, qb)

    def double_blocks(self, chunk_size: int) -> Iterator[Tuple[int, int, np.ndarray, np.ndarray]]:
        """
        Double-flip classical energies by block of basis rows.

        Yields:
            (start, stop, energies (r, n, n), outside mask (r, n, n) upper triangle only).
        """
        if self._double_cache is not None:
            yield from self._double_cache
            return
        yield from self._compute_double_blocks(chunk_size)

    @cached_property
    def _double_cache(self) -> Optional[list]:
        n = self.problem.n
        if self.basis.size * n * n > _DOUBLE_CACHE_ELEMENTS:
            return None
        return list(self._compute_double_blocks(settings.perturbation.chunk_size))

    def _compute_double_blocks(
        self, chunk_size: int
    ) -> Iterator[Tuple[int, int, np.ndarray, np.ndarray]]:
        n = self.problem.n
        upper = np.triu(np.ones((n, n), dtype=bool), k=1)
        coupling = self.problem.coupling_matrix
        spins = self.basis.spins
        for start in range(0, self.basis.size, chunk_size):
            stop = min(start + chunk_size, self.basis.size)
            z = spins[start:stop]
            delta = self.flip_delta[start:stop]
            energies = (
                self.basis.energies[start:stop, None, None]
                + delta[:, :, None]
                + delta[:, None, :]
                + 4.0 * coupling[None, :, :] * z[:, :, None] * z[:, None, :]
            )
            outside = np.broadcast_to(upper, energies.shape).copy()
            select = (self._double_rows >= start) & (self._double_rows < stop)
            outside[
                self._double_rows[select] - start,
                self._double_a[select],
                self._double_b[select],
            ] = False
            yield start, stop, energies, outside

    @cached_property
    def min_outside_energy(self) -> Optional[float]:
        """Lowest classical energy outside S reachable by one or two flips."""
        candidates = []
        single = self.single_energy[~self.single_inside]
        if single.size:
            candidates.append(float(single.min()))
        for _, _, energies, outside in self.double_blocks(settings.perturbation.chunk_size):
            if outside.any():
                candidates.append(float(energies[outside].min()))
        return min(candidates) if candidates else None


def _raise_if_singular(
    denominators: np.ndarray,
    contributing: np.ndarray,
    basis: SubspaceBasis,
    row_offset: int,
    k_index: int,
    e_k: float,
    tolerance: float,
) -> None:
    """
    Raise for the first contributing |E_kn| below tolerance.

    Axis 0 of denominators is a basis row (shifted by row_offset); every
    further axis indexes a flipped qubit.
    """
    bad = contributing & (np.abs(denominators) < tolerance)
    if not bad.any():
        return
    where = tuple(int(axis[0]) for axis in np.nonzero(bad))
    state = basis.states[where[0] + row_offset]
    for qubit in where[1:]:
        state ^= 1 << qubit
    raise SingularDenominatorError(
        k_index=k_index,
        k_bits=bits_to_string(basis.states[k_index], basis.n),
        n_bits=bits_to_string(state, basis.n),
        e_k=e_k,
        e_n=e_k - float(denominators[where]),
    )


def build_effective_hamiltonian(
    problem: IsingProblem,
    basis: SubspaceBasis,
    k_index: int,
    s: float,
    schedule: Schedule,
    orders: OrderConfig = OrderConfig(),
    neighborhood: Optional[FlipNeighborhood] = None,
) -> EffectiveHamiltonian:
    """
    Assemble H~(k) for target level k at schedule point s.

    Args:
        problem: The Ising problem.
        basis: Degeneracy-closed low-energy basis.
        k_index: Target level (position in the basis).
        s: Schedule point.
        schedule: Energy scales.
        orders: Diagonal / off-diagonal perturbation orders.
        neighborhood: Precomputed flip geometry of the basis.

    Returns:
        EffectiveHamiltonian with an exactly symmetric matrix.

    Raises:
        ContractViolationError: If k_index is out of range.
        SingularDenominatorError: If a contributing E_k - E_n is below tolerance.
    """
    if not (0 <= k_index < basis.size):
        raise ContractViolationError(f"k_index {k_index} outside basis of size {basis.size}")
    neighborhood = neighborhood or FlipNeighborhood(problem, basis)
    metrics = get_metrics()
    started = time.perf_counter()
    try:
        return _assemble(problem, basis, k_index, s, schedule, orders, neighborhood)
    finally:
        metrics.hamiltonian_builds_total.inc()
        metrics.hamiltonian_build_seconds.observe(time.perf_counter() - started)


def _assemble(
    problem: IsingProblem,
    basis: SubspaceBasis,
    k_index: int,
    s: float,
    schedule: Schedule,
    orders: OrderConfig,
    neighborhood: FlipNeighborhood,
) -> EffectiveHamiltonian:
    tolerance = settings.perturbation.singularity_tolerance
    split = PerturbationSplit.at(schedule, s)
    c, v = split.h0_scale, split.v_amplitude
    size = basis.size

    matrix = np.diag(c * basis.energies)
    alpha, beta, _ = neighborhood.pairs1
    matrix[alpha, beta] = v
    matrix[beta, alpha] = v
    if v == 0.0:
        return EffectiveHamiltonian(matrix, k_index, s, orders, 0.0)

    e_k = c * float(basis.energies[k_index])

    # 1/E_kn for single flips leaving S, zero for flips that stay inside
    outside1 = ~neighborhood.single_inside
    denominators1 = e_k - c * neighborhood.single_energy
    _raise_if_singular(denominators1, outside1, basis, 0, k_index, e_k, tolerance)
    inverse1 = np.zeros_like(denominators1)
    np.divide(1.0, denominators1, out=inverse1, where=outside1)

    diagonal = v * v * inverse1.sum(axis=1)
    e_k2 = float(diagonal[k_index])

    if orders.offdiag_order >= 2:
        alpha, beta, qa, qb = neighborhood.pairs2
        values = v * v * (inverse1[alpha, qa] + inverse1[alpha, qb])
        matrix[alpha, beta] += values
        matrix[beta, alpha] += values

    if orders.diag_order >= 4:
        fourth = np.zeros(size)
        for start, stop, energies, outside in neighborhood.double_blocks(
            settings.perturbation.chunk_size
        ):
            denominators = e_k - c * energies
            _raise_if_singular(denominators, outside, basis, start, k_index, e_k, tolerance)
            inverse2 = np.zeros_like(denominators)
            np.divide(1.0, denominators, out=inverse2, where=outside)
            block = inverse1[start:stop]
            pair_sum = block[:, :, None] + block[:, None, :]
            fourth[start:stop] = np.einsum("rab,rab->r", inverse2, pair_sum * pair_sum)
        fourth *= v ** 4
        # Renormalization term
        fourth -= e_k2 * v * v * (inverse1 * inverse1).sum(axis=1)
        diagonal = diagonal + fourth

    matrix[np.diag_indices(size)] += diagonal
    return EffectiveHamiltonian(matrix, k_index, s, orders, e_k2)


def estimate_small_parameter(
    problem: IsingProblem,
    basis: SubspaceBasis,
    k_index: int,
    s: float,
    schedule: Schedule,
    neighborhood: Optional[FlipNeighborhood] = None,
) -> SmallParameterEstimate:
    """
    Bound the expansion parameter of level k at schedule point s.

    Args:
        problem: The Ising problem.
        basis: Low-energy basis.
        k_index: Target level.
        s: Schedule point.
        schedule: Energy scales.
        neighborhood: Precomputed flip geometry of the basis.

    Returns:
        SmallParameterEstimate; untrusted when E_min_outside <= E_k^(0) or the
        bound is not below the configured threshold.
    """
    if not (0 <= k_index < basis.size):
        raise ContractViolationError(f"k_index {k_index} outside basis of size {basis.size}")
    neighborhood = neighborhood or FlipNeighborhood(problem, basis)
    split = PerturbationSplit.at(schedule, s)
    c = split.h0_scale
    amplitude = abs(split.v_amplitude)

    e_min_cl = neighborhood.min_outside_energy
    if e_min_cl is None:
        return SmallParameterEstimate(lambda_k=0.0, e_min_outside=None, trusted=True)
    e_min = c * e_min_cl
    if amplitude == 0.0:
        return SmallParameterEstimate(lambda_k=0.0, e_min_outside=e_min, trusted=True)

    separation = e_min - c * float(basis.energies[k_index])
    if separation <= 0.0:
        return SmallParameterEstimate(lambda_k=float("inf"), e_min_outside=e_min, trusted=False)
    lambda_k = amplitude / separation
    return SmallParameterEstimate(
        lambda_k=lambda_k,
        e_min_outside=e_min,
        trusted=lambda_k < settings.perturbation.lambda_trust_threshold,
    )
