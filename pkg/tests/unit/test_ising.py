"""
Tests for Ising problems.

Tests states, bit conventions, energies and instance generation.
"""

import numpy as np
import pytest

from effham.core.exceptions import ContractViolationError
from effham.core.ising import (
    IsingProblem,
    SpinState,
    all_classical_energies,
    bits_from_string,
    bits_to_string,
    classical_energies,
    classical_energy,
    generate_instance,
)
from effham.core.topology import RANDOM, STRONG, chimera


THIRD = 1.0 / 3.0


class TestIsingProblem:
    """Tests for IsingProblem validation."""

    def test_rejects_field_count_mismatch(self):
        """Should require one field per qubit."""
        with pytest.raises(ContractViolationError):
            IsingProblem(n=2, h=(0.1,))

    def test_rejects_unordered_pair(self):
        """Coupling keys must satisfy i < j."""
        with pytest.raises(ContractViolationError):
            IsingProblem(n=2, h=(0.0, 0.0), couplings={(1, 0): 1.0})

    def test_rejects_non_finite_coupling(self):
        """Couplings must be finite."""
        with pytest.raises(ContractViolationError):
            IsingProblem(n=2, h=(0.0, 0.0), couplings={(0, 1): float("nan")})

    def test_from_triples_rejects_duplicates(self):
        """Duplicate pairs in triples are an error."""
        with pytest.raises(ContractViolationError, match="Duplicate"):
            IsingProblem.from_triples(3, [0, 0, 0], [(0, 1, 1.0), (0, 1, -1.0)])

    def test_coupling_matrix_is_symmetric(self, asymmetric_problem):
        """Dense J mirrors every coupling with a zero diagonal."""
        matrix = asymmetric_problem.coupling_matrix

        assert np.array_equal(matrix, matrix.T)
        assert np.all(np.diag(matrix) == 0.0)
        assert matrix[0, 1] == -0.7

    def test_graph_skips_zero_couplings(self):
        """Zero couplings do not create interaction edges."""
        problem = IsingProblem(n=3, h=(0, 0, 0), couplings={(0, 1): 0.0, (1, 2): 0.5})

        assert list(problem.graph.edges) == [(1, 2)]
        assert problem.graph.number_of_nodes() == 3


class TestSpinState:
    """Tests for the bit convention."""

    def test_character_i_is_bit_i(self):
        """String character i holds bit i."""
        assert bits_to_string(1, 3) == "100"
        assert bits_from_string("001") == 4

    def test_bit_zero_is_spin_up(self):
        """b = 0 means z = +1."""
        state = SpinState.from_string("01")

        assert state.spins().tolist() == [1.0, -1.0]

    def test_from_spins_matches_from_string(self):
        """Both constructors agree."""
        assert SpinState.from_spins([-1, 1, -1]) == SpinState.from_string("101")

    @pytest.mark.parametrize("text", ["", "012", "ab"])
    def test_rejects_non_bit_strings(self, text):
        """Only 0/1 strings are states."""
        with pytest.raises(ContractViolationError):
            SpinState.from_string(text)

    def test_rejects_out_of_range_bits(self):
        """bits must fit n qubits."""
        with pytest.raises(ContractViolationError):
            SpinState(n=2, bits=4)


class TestClassicalEnergy:
    """Tests for classical energy evaluation."""

    @pytest.mark.parametrize(
        "text,expected",
        [("11", -5.0 / 3.0), ("00", -1.0 / 3.0), ("10", 1.0), ("01", 1.0)],
    )
    def test_two_qubit_energies(self, two_qubit_problem, text, expected):
        """h = (1/3, 1/3), J = -1 gives the textbook spectrum."""
        energy = classical_energy(two_qubit_problem, SpinState.from_string(text))

        assert energy == pytest.approx(expected, abs=1e-15)

    def test_width_mismatch_raises(self, two_qubit_problem):
        """State and problem must have the same width."""
        with pytest.raises(ContractViolationError):
            classical_energy(two_qubit_problem, SpinState.from_string("101"))

    def test_all_energies_bit_identical_to_batch(self, make_instance):
        """Exhaustive and batched evaluation agree exactly."""
        problem = make_instance(10, seed=4)
        states = np.arange(1 << problem.n)
        spins = 1.0 - 2.0 * ((states[:, None] >> np.arange(problem.n)) & 1)

        assert np.array_equal(all_classical_energies(problem), classical_energies(problem, spins))

    @pytest.mark.parametrize("seed", range(3))
    def test_invariant_under_qubit_relabeling(self, make_instance, seed):
        """Permuting qubits in both the problem and the state keeps every energy."""
        problem = make_instance(6, seed)
        perm = np.random.default_rng(seed).permutation(problem.n)
        inverse = np.argsort(perm)
        relabeled = IsingProblem(
            n=problem.n,
            h=tuple(problem.h[int(i)] for i in inverse),
            couplings={
                tuple(sorted((int(perm[i]), int(perm[j])))): value
                for (i, j), value in problem.couplings.items()
            },
        )

        for bits in range(1 << problem.n):
            moved = sum(((bits >> i) & 1) << int(perm[i]) for i in range(problem.n))
            original = classical_energy(problem, SpinState(n=problem.n, bits=bits))
            permuted = classical_energy(relabeled, SpinState(n=problem.n, bits=moved))

            assert permuted == pytest.approx(original, abs=1e-12)

    def test_global_flip_symmetry_without_fields(self, make_instance):
        """With all h_i = 0, flipping every spin leaves the energy exactly unchanged."""
        problem = make_instance(8, seed=5)
        problem = IsingProblem(n=problem.n, h=(0.0,) * problem.n, couplings=problem.couplings)
        energies = all_classical_energies(problem)
        mask = (1 << problem.n) - 1

        assert np.array_equal(energies, energies[np.arange(mask + 1) ^ mask])
        state = SpinState(n=problem.n, bits=0b10110010)
        flipped = SpinState(n=problem.n, bits=0b10110010 ^ mask)
        assert classical_energy(problem, state) == classical_energy(problem, flipped)

    def test_batch_rejects_wrong_shape(self, two_qubit_problem):
        """Spins must be (M, n)."""
        with pytest.raises(ContractViolationError):
            classical_energies(two_qubit_problem, np.ones(2))


class TestGenerateInstance:
    """Tests for seeded instance generation."""

    def test_same_seed_same_problem(self):
        """Generation is deterministic in the seed."""
        n, edges = chimera(1, 1, 4)

        assert generate_instance(n, edges, 7) == generate_instance(n, edges, 7)

    def test_values_come_from_allowed_sets(self):
        """Fields are +-1/3, strong edges -1, random edges +-1/3."""
        n, edges = chimera(2, 2, 4)
        problem = generate_instance(n, edges, 11)
        kinds = {(i, j): kind for i, j, kind in edges}

        assert set(problem.h) <= {-THIRD, THIRD}
        for pair, value in problem.couplings.items():
            if kinds[pair] == STRONG:
                assert value == -1.0
            else:
                assert kinds[pair] == RANDOM
                assert value in (-THIRD, THIRD)

    def test_rejects_bad_edges(self):
        """Invalid topologies are reported."""
        with pytest.raises(ContractViolationError):
            generate_instance(3, [(0, 5, RANDOM)], 0)
