"""
Tests for low-energy state enumeration.

Tests elimination orders, k-best bucket elimination, degeneracy closure
and agreement with exhaustive enumeration.
"""

import numpy as np
import pytest

from effham.config.settings import EnumerationSettings, Settings
from effham.core.enumeration import (
    SubspaceBasis,
    brute_force_low_states,
    choose_elimination_order,
    closure_violations,
    energy_multiset,
    enumerate_low_states,
    order_is_permutation,
)
from effham.core.exceptions import ContractViolationError, FeasibilityError, ResourceError
from effham.core.ising import IsingProblem, all_classical_energies, generate_instance
from effham.core.topology import chain, chimera


@pytest.fixture
def uniform_field_problem() -> IsingProblem:
    """h = (1, 1, 1), no couplings: E = 3 - 2 * (number of flipped spins)."""
    return IsingProblem(n=3, h=(1.0, 1.0, 1.0))


class TestEliminationOrder:
    """Tests for min-fill elimination orders."""

    def test_chain_has_width_one(self):
        """Eliminating a chain from its ends never exceeds one neighbor."""
        n, edges = chain(6)
        order = choose_elimination_order(generate_instance(n, edges, 0))

        assert order.width == 1
        assert order_is_permutation(order.order, n)

    def test_complete_bipartite_cell_has_width_four(self):
        """K_{4,4} has treewidth 4 and min-fill attains it."""
        n, edges = chimera(1, 1, 4)
        order = choose_elimination_order(generate_instance(n, edges, 0))

        assert order.width == 4
        assert order_is_permutation(order.order, n)

    def test_isolated_qubits(self, uniform_field_problem):
        """No couplings means width zero."""
        assert choose_elimination_order(uniform_field_problem).width == 0


class TestEnumerateLowStates:
    """Tests for enumerate_low_states."""

    def test_two_qubit_ground_state(self, two_qubit_problem):
        """The single lowest state of the two-qubit example is |11>."""
        basis = enumerate_low_states(two_qubit_problem, 1)

        assert basis.bitstrings() == ["11"]
        assert basis.energies[0] == pytest.approx(-5.0 / 3.0)

    def test_closure_adds_whole_top_level(self, uniform_field_problem):
        """A target cutting a degenerate level is widened to include all of it."""
        basis = enumerate_low_states(uniform_field_problem, 2)

        assert basis.size == 4
        assert basis.bitstrings() == ["111", "011", "101", "110"]
        assert basis.energies.tolist() == [-3.0, -1.0, -1.0, -1.0]

    def test_target_clamped_to_hilbert_space(self, asymmetric_problem):
        """Asking for more than 2^n states returns all of them."""
        basis = enumerate_low_states(asymmetric_problem, 100)

        assert basis.size == 8
        assert sorted(basis.states) == list(range(8))

    def test_energies_ascending_and_consistent(self, make_instance):
        """Energies ascend and match each state's classical energy."""
        problem = make_instance(12, seed=3)
        basis = enumerate_low_states(problem, 40)
        exact = all_classical_energies(problem)

        assert np.all(np.diff(basis.energies) >= -1e-9)
        assert np.allclose(basis.energies, exact[list(basis.states)], atol=1e-12)

    @pytest.mark.parametrize("n,seed,target", [(8, 0, 10), (10, 1, 30), (12, 2, 100)])
    def test_matches_brute_force(self, make_instance, n, seed, target):
        """Elimination and exhaustive search give the same states in the same order."""
        problem = make_instance(n, seed)

        fast = enumerate_low_states(problem, target)
        slow = brute_force_low_states(problem, target)

        assert energy_multiset(fast) == energy_multiset(slow)
        assert fast.states == slow.states
        assert fast.size >= target

    def test_result_is_closed(self, make_instance):
        """No single-flip neighbor outside the basis ties or undercuts the top level."""
        problem = make_instance(10, seed=5)
        basis = enumerate_low_states(problem, 25)

        assert closure_violations(problem, basis) == []

    def test_rejects_nonpositive_target(self, two_qubit_problem):
        """target_size must be at least 1."""
        with pytest.raises(ContractViolationError):
            enumerate_low_states(two_qubit_problem, 0)

    def test_memory_budget_enforced(self, mocker):
        """Tables larger than the budget raise ResourceError before any work."""
        mocker.patch(
            "effham.core.enumeration.settings",
            Settings(enumeration=EnumerationSettings(memory_budget_entries=10)),
        )
        n, edges = chimera(1, 1, 4)

        with pytest.raises(ResourceError) as excinfo:
            enumerate_low_states(generate_instance(n, edges, 0), 50)

        assert excinfo.value.width == 4

    def test_records_width_metric(self, metrics, make_instance):
        """The attained width is published as a gauge."""
        enumerate_low_states(make_instance(8, seed=0), 5)

        assert metrics.enumeration_width.get() >= 1


class TestBruteForce:
    """Tests for the exhaustive reference."""

    def test_refuses_large_problems(self):
        """More than 24 qubits is infeasible."""
        problem = IsingProblem(n=25, h=tuple([0.0] * 25))

        with pytest.raises(FeasibilityError):
            brute_force_low_states(problem, 1)

    def test_closes_degenerate_level(self, uniform_field_problem):
        """Same closure rule as the elimination path."""
        assert brute_force_low_states(uniform_field_problem, 2).size == 4


class TestSubspaceBasis:
    """Tests for the basis type and its audit helpers."""

    def test_closure_violations_found_for_truncated_level(self, uniform_field_problem):
        """Cutting a degenerate level leaves tied neighbors outside."""
        basis = SubspaceBasis(
            n=3,
            states=(7, 6),
            energies=np.array([-3.0, -1.0]),
            bits=np.array([[1, 1, 1], [0, 1, 1]]),
        )

        assert closure_violations(uniform_field_problem, basis) == [3, 5]

    def test_index_of(self, two_qubit_problem):
        """Positions follow basis order; states outside the basis have none."""
        basis = enumerate_low_states(two_qubit_problem, 2)

        assert [basis.index_of(state) for state in basis.states] == [0, 1]
        assert basis.index_of(0b01) is None

    def test_rejects_duplicate_states(self):
        """States must be distinct."""
        with pytest.raises(ContractViolationError):
            SubspaceBasis(n=1, states=(0, 0), energies=np.zeros(2), bits=np.zeros((2, 1)))

    def test_arrays_are_read_only(self, two_qubit_problem):
        """A built basis cannot be mutated."""
        basis = enumerate_low_states(two_qubit_problem, 2)

        with pytest.raises(ValueError):
            basis.energies[0] = 0.0

    def test_records(self, two_qubit_problem):
        """Audit records carry bit strings and energies."""
        records = enumerate_low_states(two_qubit_problem, 2).to_records()

        assert [r["bits"] for r in records] == ["11", "00"]
        assert records[1]["energy"] == pytest.approx(-1.0 / 3.0)
