"""
Tests for the eigensolvers.

Tests the dense symmetric decomposition, the matrix-free transverse-field
operator, Lanczos iteration and the exact-spectrum oracle.
"""

import numpy as np
import pytest
from scipy.sparse.linalg import LinearOperator

from effham.core.eigensolve import (
    dense_hamiltonian,
    diagonalize_symmetric,
    exact_spectrum,
    lanczos_lowest,
    transverse_field_operator,
)
from effham.core.exceptions import (
    ContractViolationError,
    ConvergenceError,
    FeasibilityError,
)
from effham.core.ising import IsingProblem, all_classical_energies
from effham.core.schedule import Schedule


def random_symmetric(size: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((size, size))
    return (a + a.T) / 2.0


def diagonal_operator(values) -> LinearOperator:
    values = np.asarray(values, dtype=np.float64)
    return LinearOperator(
        (values.size, values.size), matvec=lambda x: values * np.ravel(x), dtype=np.float64
    )


class TestDiagonalizeSymmetric:
    """Tests for diagonalize_symmetric."""

    def test_identity(self):
        """The identity has all eigenvalues 1."""
        result = diagonalize_symmetric(np.eye(3))

        assert result.eigenvalues.tolist() == pytest.approx([1.0, 1.0, 1.0])

    def test_pauli_x(self):
        """sigma^x has eigenvalues -1 and +1."""
        result = diagonalize_symmetric(np.array([[0.0, 1.0], [1.0, 0.0]]))

        assert result.eigenvalues.tolist() == pytest.approx([-1.0, 1.0])

    @pytest.mark.parametrize("seed", range(5))
    def test_decomposition_contract(self, seed):
        """Ascending, orthonormal, reconstructing and trace preserving."""
        matrix = random_symmetric(12, seed)

        result = diagonalize_symmetric(matrix)
        q, w = result.eigenvectors, result.eigenvalues

        assert np.all(np.diff(w) >= 0.0)
        assert np.allclose(q.T @ q, np.eye(12), atol=1e-12)
        assert np.allclose(q @ np.diag(w) @ q.T, matrix, atol=1e-10 * np.abs(matrix).max())
        assert w.sum() == pytest.approx(np.trace(matrix), abs=1e-10)

    def test_sign_convention(self):
        """Each eigenvector's largest-magnitude component is positive."""
        result = diagonalize_symmetric(random_symmetric(8, 3))

        for i in range(result.size):
            vector = result.vector(i)
            assert vector[np.argmax(np.abs(vector))] > 0.0

    def test_rank_one_update_interlaces(self):
        """Adding rho u u^T with rho > 0 moves each eigenvalue up by at most one slot."""
        matrix = random_symmetric(6, 1)
        u = np.random.default_rng(2).standard_normal(6)
        before = diagonalize_symmetric(matrix).eigenvalues
        after = diagonalize_symmetric(matrix + 0.7 * np.outer(u, u)).eigenvalues

        assert np.all(after >= before - 1e-12)
        assert np.all(after[:-1] <= before[1:] + 1e-12)

    @pytest.mark.parametrize(
        "matrix",
        [
            np.ones((2, 3)),
            np.array([[0.0, 1.0], [0.0, 0.0]]),
            np.array([[np.nan, 0.0], [0.0, 1.0]]),
        ],
    )
    def test_rejects_bad_input(self, matrix):
        """Non-square, asymmetric and non-finite matrices are refused."""
        with pytest.raises(ContractViolationError):
            diagonalize_symmetric(matrix)


class TestTransverseFieldOperator:
    """Tests for the matrix-free H(s)."""

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_matches_dense_columns(self, make_instance, linear_schedule, n):
        """Applying the operator to e_j gives column j of the dense matrix."""
        problem = make_instance(n, seed=n)
        operator = transverse_field_operator(problem, 0.35, linear_schedule)
        dense = dense_hamiltonian(problem, 0.35, linear_schedule)

        for j in range(1 << n):
            unit = np.zeros(1 << n)
            unit[j] = 1.0
            assert np.allclose(operator.matvec(unit), dense[:, j], atol=1e-14)

    def test_dense_is_symmetric(self, make_instance, linear_schedule):
        """H(s) is real symmetric."""
        dense = dense_hamiltonian(make_instance(5, seed=0), 0.5, linear_schedule)

        assert np.array_equal(dense, dense.T)

    def test_size_limits(self, linear_schedule):
        """Exact paths refuse problems beyond their limits."""
        with pytest.raises(FeasibilityError):
            transverse_field_operator(IsingProblem(n=21, h=(0.0,) * 21), 0.5, linear_schedule)
        with pytest.raises(FeasibilityError):
            dense_hamiltonian(IsingProblem(n=13, h=(0.0,) * 13), 0.5, linear_schedule)


class TestLanczosLowest:
    """Tests for lanczos_lowest."""

    def test_matches_dense_eigenvalues(self, make_instance, linear_schedule):
        """Lowest Ritz values agree with a dense solve."""
        problem = make_instance(8, seed=1)
        dense = np.linalg.eigvalsh(dense_hamiltonian(problem, 0.5, linear_schedule))[:4]

        result = lanczos_lowest(transverse_field_operator(problem, 0.5, linear_schedule), 4, 0)

        assert np.allclose(result.eigenvalues, dense, atol=1e-8)
        assert result.eigenvectors.shape == (256, 4)

    def test_restarts_to_resolve_degenerate_levels(self):
        """Degenerate copies missing from the first Krylov space are still found."""
        result = lanczos_lowest(diagonal_operator([0.0, 0.0, 1.0, 1.0, 2.0]), 3, rng_seed=5)

        assert np.allclose(result.eigenvalues, [0.0, 0.0, 1.0], atol=1e-10)

    def test_finds_every_copy_of_degenerate_levels(self, linear_schedule):
        """Uncoupled identical qubits: the first excited level is eightfold degenerate."""
        problem = IsingProblem(n=8, h=(1.0,) * 8)
        half = 0.5 * np.hypot(5.0, 5.0)
        operator = transverse_field_operator(problem, 0.5, linear_schedule)

        result = lanczos_lowest(operator, 6, 3)

        expected = [-8.0 * half] + [-6.0 * half] * 5
        assert np.allclose(result.eigenvalues, expected, atol=1e-8)

    @pytest.mark.parametrize("seed", range(5))
    def test_diagonal_operator_with_degenerate_energies(
        self, make_instance, linear_schedule, seed
    ):
        """At s = 1 the operator is diagonal; all degenerate classical levels come back."""
        problem = make_instance(8, seed)
        operator = transverse_field_operator(problem, 1.0, linear_schedule)

        result = lanczos_lowest(operator, 6, seed)

        expected = 5.0 * np.sort(all_classical_energies(problem))[:6]
        assert np.allclose(result.eigenvalues, expected, atol=1e-8)

    def test_eigenvectors_are_orthonormal(self):
        """Pairs from separate deflation runs stay mutually orthogonal."""
        operator = diagonal_operator([0.0, 0.0, 0.0, 1.0, 1.0, 2.0, 3.0])

        result = lanczos_lowest(operator, 5, 2)

        gram = result.eigenvectors.T @ result.eigenvectors
        assert np.allclose(result.eigenvalues, [0.0, 0.0, 0.0, 1.0, 1.0], atol=1e-10)
        assert np.allclose(gram, np.eye(5), atol=1e-8)

    def test_raises_when_not_converged(self, make_instance, linear_schedule):
        """A Krylov cap too small for the tolerance gives ConvergenceError."""
        operator = transverse_field_operator(make_instance(8, seed=2), 0.5, linear_schedule)

        with pytest.raises(ConvergenceError) as excinfo:
            lanczos_lowest(operator, 6, rng_seed=0, tolerance=1e-14, max_krylov=7)

        assert len(excinfo.value.residuals) == 6

    def test_rejects_bad_level_count(self):
        """m must lie in [1, dim]."""
        with pytest.raises(ContractViolationError):
            lanczos_lowest(diagonal_operator([1.0, 2.0]), 3)

    def test_records_iterations(self, metrics):
        """Krylov dimension reached is observed."""
        lanczos_lowest(diagonal_operator([3.0, 1.0, 2.0]), 1, rng_seed=0)

        assert metrics.lanczos_iterations.summary()[""]["count"] == 1


class TestExactSpectrum:
    """Tests for exact_spectrum."""

    @pytest.mark.parametrize("s", [0.0, 0.3, 0.5, 1.0])
    def test_single_qubit_closed_form(self, single_qubit_problem, linear_schedule, s):
        """One qubit: +-(1/2) sqrt(Delta^2 + Eps^2)."""
        delta, eps = 10.0 * (1.0 - s), 10.0 * s
        half = 0.5 * np.hypot(delta, eps)

        result = exact_spectrum(single_qubit_problem, s, linear_schedule, 2)

        assert result.eigenvalues.tolist() == pytest.approx([-half, half], abs=1e-12)
        assert result.method == "dense"

    def test_no_transverse_field(self, make_instance, linear_schedule):
        """At Delta = 0 the spectrum is (Eps/2) times the sorted classical energies."""
        problem = make_instance(6, seed=3)

        result = exact_spectrum(problem, 1.0, linear_schedule, 5)

        expected = 5.0 * np.sort(all_classical_energies(problem))[:5]
        assert np.allclose(result.eigenvalues, expected, atol=1e-12)

    @pytest.mark.parametrize("s", [0.3, 0.5, 0.7, 1.0])
    def test_dense_and_lanczos_agree(self, make_instance, linear_schedule, s):
        """Both paths give the same lowest levels."""
        problem = make_instance(8, seed=7)

        dense = exact_spectrum(problem, s, linear_schedule, 6, method="dense")
        lanczos = exact_spectrum(problem, s, linear_schedule, 6, method="lanczos", rng_seed=1)

        assert np.allclose(dense.eigenvalues, lanczos.eigenvalues, atol=1e-8)
        assert lanczos.method == "lanczos"

    @pytest.mark.parametrize("seed", range(10))
    def test_lanczos_keeps_degenerate_levels_at_end_of_schedule(
        self, make_instance, linear_schedule, seed
    ):
        """At s = 1 the iterative path returns every degenerate classical level."""
        problem = make_instance(8, seed)

        dense = exact_spectrum(problem, 1.0, linear_schedule, 6, method="dense")
        lanczos = exact_spectrum(
            problem, 1.0, linear_schedule, 6, method="lanczos", rng_seed=seed
        )

        assert np.allclose(dense.eigenvalues, lanczos.eigenvalues, atol=1e-8)

    def test_ferromagnetic_chain_without_fields(self, linear_schedule):
        """Global-flip pairs and four-fold excited levels survive both paths."""
        problem = IsingProblem(
            n=8, h=(0.0,) * 8, couplings={(i, i + 1): -1.0 for i in range(7)}
        )

        dense = exact_spectrum(problem, 1.0, linear_schedule, 6, method="dense")
        lanczos = exact_spectrum(problem, 1.0, linear_schedule, 6, method="lanczos")

        expected = [-35.0, -35.0, -25.0, -25.0, -25.0, -25.0]
        assert dense.eigenvalues.tolist() == pytest.approx(expected)
        assert np.allclose(lanczos.eigenvalues, dense.eigenvalues, atol=1e-8)

    def test_rejects_unknown_method(self, two_qubit_problem, linear_schedule):
        """Only auto, dense and lanczos exist."""
        with pytest.raises(ContractViolationError):
            exact_spectrum(two_qubit_problem, 0.5, linear_schedule, 1, method="arpack")

    def test_rejects_too_many_levels(self, two_qubit_problem, linear_schedule):
        """m cannot exceed 2^n."""
        with pytest.raises(ContractViolationError):
            exact_spectrum(two_qubit_problem, 0.5, linear_schedule, 5)

    def test_refuses_large_problems(self, linear_schedule):
        """n > 20 is infeasible, and dense is capped lower."""
        with pytest.raises(FeasibilityError):
            exact_spectrum(IsingProblem(n=21, h=(0.0,) * 21), 0.5, linear_schedule, 1)
        with pytest.raises(FeasibilityError):
            exact_spectrum(IsingProblem(n=13, h=(0.0,) * 13), 0.5, linear_schedule, 1, "dense")

    def test_schedule_with_constant_scales(self, two_qubit_problem):
        """Results depend only on the scales at s."""
        flat = Schedule(points=((0.0, 1.0, 1.0), (1.0, 1.0, 1.0)))

        first = exact_spectrum(two_qubit_problem, 0.2, flat, 4)
        second = exact_spectrum(two_qubit_problem, 0.8, flat, 4)

        assert np.allclose(first.eigenvalues, second.eigenvalues, atol=1e-14)
