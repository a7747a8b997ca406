"""
Tests for the Exact Oracle Service.
"""

import numpy as np
import pytest

from effham.core.exceptions import ContractViolationError
from effham.services.oracle import compare_sweeps, exact_sweep
from effham.services.sweep import SweepConfig, run_sweep


GRID = (0.1, 0.3, 0.5, 0.7, 0.9)


class TestExactSweep:
    """Tests for exact_sweep."""

    def test_single_qubit_levels(self, single_qubit_problem, linear_schedule):
        """Rows hold -+(1/2) sqrt(Delta^2 + Eps^2)."""
        exact = exact_sweep(single_qubit_problem, linear_schedule, GRID, 2)

        s = np.asarray(GRID)
        half = 5.0 * np.hypot(1.0 - s, s)
        assert np.allclose(exact.levels, np.column_stack([-half, half]), atol=1e-12)
        assert np.allclose(exact.gap_curve, 2.0 * half, atol=1e-12)
        assert exact.method == "dense"

    def test_min_gap(self, single_qubit_problem, linear_schedule):
        """The exact gap minimum sits at s = 1/2."""
        exact = exact_sweep(single_qubit_problem, linear_schedule, GRID, 2)

        assert exact.min_gap.s_star == pytest.approx(0.5, abs=1e-6)
        assert exact.min_gap.refined

    def test_single_level_has_no_gap(self, single_qubit_problem, linear_schedule):
        """m = 1 gives an all-NaN gap curve."""
        exact = exact_sweep(single_qubit_problem, linear_schedule, GRID, 1)

        assert np.all(np.isnan(exact.gap_curve))
        assert exact.min_gap is None


class TestCompareSweeps:
    """Tests for compare_sweeps."""

    def test_full_basis_has_no_error(self, asymmetric_problem, linear_schedule):
        """The whole Hilbert space makes the method exact."""
        sweep = run_sweep(
            asymmetric_problem,
            linear_schedule,
            SweepConfig(target_size=8, levels=3, s_grid=GRID, selection_rule="index"),
        )
        exact = exact_sweep(asymmetric_problem, linear_schedule, GRID, 4)

        comparison = compare_sweeps(sweep, exact)

        assert comparison.errors.shape == (len(GRID), 3)
        assert comparison.max_error <= 1e-9
        assert np.all(comparison.relative_errors <= 1e-9)
        assert comparison.max_error == pytest.approx(comparison.row_max_error.max())

    def test_failed_points_are_skipped(self, asymmetric_problem, linear_schedule):
        """NaN levels give NaN errors and do not enter the maximum."""
        grid = (0.0, 0.5, 1.0)
        sweep = run_sweep(
            asymmetric_problem,
            linear_schedule,
            SweepConfig(target_size=2, levels=2, s_grid=grid, selection_rule="index"),
        )
        exact = exact_sweep(asymmetric_problem, linear_schedule, grid, 2)

        comparison = compare_sweeps(sweep, exact)

        assert np.isnan(comparison.row_max_error[0])
        assert np.isfinite(comparison.max_error)

    def test_rejects_different_grids(self, single_qubit_problem, linear_schedule):
        """Sweep and exact grids must be identical."""
        sweep = run_sweep(
            single_qubit_problem, linear_schedule, SweepConfig(target_size=2, levels=2, s_grid=GRID)
        )
        exact = exact_sweep(single_qubit_problem, linear_schedule, GRID[:-1], 2)

        with pytest.raises(ContractViolationError):
            compare_sweeps(sweep, exact)

    def test_rejects_fewer_exact_levels(self, single_qubit_problem, linear_schedule):
        """The exact sweep needs at least the sweep's m levels."""
        sweep = run_sweep(
            single_qubit_problem, linear_schedule, SweepConfig(target_size=2, levels=2, s_grid=GRID)
        )
        exact = exact_sweep(single_qubit_problem, linear_schedule, GRID, 1)

        with pytest.raises(ContractViolationError):
            compare_sweeps(sweep, exact)
