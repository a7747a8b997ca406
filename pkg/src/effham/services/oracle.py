"""
Exact Oracle Service.

Exact spectra of H(s) over an s-grid, and comparison of an approximate
sweep against them.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from effham.core.eigensolve import exact_spectrum
from effham.core.exceptions import ContractViolationError
from effham.core.ising import IsingProblem
from effham.core.schedule import Schedule
from effham.infrastructure.logging import get_logger, log_duration
from effham.services.sweep import MinGap, SpectrumSweep, locate_min_gap


logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class ExactSweep:
    """
    Exact lowest levels over an s-grid.

    Attributes:
        s_grid: Schedule points.
        levels: Shape (G, m) exact eigenvalues, ascending per row.
        method: Eigensolver path used.
    """
    s_grid: np.ndarray
    levels: np.ndarray
    method: str

    @property
    def m(self) -> int:
        return int(self.levels.shape[1])

    @property
    def relative_levels(self) -> np.ndarray:
        return self.levels - self.levels[:, :1]

    @property
    def gap_curve(self) -> np.ndarray:
        if self.m < 2:
            return np.full(len(self.s_grid), np.nan)
        return self.levels[:, 1] - self.levels[:, 0]

    @property
    def min_gap(self) -> Optional[MinGap]:
        return locate_min_gap(self.s_grid, self.gap_curve)


@dataclass(frozen=True, eq=False)
class Comparison:
    """
    Approximate-versus-exact errors.

    Attributes:
        s_grid: Schedule points.
        errors: |E_k - X_k| per point and level; NaN where the sweep failed.
        relative_errors: |(E_k - E_0) - (X_k - X_0)| per point and level.
        row_max_error: Largest absolute error per point.
        max_error: Largest absolute error overall; NaN when nothing compared.
    """
    s_grid: np.ndarray
    errors: np.ndarray
    relative_errors: np.ndarray
    row_max_error: np.ndarray
    max_error: float


@log_duration("exact_sweep")
def exact_sweep(
    problem: IsingProblem,
    schedule: Schedule,
    s_grid: Sequence[float],
    m: int,
    method: str = "auto",
    rng_seed: Optional[int] = None,
) -> ExactSweep:
    """
    Lowest m exact eigenvalues of H(s) at every grid point.

    Raises:
        FeasibilityError: If n is beyond the exact limit.
        ConvergenceError: If the iterative path fails at some point.
    """
    spectra = [exact_spectrum(problem, s, schedule, m, method, rng_seed) for s in s_grid]
    return ExactSweep(
        s_grid=np.asarray(s_grid, dtype=np.float64),
        levels=np.vstack([spectrum.eigenvalues for spectrum in spectra]),
        method=spectra[0].method if spectra else method,
    )


def _nanmax_rows(values: np.ndarray) -> np.ndarray:
    finite = np.isfinite(values)
    rows = np.where(finite, values, -np.inf).max(axis=1)
    return np.where(finite.any(axis=1), rows, np.nan)


def compare_sweeps(sweep: SpectrumSweep, exact: ExactSweep) -> Comparison:
    """
    Per-level absolute and relative-energy errors of a sweep.

    Raises:
        ContractViolationError: If the grids differ or the exact sweep has fewer levels.
    """
    if sweep.s_grid.shape != exact.s_grid.shape or not np.array_equal(sweep.s_grid, exact.s_grid):
        raise ContractViolationError("Sweep and exact grids differ")
    if exact.m < sweep.m:
        raise ContractViolationError(
            f"Exact sweep has {exact.m} levels, approximate sweep has {sweep.m}"
        )
    reference = exact.levels[:, : sweep.m]
    errors = np.abs(sweep.levels - reference)
    relative_errors = np.abs(sweep.relative_levels - (reference - reference[:, :1]))
    row_max = _nanmax_rows(errors)
    finite = np.isfinite(row_max)
    max_error = float(row_max[finite].max()) if finite.any() else float("nan")
    logger.info(
        "Compared sweep against exact spectrum",
        extra={"extra_fields": {"max_error": max_error, "points": int(len(row_max))}}
    )
    return Comparison(
        s_grid=sweep.s_grid,
        errors=errors,
        relative_errors=relative_errors,
        row_max_error=row_max,
        max_error=max_error,
    )
