"""
Spectrum Sweep Service.

Runs the effective-Hamiltonian method across an s-grid: builds H~(k) for
every level, diagonalizes it, selects the physical eigenvalue, tracks
levels through crossings and locates the minimum gap.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from effham.config import settings
from effham.core.eigensolve import EigenDecomposition, diagonalize_symmetric
from effham.core.enumeration import SubspaceBasis, enumerate_low_states
from effham.core.exceptions import (
    ComputationError,
    ContractViolationError,
    DomainError,
    SingularDenominatorError,
)
from effham.core.ising import IsingProblem
from effham.core.perturbation import (
    FlipNeighborhood,
    OrderConfig,
    SmallParameterEstimate,
    build_effective_hamiltonian,
    estimate_small_parameter,
)
from effham.core.schedule import Schedule
from effham.infrastructure.logging import get_logger, log_duration
from effham.infrastructure.metrics import get_metrics


logger = get_logger(__name__)

T = TypeVar("T")

# Warning codes, in reporting order
SINGULAR_DENOM = "SINGULAR_DENOM"
COMPUTATION_FAILED = "COMPUTATION_FAILED"
AMBIGUOUS_TRACK = "AMBIGUOUS_TRACK"
LAMBDA_UNTRUSTED = "LAMBDA_UNTRUSTED"
NEGATIVE_GAP = "NEGATIVE_GAP"
WARNING_CODES = (SINGULAR_DENOM, COMPUTATION_FAILED, AMBIGUOUS_TRACK, LAMBDA_UNTRUSTED, NEGATIVE_GAP)


class SelectionRule(str, Enum):
    """How the physical eigenvalue of H~(k) is picked."""
    INDEX = "index"
    OVERLAP = "overlap"
    AUTO = "auto"


@dataclass(frozen=True, eq=False)
class LevelSelection:
    """
    Eigenpair chosen for one level at one schedule point.

    Attributes:
        k_index: Target level.
        selected_eigenvalue: E_k.
        selected_vector: Normalized projected eigenvector |k>_P.
        selection_rule: Rule actually applied (index or overlap).
        eigen_index: Position of the pair in the decomposition.
        overlap: |<v_new|v_prev>| for overlap selections.
        warnings: Warning codes attached to this selection.
    """
    k_index: int
    selected_eigenvalue: float
    selected_vector: np.ndarray = field(repr=False)
    selection_rule: SelectionRule
    eigen_index: int
    overlap: Optional[float] = None
    warnings: Tuple[str, ...] = ()


@dataclass(frozen=True)
class PointFailure:
    """A (s, k) task that produced no eigenvalue."""
    s: float
    k_index: int
    code: str
    message: str


@dataclass(frozen=True)
class MinGap:
    """Located minimum of the gap curve."""
    s_star: float
    gap: float
    refined: bool


@dataclass(frozen=True)
class SweepConfig:
    """
    Sweep parameters.

    Attributes:
        target_size: Requested N_S before degeneracy closure.
        levels: Number of levels m to follow.
        s_grid: Strictly ascending schedule points in [0, 1].
        orders: Perturbation orders.
        selection_rule: Eigenvalue selection rule.
        max_workers: Thread count for independent tasks; defaults to settings.
    """
    target_size: int
    levels: int
    s_grid: Tuple[float, ...]
    orders: OrderConfig = OrderConfig()
    selection_rule: SelectionRule = SelectionRule.AUTO
    max_workers: Optional[int] = None

    def __post_init__(self) -> None:
        grid = tuple(float(s) for s in self.s_grid)
        if not grid:
            raise ContractViolationError("s_grid must not be empty")
        for s in grid:
            if not (0.0 <= s <= 1.0):
                raise DomainError("s", s, 0.0, 1.0)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ContractViolationError("s_grid must be strictly ascending")
        if self.levels < 1 or self.target_size < 1:
            raise ContractViolationError("levels and target_size must be positive")
        if self.levels > self.target_size:
            raise ContractViolationError(
                f"levels={self.levels} exceeds target_size={self.target_size}"
            )
        object.__setattr__(self, "s_grid", grid)
        object.__setattr__(self, "selection_rule", SelectionRule(self.selection_rule))


@dataclass(frozen=True, eq=False)
class SpectrumSweep:
    """
    Result of a sweep.

    Attributes:
        s_grid: Schedule points, shape (G,).
        levels: Selected E_k per point, shape (G, m); NaN where the task failed.
        lambda_estimates: lambda_k per point, shape (G, m).
        overlaps: Overlap of each overlap-rule selection, NaN for index selections.
        gap_curve: E_1 - E_0 per point; NaN when m = 1 or either level failed.
        min_gap: Located minimum gap, None when no finite gap exists.
        warnings: Sorted warning codes per point.
        failures: Failed (s, k) tasks.
        basis_size: N_S after closure.
    """
    s_grid: np.ndarray
    levels: np.ndarray
    lambda_estimates: np.ndarray
    overlaps: np.ndarray
    gap_curve: np.ndarray
    min_gap: Optional[MinGap]
    warnings: Tuple[Tuple[str, ...], ...]
    failures: Tuple[PointFailure, ...]
    basis_size: int

    @property
    def m(self) -> int:
        return int(self.levels.shape[1])

    @property
    def relative_levels(self) -> np.ndarray:
        """E_k - E_0 per point."""
        return self.levels - self.levels[:, :1]


# =============================================================================
# Selection and minimum gap
# =============================================================================

def select_level(
    decomposition: EigenDecomposition,
    k_index: int,
    previous: Optional[LevelSelection] = None,
    rule: SelectionRule = SelectionRule.INDEX,
) -> LevelSelection:
    """
    Pick the physical eigenpair of H~(k).

    Args:
        decomposition: Eigendecomposition of H~(k).
        k_index: Target level.
        previous: Selection for the same level at the previous grid point.
        rule: INDEX takes the k-th smallest eigenvalue; OVERLAP takes the pair
            with the largest |<v|previous>|.

    Returns:
        LevelSelection, with AMBIGUOUS_TRACK attached when the best overlap is
        below the configured threshold.

    Raises:
        ContractViolationError: If k_index is out of range, the overlap rule
            has no previous selection, or rule is AUTO.
    """
    rule = SelectionRule(rule)
    if not (0 <= k_index < decomposition.size):
        raise ContractViolationError(
            f"k_index {k_index} outside decomposition of size {decomposition.size}"
        )
    if rule == SelectionRule.INDEX:
        return LevelSelection(
            k_index=k_index,
            selected_eigenvalue=float(decomposition.eigenvalues[k_index]),
            selected_vector=decomposition.vector(k_index),
            selection_rule=rule,
            eigen_index=k_index,
        )
    if rule != SelectionRule.OVERLAP:
        raise ContractViolationError(f"select_level needs a concrete rule, got {rule.value}")
    if previous is None:
        raise ContractViolationError("Overlap selection requires a previous selection")
    if previous.selected_vector.shape[0] != decomposition.size:
        raise ContractViolationError("Previous selection lives in a different basis")

    overlaps = np.abs(decomposition.eigenvectors.T @ previous.selected_vector)
    best = int(np.argmax(overlaps))
    overlap = float(overlaps[best])
    warnings: Tuple[str, ...] = ()
    if overlap < settings.sweep.ambiguous_overlap:
        warnings = (AMBIGUOUS_TRACK,)
    return LevelSelection(
        k_index=k_index,
        selected_eigenvalue=float(decomposition.eigenvalues[best]),
        selected_vector=decomposition.vector(best),
        selection_rule=rule,
        eigen_index=best,
        overlap=overlap,
        warnings=warnings,
    )


def parabolic_minimum(
    xs: Sequence[float], ys: Sequence[float]
) -> Optional[Tuple[float, float]]:
    """
    Vertex of the parabola through three points.

    Returns:
        (x, y) of the vertex, or None when the points are not convex.
    """
    (x0, x1, x2), (y0, y1, y2) = xs, ys
    # Divided differences; spacing may be uneven
    d01 = (y1 - y0) / (x1 - x0)
    d12 = (y2 - y1) / (x2 - x1)
    curvature = (d12 - d01) / (x2 - x0)
    if curvature <= 0.0:
        return None
    slope = d01 - curvature * (x0 + x1)
    x_star = -slope / (2.0 * curvature)
    y_star = y0 + d01 * (x_star - x0) + curvature * (x_star - x0) * (x_star - x1)
    return x_star, y_star


def locate_min_gap(s_grid: Sequence[float], gaps: Sequence[float]) -> Optional[MinGap]:
    """
    Grid argmin of a gap curve, refined by a 3-point parabola when interior.

    Non-finite gaps are ignored. Endpoints and minima next to a missing
    value are returned unrefined.
    """
    s_values = np.asarray(s_grid, dtype=np.float64)
    values = np.asarray(gaps, dtype=np.float64)
    finite = np.isfinite(values)
    if not finite.any():
        return None
    i = int(np.argmin(np.where(finite, values, np.inf)))
    if 0 < i < len(values) - 1 and finite[i - 1] and finite[i + 1]:
        vertex = parabolic_minimum(s_values[i - 1 : i + 2], values[i - 1 : i + 2])
        if vertex is not None:
            return MinGap(s_star=float(vertex[0]), gap=float(vertex[1]), refined=True)
    return MinGap(s_star=float(s_values[i]), gap=float(values[i]), refined=False)


def find_min_gap(sweep: SpectrumSweep) -> Optional[MinGap]:
    """Minimum of a sweep's gap curve."""
    return locate_min_gap(sweep.s_grid, sweep.gap_curve)


# =============================================================================
# Service
# =============================================================================

@dataclass(frozen=True, eq=False)
class _PointResult:
    decomposition: Optional[EigenDecomposition]
    estimate: SmallParameterEstimate
    failure: Optional[PointFailure]


class SweepService:
    """
    Service running spectrum sweeps.

    Responsible for:
    - Enumerating the low-energy basis (unless one is supplied)
    - Building and diagonalizing H~(k) for each (s, k) task
    - Selecting and tracking levels, recording per-point failures
    """

    def __init__(
        self,
        enumerate_basis: Optional[Callable[[IsingProblem, int], SubspaceBasis]] = None,
    ) -> None:
        self._enumerate_basis = enumerate_basis or enumerate_low_states

    def _solve_point(
        self,
        problem: IsingProblem,
        basis: SubspaceBasis,
        neighborhood: FlipNeighborhood,
        schedule: Schedule,
        orders: OrderConfig,
        s: float,
        k_index: int,
    ) -> _PointResult:
        estimate = estimate_small_parameter(problem, basis, k_index, s, schedule, neighborhood)
        try:
            hamiltonian = build_effective_hamiltonian(
                problem, basis, k_index, s, schedule, orders, neighborhood
            )
            decomposition = diagonalize_symmetric(hamiltonian.matrix)
        except SingularDenominatorError as e:
            return _PointResult(None, estimate, PointFailure(s, k_index, SINGULAR_DENOM, e.message))
        except ComputationError as e:
            return _PointResult(
                None, estimate, PointFailure(s, k_index, COMPUTATION_FAILED, e.message)
            )
        return _PointResult(decomposition, estimate, None)

    @staticmethod
    def _map(
        workers: int, func: Callable[..., T], tasks: Sequence[Tuple]
    ) -> List[T]:
        """Run tasks in order, on a thread pool when more than one worker is allowed."""
        if workers <= 1 or len(tasks) <= 1:
            return [func(*task) for task in tasks]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda task: func(*task), tasks))

    @staticmethod
    def _overlap_levels(levels: np.ndarray, g: int) -> List[bool]:
        """
        Levels whose auto rule switches to overlap at grid point g.

        A pair of adjacent levels switches when their separation at g-1 is
        below auto_switch_factor times the larger of their last grid motions.
        """
        m = levels.shape[1]
        switch = [False] * m
        if g < 2 or m < 2:
            return switch
        motion = np.abs(levels[g - 1] - levels[g - 2])
        factor = settings.sweep.auto_switch_factor
        for k in range(m - 1):
            separation = abs(levels[g - 1, k + 1] - levels[g - 1, k])
            if separation < factor * max(motion[k], motion[k + 1]):
                switch[k] = switch[k + 1] = True
        return switch

    @log_duration("run_sweep")
    def run(
        self,
        problem: IsingProblem,
        schedule: Schedule,
        config: SweepConfig,
        basis: Optional[SubspaceBasis] = None,
    ) -> SpectrumSweep:
        """
        Sweep the configured levels over the s-grid.

        Args:
            problem: The Ising problem.
            schedule: Energy scales.
            config: Sweep parameters.
            basis: Precomputed basis; enumerated from config.target_size when absent.

        Returns:
            SpectrumSweep; failed points are recorded, never raised.

        Raises:
            ContractViolationError: If the basis is smaller than the level count.
        """
        if basis is None:
            basis = self._enumerate_basis(problem, config.target_size)
        m = config.levels
        if m > basis.size:
            raise ContractViolationError(f"levels={m} exceeds basis size {basis.size}")
        neighborhood = FlipNeighborhood(problem, basis)
        grid = config.s_grid
        workers = config.max_workers or settings.sweep.max_workers
        rule = config.selection_rule

        levels = np.full((len(grid), m), np.nan)
        lambdas = np.full((len(grid), m), np.nan)
        overlaps = np.full((len(grid), m), np.nan)
        codes: List[set] = [set() for _ in grid]
        failures: List[PointFailure] = []

        logger.info(
            f"Sweeping {m} levels over {len(grid)} points",
            extra={"extra_fields": {
                "basis_size": basis.size,
                "levels": m,
                "points": len(grid),
                "rule": rule.value,
                "workers": workers,
            }}
        )

        def solve(g: int, k: int) -> _PointResult:
            return self._solve_point(
                problem, basis, neighborhood, schedule, config.orders, grid[g], k
            )

        def record(g: int, k: int, result: _PointResult) -> None:
            lambdas[g, k] = result.estimate.lambda_k
            if not result.estimate.trusted:
                codes[g].add(LAMBDA_UNTRUSTED)
            if result.failure is not None:
                failures.append(result.failure)
                codes[g].add(result.failure.code)
                get_metrics().sweep_point_failures_total.inc(code=result.failure.code)
                logger.warning(
                    f"Point failed at s={grid[g]} k={k}: {result.failure.message}",
                    extra={"extra_fields": {"s": grid[g], "k_index": k, "code": result.failure.code}}
                )

        if rule == SelectionRule.INDEX:
            tasks = [(g, k) for g in range(len(grid)) for k in range(m)]
            for (g, k), result in zip(tasks, self._map(workers, solve, tasks)):
                record(g, k, result)
                if result.decomposition is not None:
                    levels[g, k] = select_level(result.decomposition, k).selected_eigenvalue
        else:
            previous: Dict[int, LevelSelection] = {}
            for g in range(len(grid)):
                if rule == SelectionRule.OVERLAP:
                    use_overlap = [True] * m
                else:
                    use_overlap = self._overlap_levels(levels, g)
                results = self._map(workers, solve, [(g, k) for k in range(m)])
                for k, result in enumerate(results):
                    record(g, k, result)
                    if result.decomposition is None:
                        previous.pop(k, None)
                        continue
                    if use_overlap[k] and k in previous:
                        selection = select_level(
                            result.decomposition, k, previous[k], SelectionRule.OVERLAP
                        )
                        overlaps[g, k] = selection.overlap
                        codes[g].update(selection.warnings)
                    else:
                        selection = select_level(result.decomposition, k)
                    previous[k] = selection
                    levels[g, k] = selection.selected_eigenvalue

        gap_curve = levels[:, 1] - levels[:, 0] if m >= 2 else np.full(len(grid), np.nan)
        for g in np.nonzero(np.nan_to_num(gap_curve, nan=0.0) < 0.0)[0]:
            codes[g].add(NEGATIVE_GAP)
            logger.error(
                f"Negative gap at s={grid[g]}",
                extra={"extra_fields": {"s": grid[g], "gap": float(gap_curve[g])}}
            )

        failures.sort(key=lambda f: (f.s, f.k_index))
        min_gap = locate_min_gap(grid, gap_curve)
        return SpectrumSweep(
            s_grid=np.asarray(grid),
            levels=levels,
            lambda_estimates=lambdas,
            overlaps=overlaps,
            gap_curve=gap_curve,
            min_gap=min_gap,
            warnings=tuple(tuple(c for c in WARNING_CODES if c in point) for point in codes),
            failures=tuple(failures),
            basis_size=basis.size,
        )


def run_sweep(
    problem: IsingProblem,
    schedule: Schedule,
    config: SweepConfig,
    basis: Optional[SubspaceBasis] = None,
) -> SpectrumSweep:
    """Run a spectrum sweep with the default service."""
    return SweepService().run(problem, schedule, config, basis)
