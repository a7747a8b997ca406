"""
Eigensolvers.

Dense symmetric decomposition for effective Hamiltonians, and the exact
oracle for the full 2^n-dimensional H(s) = -(Delta/2) sum_i sigma^x_i +
(Eps/2) H_P: a matrix-free LinearOperator solved by Lanczos, with a dense
path for small n.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import LinearOperator

from effham.config import settings
from effham.core.exceptions import ContractViolationError, ConvergenceError, FeasibilityError
from effham.core.ising import IsingProblem, all_classical_energies
from effham.core.schedule import Schedule, schedule_at
from effham.infrastructure.logging import get_logger, log_duration
from effham.infrastructure.metrics import get_metrics


logger = get_logger(__name__)

EXACT_METHODS = ("auto", "dense", "lanczos")


# =============================================================================
# Dense symmetric eigendecomposition
# =============================================================================

@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """
    Full decomposition of a real symmetric matrix.

    Attributes:
        eigenvalues: Ascending eigenvalues.
        eigenvectors: Orthonormal columns; column i belongs to eigenvalues[i]
            and has its largest-magnitude component positive.
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.eigenvalues.shape[0])

    def vector(self, i: int) -> np.ndarray:
        return self.eigenvectors[:, i]


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    if vectors.size == 0:
        return vectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def diagonalize_symmetric(matrix: np.ndarray) -> EigenDecomposition:
    """
    Decompose a real symmetric matrix.

    Args:
        matrix: N x N real matrix, symmetric within the configured relative tolerance.

    Returns:
        EigenDecomposition with ascending eigenvalues and sign-fixed eigenvectors.

    Raises:
        ContractViolationError: If the matrix is not square, not finite or not symmetric.
    """
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractViolationError(f"Expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractViolationError("Matrix has non-finite entries")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    asymmetry = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if asymmetry > settings.eigen.symmetry_tolerance * max(scale, 1.0):
        raise ContractViolationError(
            f"Matrix is not symmetric (max |A - A^T| = {asymmetry:.3e})",
            details={"asymmetry": asymmetry},
        )
    eigenvalues, eigenvectors = scipy.linalg.eigh(a)
    return EigenDecomposition(eigenvalues=eigenvalues, eigenvectors=_fix_signs(eigenvectors))


# =============================================================================
# Exact oracle for the full Hamiltonian
# =============================================================================

@dataclass(frozen=True, eq=False)
class ExactSpectrum:
    """
    Lowest exact eigenvalues of H(s).

    Attributes:
        s: Schedule point.
        eigenvalues: Lowest m eigenvalues, ascending.
        n: Qubit count.
        method: "dense" or "lanczos".
    """
    s: float
    eigenvalues: np.ndarray
    n: int
    method: str


@dataclass(frozen=True, eq=False)
class LanczosResult:
    """Ritz pairs from lanczos_lowest; iterations counts Krylov steps over all runs."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    residuals: np.ndarray
    iterations: int


def _check_exact_size(problem: IsingProblem) -> None:
    limit = settings.eigen.exact_max_qubits
    if problem.n > limit:
        raise FeasibilityError("exact_spectrum", limit, problem.n)


def transverse_field_operator(
    problem: IsingProblem, s: float, schedule: Schedule
) -> LinearOperator:
    """
    Matrix-free H(s) on the 2^n computational basis.

    The basis index is the state's bit integer. Each product applies the
    diagonal classical part and n single-bit flips.

    Raises:
        FeasibilityError: If n exceeds the exact-diagonalization limit.
    """
    _check_exact_size(problem)
    delta, eps = schedule_at(schedule, s)
    diagonal = 0.5 * eps * all_classical_energies(problem)
    amplitude = -0.5 * delta
    dim = 1 << problem.n
    n = problem.n

    def matvec(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        y = diagonal * x
        if amplitude != 0.0:
            for i in range(n):
                # Axis 1 is bit i
                y += amplitude * x.reshape(-1, 2, 1 << i)[:, ::-1, :].reshape(-1)
        return y

    return LinearOperator((dim, dim), matvec=matvec, rmatvec=matvec, dtype=np.float64)


def dense_hamiltonian(problem: IsingProblem, s: float, schedule: Schedule) -> np.ndarray:
    """
    Explicit 2^n x 2^n H(s).

    Raises:
        FeasibilityError: If n exceeds the dense limit.
    """
    limit = settings.eigen.dense_max_qubits
    if problem.n > limit:
        raise FeasibilityError("dense_hamiltonian", limit, problem.n)
    delta, eps = schedule_at(schedule, s)
    dim = 1 << problem.n
    index = np.arange(dim)
    matrix = np.diag(0.5 * eps * all_classical_energies(problem))
    for i in range(problem.n):
        matrix[index, index ^ (1 << i)] = -0.5 * delta
    return matrix


@dataclass(frozen=True, eq=False)
class _KrylovRun:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    iterations: int
    spread: float


def _krylov_run(
    operator: LinearOperator,
    m: int,
    rng: np.random.Generator,
    tolerance: float,
    krylov_cap: int,
    check_from: int,
    avoid: Optional[np.ndarray] = None,
) -> _KrylovRun:
    """
    Single-vector Lanczos with full reorthogonalization and breakdown restarts.

    With avoid given, start vectors are kept orthogonal to its columns and the
    search space is their complement.
    """
    dim = operator.shape[0]
    space_dim = dim - (0 if avoid is None else avoid.shape[1])
    krylov_cap = min(krylov_cap, space_dim)
    check_from = min(check_from, krylov_cap)
    basis = np.zeros((dim, krylov_cap))
    alphas: List[float] = []
    betas: List[float] = []

    def random_unit(span: np.ndarray) -> np.ndarray:
        vector = rng.standard_normal(dim)
        for block in (avoid, span):
            if block is not None and block.shape[1]:
                for _ in range(2):
                    vector = vector - block @ (block.T @ vector)
        return vector / np.linalg.norm(vector)

    vector = random_unit(basis[:, :0])
    residuals = np.full(m, np.inf)

    for j in range(krylov_cap):
        basis[:, j] = vector
        w = operator.matvec(vector).reshape(-1)
        alpha = float(vector @ w)
        w = w - alpha * vector
        if j > 0:
            w = w - betas[-1] * basis[:, j - 1]
        span = basis[:, : j + 1]
        for _ in range(2):
            w = w - span @ (span.T @ w)
            if avoid is not None:
                w = w - avoid @ (avoid.T @ w)
        beta = float(np.linalg.norm(w))
        alphas.append(alpha)

        steps = j + 1
        if steps >= check_from:
            theta, ritz = scipy.linalg.eigh_tridiagonal(np.array(alphas), np.array(betas))
            scale = max(float(np.max(np.abs(theta))), beta, np.finfo(float).tiny)
            residuals = np.abs(beta * ritz[-1, :m])
            if np.all(residuals <= tolerance * scale) or steps == space_dim:
                return _KrylovRun(
                    eigenvalues=theta[:m].copy(),
                    eigenvectors=basis[:, :steps] @ ritz[:, :m],
                    residuals=residuals,
                    iterations=steps,
                    spread=float(theta[-1] - theta[0]),
                )

        if steps == krylov_cap:
            break
        scale = max(abs(alpha), beta, 1.0)
        if beta <= 1e-12 * scale:
            logger.debug("Lanczos breakdown, restarting", extra={"extra_fields": {"step": steps}})
            vector = random_unit(span)
            betas.append(0.0)
        else:
            vector = w / beta
            betas.append(beta)

    raise ConvergenceError(
        f"Lanczos did not converge within {krylov_cap} Krylov vectors",
        residuals=[float(r) for r in residuals],
    )


def _deflated(operator: LinearOperator, vectors: np.ndarray, shift: float) -> LinearOperator:
    """operator + shift * V V^T: found eigenpairs are pushed above the rest of the spectrum."""

    def matvec(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        return operator.matvec(x).reshape(-1) + shift * (vectors @ (vectors.T @ x))

    dim = operator.shape[0]
    return LinearOperator((dim, dim), matvec=matvec, rmatvec=matvec, dtype=np.float64)


def lanczos_lowest(
    operator: LinearOperator,
    m: int,
    rng_seed: Optional[int] = None,
    tolerance: Optional[float] = None,
    max_krylov: Optional[int] = None,
) -> LanczosResult:
    """
    Lowest m eigenpairs of a symmetric operator by Lanczos iteration.

    Each run uses full reorthogonalization and a seeded random start vector,
    restarting on an invariant-subspace breakdown. A single Krylov sequence
    sees one copy of each degenerate level, so converged pairs are deflated
    (shifted above the spectrum) and the iteration is repeated until a run
    finds nothing below the current m-th level.

    Args:
        operator: Symmetric linear operator.
        m: Number of lowest eigenpairs.
        rng_seed: Start-vector seed; defaults to the global seed.
        tolerance: Relative residual tolerance against the ||H|| estimate.
        max_krylov: Krylov dimension cap per run.

    Returns:
        LanczosResult with ascending eigenvalues, their residual norms and
        the total number of Krylov steps over all runs.

    Raises:
        ContractViolationError: If m is not in [1, dim].
        ConvergenceError: If residuals stay above tolerance at the Krylov cap,
            or deflation keeps finding lower levels.
    """
    dim = operator.shape[0]
    if not (1 <= m <= dim):
        raise ContractViolationError(f"m must be in [1, {dim}], got {m}")
    config = settings.eigen
    tolerance = config.lanczos_tolerance if tolerance is None else tolerance
    krylov_cap = min(dim, config.lanczos_max_krylov if max_krylov is None else max_krylov)
    if krylov_cap < m:
        raise ContractViolationError(f"Krylov cap {krylov_cap} is below m={m}")

    def check_from(levels: int) -> int:
        return min(krylov_cap, levels + config.lanczos_extra_vectors)

    rng = np.random.default_rng(settings.seed if rng_seed is None else rng_seed)
    first = _krylov_run(operator, m, rng, tolerance, krylov_cap, check_from(m))
    values, vectors, residuals = first.eigenvalues, first.eigenvectors, first.residuals
    iterations = first.iterations
    scale = max(float(np.max(np.abs(values))), first.spread, 1.0)
    shift = 2.0 * first.spread + scale
    margin = 10.0 * tolerance * scale

    confirmed = False
    for _ in range(m + 1):
        levels = min(m, dim - vectors.shape[1])
        if levels == 0:
            confirmed = True
            break
        run = _krylov_run(
            _deflated(operator, vectors, shift),
            levels,
            rng,
            tolerance,
            krylov_cap,
            check_from(levels),
            avoid=vectors,
        )
        iterations += run.iterations
        current_top = float(np.sort(values)[m - 1])
        if run.eigenvalues[0] >= current_top - margin:
            confirmed = True
            break
        logger.debug(
            "Deflation found further levels",
            extra={"extra_fields": {"found": int(np.sum(run.eigenvalues < current_top - margin))}}
        )
        values = np.concatenate([values, run.eigenvalues])
        vectors = np.hstack([vectors, run.eigenvectors])
        residuals = np.concatenate([residuals, run.residuals])
    if not confirmed:
        raise ConvergenceError("Lanczos deflation did not settle", residuals=residuals[:m])

    order = np.argsort(values, kind="stable")[:m]
    get_metrics().lanczos_iterations.observe(float(iterations))
    return LanczosResult(
        eigenvalues=values[order],
        eigenvectors=vectors[:, order],
        residuals=residuals[order],
        iterations=iterations,
    )


@log_duration("exact_spectrum")
def exact_spectrum(
    problem: IsingProblem,
    s: float,
    schedule: Schedule,
    m: int,
    method: str = "auto",
    rng_seed: Optional[int] = None,
) -> ExactSpectrum:
    """
    Lowest m exact eigenvalues of H(s).

    Args:
        problem: The Ising problem, n <= 20.
        s: Schedule point.
        schedule: Energy scales.
        m: Number of levels.
        method: "auto" (dense up to the dense limit, Lanczos above), "dense" or "lanczos".
        rng_seed: Lanczos start-vector seed.

    Returns:
        ExactSpectrum.

    Raises:
        FeasibilityError: If n is too large for the chosen path.
        ContractViolationError: On a bad m or method.
        ConvergenceError: If Lanczos fails to converge.
    """
    _check_exact_size(problem)
    if method not in EXACT_METHODS:
        raise ContractViolationError(f"Unknown method {method!r}; expected one of {EXACT_METHODS}")
    dim = 1 << problem.n
    if not (1 <= m <= dim):
        raise ContractViolationError(f"m must be in [1, {dim}], got {m}")
    if method == "auto":
        method = "dense" if problem.n <= settings.eigen.dense_max_qubits else "lanczos"

    if method == "dense" and problem.n > settings.eigen.dense_max_qubits:
        raise FeasibilityError("dense_hamiltonian", settings.eigen.dense_max_qubits, problem.n)

    delta, eps = schedule_at(schedule, s)
    if delta == 0.0:
        # Diagonal H(s): exact on either path, degeneracies included
        eigenvalues = 0.5 * eps * np.sort(all_classical_energies(problem))[:m]
    elif method == "dense":
        eigenvalues = scipy.linalg.eigh(
            dense_hamiltonian(problem, s, schedule), eigvals_only=True, subset_by_index=[0, m - 1]
        )
    else:
        operator = transverse_field_operator(problem, s, schedule)
        eigenvalues = lanczos_lowest(operator, m, rng_seed=rng_seed).eigenvalues
    return ExactSpectrum(s=float(s), eigenvalues=np.asarray(eigenvalues), n=problem.n, method=method)
