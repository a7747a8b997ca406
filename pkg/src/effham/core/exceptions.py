"""
Custom exceptions for effham.

Provides a hierarchy of input and computation errors so callers
(and the command line) can map failures to exit codes.
"""

from typing import Any, Dict, Optional, Sequence


class EffhamError(Exception):
    """Base exception for all effham errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


# =============================================================================
# Input Errors (caller supplied something unusable)
# =============================================================================

class InputError(EffhamError):
    """Base exception for invalid inputs."""
    pass


class UsageError(InputError):
    """Raised when a run configuration field is invalid."""

    def __init__(self, field: str, message: str):
        super().__init__(
            f"Invalid value for '{field}': {message}",
            {"field": field}
        )
        self.field = field


class ContractViolationError(InputError):
    """Raised when an operation's precondition does not hold."""
    pass


class DomainError(InputError):
    """Raised when a value lies outside the domain of a function."""

    def __init__(self, name: str, value: float, low: float, high: float):
        super().__init__(
            f"{name}={value!r} outside [{low}, {high}]",
            {"name": name, "value": value, "low": low, "high": high}
        )
        self.value = value


class FeasibilityError(InputError):
    """Raised when a problem is too large for an exhaustive method."""

    def __init__(self, what: str, limit: int, actual: int):
        super().__init__(
            f"{what} supports at most {limit} qubits, got {actual}",
            {"what": what, "limit": limit, "actual": actual}
        )
        self.limit = limit
        self.actual = actual


# =============================================================================
# Computation Errors (numerics failed on valid input)
# =============================================================================

class ComputationError(EffhamError):
    """Base exception for numerical failures."""
    pass


class SingularDenominatorError(ComputationError):
    """Raised when an energy denominator E_k - E_n is effectively zero."""

    def __init__(
        self,
        k_index: int,
        k_bits: str,
        n_bits: str,
        e_k: float,
        e_n: float,
    ):
        super().__init__(
            f"Singular denominator for level k={k_index} ({k_bits}) and "
            f"outside state {n_bits}: E_k={e_k!r}, E_n={e_n!r}",
            {
                "k_index": k_index,
                "k_bits": k_bits,
                "n_bits": n_bits,
                "e_k": e_k,
                "e_n": e_n,
            }
        )
        self.k_index = k_index
        self.n_bits = n_bits
        self.e_k = e_k
        self.e_n = e_n


class ConvergenceError(ComputationError):
    """Raised when an iterative eigensolver does not converge."""

    def __init__(self, message: str, residuals: Sequence[float]):
        super().__init__(
            f"{message}; residuals={[float(r) for r in residuals]}",
            {"residuals": [float(r) for r in residuals]}
        )
        self.residuals = tuple(float(r) for r in residuals)


class ResourceError(ComputationError):
    """Raised when the elimination width exceeds the memory budget."""

    def __init__(self, width: int, required: int, budget: int):
        super().__init__(
            f"Elimination width {width} needs {required} table entries, "
            f"budget is {budget}",
            {"width": width, "required": required, "budget": budget}
        )
        self.width = width
        self.required = required
        self.budget = budget
