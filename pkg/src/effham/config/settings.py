"""
Solver configuration.

Centralizes tolerances, resource limits and runtime knobs using frozen
dataclasses. Every field can be overridden through an environment variable.
"""

import os
from dataclasses import dataclass, field


def _env_float(name: str, default: float) -> float:
    return float(os.environ.get(name, default))


def _env_int(name: str, default: int) -> int:
    return int(os.environ.get(name, default))


@dataclass(frozen=True)
class EnumerationSettings:
    """Low-energy classical state enumeration settings."""

    # Dimensionless; classical energies closer than this are one level
    tie_tolerance: float = field(
        default_factory=lambda: _env_float("EFFHAM_TIE_TOLERANCE", 1e-9)
    )
    # Separator rows x kept entries allowed in a single bucket table
    memory_budget_entries: int = field(
        default_factory=lambda: _env_int("EFFHAM_MEMORY_BUDGET", 50_000_000)
    )
    brute_force_max_qubits: int = 24


@dataclass(frozen=True)
class PerturbationSettings:
    """Effective Hamiltonian construction settings."""

    # Energy units
    singularity_tolerance: float = field(
        default_factory=lambda: _env_float("EFFHAM_SINGULARITY_TOLERANCE", 1e-8)
    )
    lambda_trust_threshold: float = field(
        default_factory=lambda: _env_float("EFFHAM_LAMBDA_THRESHOLD", 1.0)
    )
    # Basis rows per vectorized fourth-order block
    chunk_size: int = field(
        default_factory=lambda: _env_int("EFFHAM_CHUNK_SIZE", 64)
    )


@dataclass(frozen=True)
class EigenSettings:
    """Dense and iterative eigensolver settings."""

    symmetry_tolerance: float = 1e-12
    lanczos_tolerance: float = field(
        default_factory=lambda: _env_float("EFFHAM_LANCZOS_TOLERANCE", 1e-10)
    )
    lanczos_extra_vectors: int = 8
    lanczos_max_krylov: int = field(
        default_factory=lambda: _env_int("EFFHAM_LANCZOS_MAX_KRYLOV", 400)
    )
    dense_max_qubits: int = 12
    exact_max_qubits: int = 20


@dataclass(frozen=True)
class SweepSettings:
    """Spectrum sweep settings."""

    ambiguous_overlap: float = 0.5
    auto_switch_factor: float = 10.0
    max_workers: int = field(
        default_factory=lambda: _env_int("EFFHAM_MAX_WORKERS", 1)
    )


@dataclass(frozen=True)
class Settings:
    """Main settings."""

    enumeration: EnumerationSettings = field(default_factory=EnumerationSettings)
    perturbation: PerturbationSettings = field(default_factory=PerturbationSettings)
    eigen: EigenSettings = field(default_factory=EigenSettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    seed: int = field(default_factory=lambda: _env_int("EFFHAM_SEED", 0))
    log_level: str = field(
        default_factory=lambda: os.environ.get("EFFHAM_LOG_LEVEL", "INFO").upper()
    )


# Singleton settings instance
settings = Settings()
