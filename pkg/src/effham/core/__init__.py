"""Core package - Problem definitions and numerical methods."""

from effham.core.eigensolve import (
    EigenDecomposition,
    ExactSpectrum,
    dense_hamiltonian,
    diagonalize_symmetric,
    exact_spectrum,
    lanczos_lowest,
    transverse_field_operator,
)
from effham.core.enumeration import (
    EliminationOrder,
    SubspaceBasis,
    brute_force_low_states,
    choose_elimination_order,
    enumerate_low_states,
)
from effham.core.exceptions import (
    ComputationError,
    ContractViolationError,
    ConvergenceError,
    DomainError,
    EffhamError,
    FeasibilityError,
    InputError,
    ResourceError,
    SingularDenominatorError,
    UsageError,
)
from effham.core.ising import (
    IsingProblem,
    SpinState,
    classical_energy,
    generate_instance,
)
from effham.core.perturbation import (
    EffectiveHamiltonian,
    FlipNeighborhood,
    OrderConfig,
    PerturbationSplit,
    SmallParameterEstimate,
    build_effective_hamiltonian,
    estimate_small_parameter,
)
from effham.core.schedule import Schedule, schedule_at

__all__ = [
    # Ising model
    "IsingProblem",
    "SpinState",
    "classical_energy",
    "generate_instance",
    "Schedule",
    "schedule_at",
    # Enumeration
    "EliminationOrder",
    "SubspaceBasis",
    "brute_force_low_states",
    "choose_elimination_order",
    "enumerate_low_states",
    # Perturbation
    "EffectiveHamiltonian",
    "FlipNeighborhood",
    "OrderConfig",
    "PerturbationSplit",
    "SmallParameterEstimate",
    "build_effective_hamiltonian",
    "estimate_small_parameter",
    # Eigensolvers
    "EigenDecomposition",
    "ExactSpectrum",
    "dense_hamiltonian",
    "diagonalize_symmetric",
    "exact_spectrum",
    "lanczos_lowest",
    "transverse_field_operator",
    # Exceptions
    "ComputationError",
    "ContractViolationError",
    "ConvergenceError",
    "DomainError",
    "EffhamError",
    "FeasibilityError",
    "InputError",
    "ResourceError",
    "SingularDenominatorError",
    "UsageError",
]
