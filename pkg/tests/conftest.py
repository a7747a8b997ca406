"""
Test Configuration and Fixtures.

Provides shared problems, schedules and helpers for all tests.
"""

from typing import Callable, Dict, Generator, List, Tuple

import numpy as np
import pytest

from effham.core.ising import IsingProblem, generate_instance
from effham.core.schedule import Schedule
from effham.core.topology import RANDOM, STRONG, Edge
from effham.infrastructure.metrics import get_metrics, reset_metrics


THIRD = 1.0 / 3.0


@pytest.fixture(autouse=True)
def fresh_metrics() -> Generator[None, None, None]:
    """Start every test with an empty metrics registry."""
    reset_metrics()
    yield
    reset_metrics()


@pytest.fixture
def metrics():
    """The global metrics registry."""
    return get_metrics()


@pytest.fixture
def single_qubit_problem() -> IsingProblem:
    """One qubit with h = 1."""
    return IsingProblem(n=1, h=(1.0,))


@pytest.fixture
def two_qubit_problem() -> IsingProblem:
    """Two ferromagnetically coupled qubits, h = (1/3, 1/3), J = -1."""
    return IsingProblem(n=2, h=(THIRD, THIRD), couplings={(0, 1): -1.0})


@pytest.fixture
def asymmetric_problem() -> IsingProblem:
    """Three qubits with no permutation symmetry."""
    return IsingProblem(
        n=3,
        h=(0.3, -0.2, 0.45),
        couplings={(0, 1): -0.7, (1, 2): 0.25, (0, 2): 0.1},
    )


@pytest.fixture
def unit_schedule() -> Schedule:
    """Delta = Eps = 1 at every s."""
    return Schedule(points=((0.0, 1.0, 1.0), (1.0, 1.0, 1.0)), label="unit")


@pytest.fixture
def linear_schedule() -> Schedule:
    """Delta = 10 (1 - s), Eps = 10 s."""
    return Schedule.linear()


@pytest.fixture
def hardware_like_schedule() -> Schedule:
    """Transverse field decaying quickly, problem scale growing linearly."""
    s = np.linspace(0.0, 1.0, 11)
    delta = (10.0, 7.5, 5.3, 3.5, 2.1, 1.1, 0.5, 0.2, 0.07, 0.02, 0.0)
    eps = (0.3, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0)
    return Schedule(points=tuple(zip(s, delta, eps)), label="hardware-like")


def ring_topology(n: int) -> Tuple[int, List[Edge]]:
    """Ring with every third edge strong, plus random chords i -> i+3 from even i."""
    edges: Dict[Tuple[int, int], str] = {}
    for i in range(n):
        pair = tuple(sorted((i, (i + 1) % n)))
        if pair[0] != pair[1]:
            edges.setdefault(pair, STRONG if i % 3 == 0 else RANDOM)
    if n >= 8:
        for i in range(0, n, 2):
            pair = tuple(sorted((i, (i + 3) % n)))
            edges.setdefault(pair, RANDOM)
    return n, [(i, j, kind) for (i, j), kind in sorted(edges.items())]


@pytest.fixture
def make_instance() -> Callable[[int, int], IsingProblem]:
    """Factory for seeded random instances on a ring-with-chords graph."""

    def factory(n: int, seed: int) -> IsingProblem:
        size, edges = ring_topology(n)
        return generate_instance(size, edges, seed)

    return factory
