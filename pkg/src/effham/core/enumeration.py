"""
Low-energy classical state enumeration.

Finds the N_S lowest-energy computational basis states of H_P with
k-best bucket elimination over a greedy elimination order, so the cost is
exponential in the induced width of the interaction graph rather than in
the qubit count. A brute-force enumerator serves as the oracle.
"""

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from effham.config import settings
from effham.core.exceptions import (
    ContractViolationError,
    FeasibilityError,
    ResourceError,
)
from effham.core.ising import (
    IsingProblem,
    all_classical_energies,
    bits_to_string,
    classical_energies,
)
from effham.infrastructure.logging import get_logger, log_duration
from effham.infrastructure.metrics import get_metrics


logger = get_logger(__name__)

# Bound on temporary candidate matrices (elements) during k-best merges
_MERGE_BLOCK_ELEMENTS = 4_000_000


# =============================================================================
# Domain types
# =============================================================================

@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """
    Lowest-energy classical states, closed under degeneracy at the top level.

    Attributes:
        n: Qubit count.
        states: State bit integers, ascending energy, lexicographic within ties.
        energies: Dimensionless classical energies matching states.
        bits: (N_S, n) uint8 matrix of the same states.
    """
    n: int
    states: Tuple[int, ...]
    energies: np.ndarray = field(repr=False)
    bits: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if len(self.states) == 0:
            raise ContractViolationError("A subspace basis cannot be empty")
        if len(self.states) != len(self.energies) or self.bits.shape != (len(self.states), self.n):
            raise ContractViolationError("Basis states, energies and bits disagree in size")
        if len(set(self.states)) != len(self.states):
            raise ContractViolationError("Basis states must be distinct")
        energies = np.array(self.energies, dtype=np.float64)
        bits = np.array(self.bits, dtype=np.uint8)
        energies.setflags(write=False)
        bits.setflags(write=False)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "bits", bits)

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def top_energy(self) -> float:
        return float(self.energies[-1])

    @cached_property
    def index(self) -> Dict[int, int]:
        """Bit integer -> position in the basis."""
        return {state: i for i, state in enumerate(self.states)}

    @cached_property
    def spins(self) -> np.ndarray:
        """(N_S, n) matrix of z values."""
        return 1.0 - 2.0 * self.bits.astype(np.float64)

    def index_of(self, bits: int) -> Optional[int]:
        """Position of a bit-integer state, or None when it lies outside the basis."""
        return self.index.get(bits)

    def bitstrings(self) -> List[str]:
        return [bits_to_string(state, self.n) for state in self.states]

    def to_records(self) -> List[Dict[str, object]]:
        """Audit view: [{"bits": ..., "energy": ...}, ...]."""
        return [
            {"bits": text, "energy": float(energy)}
            for text, energy in zip(self.bitstrings(), self.energies)
        ]


@dataclass(frozen=True)
class EliminationOrder:
    """
    Qubit elimination order and the induced width it attains.

    Attributes:
        order: Permutation of 0..n-1.
        width: Max count of not-yet-eliminated neighbors of an eliminated qubit.
    """
    order: Tuple[int, ...]
    width: int


# =============================================================================
# Elimination order
# =============================================================================

def _fill_in(graph: nx.Graph, node: int) -> int:
    """Edges that eliminating node would add."""
    neighbors = list(graph.neighbors(node))
    return sum(
        1 for a, b in itertools.combinations(neighbors, 2) if not graph.has_edge(a, b)
    )


def choose_elimination_order(problem: IsingProblem) -> EliminationOrder:
    """
    Greedy min-fill elimination order, min-degree then lowest index on ties.

    Args:
        problem: The Ising problem; only its interaction graph is used.

    Returns:
        EliminationOrder with the attained induced width.
    """
    graph = problem.graph.copy()
    order: List[int] = []
    width = 0
    while graph.number_of_nodes():
        node = min(graph.nodes, key=lambda v: (_fill_in(graph, v), graph.degree(v), v))
        neighbors = list(graph.neighbors(node))
        width = max(width, len(neighbors))
        graph.add_edges_from(itertools.combinations(neighbors, 2))
        graph.remove_node(node)
        order.append(node)
    return EliminationOrder(order=tuple(order), width=width)


# =============================================================================
# k-best bucket elimination
# =============================================================================

@dataclass
class _Message:
    """k-best table sent from an eliminated qubit to a later bucket."""
    var: int
    scope: Tuple[int, ...]
    energies: np.ndarray  # (2^|scope|, K), rows ascending, +inf padded


@dataclass
class _Bucket:
    """Traceback data kept for one eliminated qubit."""
    scope: Tuple[int, ...]
    children: List[_Message]
    child_entries: List[np.ndarray]  # per child, (2^(|scope|+1), K_u)
    choice_x: np.ndarray  # (2^|scope|, K) value of the eliminated qubit
    choice_u: np.ndarray  # (2^|scope|, K) entry into the merged child list


@lru_cache(maxsize=256)
def _pair_grid(left: int, right: int, capacity: int) -> Tuple[np.ndarray, np.ndarray]:
    """Index pairs (i, j) that can rank among the capacity smallest sums."""
    rows, cols = [], []
    for i in range(min(left, capacity)):
        span = min(right, capacity // (i + 1))
        rows.append(np.full(span, i, dtype=np.int64))
        cols.append(np.arange(span, dtype=np.int64))
    return np.concatenate(rows), np.concatenate(cols)


def _select_kbest(candidates: np.ndarray, capacity: int) -> Tuple[np.ndarray, np.ndarray]:
    """Row-wise capacity smallest values, ascending, with their column indices."""
    width = candidates.shape[1]
    if width > capacity:
        idx = np.argpartition(candidates, capacity - 1, axis=1)[:, :capacity]
    else:
        idx = np.broadcast_to(np.arange(width), candidates.shape).copy()
    values = np.take_along_axis(candidates, idx, axis=1)
    order = np.argsort(values, axis=1, kind="stable")
    values = np.take_along_axis(values, order, axis=1)
    idx = np.take_along_axis(idx, order, axis=1)
    keep = max(1, int(np.isfinite(values).sum(axis=1).max()))
    return values[:, :keep], idx[:, :keep]


def _kbest_sum(
    left: np.ndarray,
    right: np.ndarray,
    capacity: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Row-aligned k-best of pairwise sums of two ascending lists.

    Returns:
        (values, left entry, right entry), each (rows, K).
    """
    pair_i, pair_j = _pair_grid(left.shape[1], right.shape[1], capacity)
    block = max(1, _MERGE_BLOCK_ELEMENTS // max(1, pair_i.size))
    values_parts, idx_parts = [], []
    for start in range(0, left.shape[0], block):
        stop = start + block
        candidates = left[start:stop, pair_i] + right[start:stop, pair_j]
        values, idx = _select_kbest(candidates, capacity)
        values_parts.append(values)
        idx_parts.append(idx)

    keep = max(v.shape[1] for v in values_parts)
    values = np.vstack([_pad(v, keep, np.inf) for v in values_parts])
    idx = np.vstack([_pad(i, keep, 0) for i in idx_parts])
    return values, pair_i[idx], pair_j[idx]


def _pad(array: np.ndarray, width: int, fill: float) -> np.ndarray:
    if array.shape[1] == width:
        return array
    padded = np.full((array.shape[0], width), fill, dtype=array.dtype)
    padded[:, :array.shape[1]] = array
    return padded


def _project_rows(rows: np.ndarray, scope: Tuple[int, ...], sub_scope: Tuple[int, ...]) -> np.ndarray:
    """Map rows over scope to rows over sub_scope (a subset of scope)."""
    position = {var: t for t, var in enumerate(scope)}
    projected = np.zeros_like(rows)
    for t, var in enumerate(sub_scope):
        projected |= ((rows >> position[var]) & 1) << t
    return projected


def _entry_dtype(capacity: int) -> type:
    return np.int16 if capacity < np.iinfo(np.int16).max else np.int32


def _kbest_assignments(
    problem: IsingProblem,
    order: EliminationOrder,
    capacity: int,
) -> np.ndarray:
    """
    The capacity lowest-energy assignments as an (F, n) uint8 bit matrix.

    F = min(capacity, 2^n). Ties at the boundary are resolved arbitrarily but
    deterministically.
    """
    position = {var: p for p, var in enumerate(order.order)}
    entry_dtype = _entry_dtype(capacity)

    later_edges: Dict[int, List[Tuple[int, float]]] = defaultdict(list)
    for (i, j), value in problem.couplings.items():
        if value == 0.0:
            continue
        first, second = (i, j) if position[i] < position[j] else (j, i)
        later_edges[first].append((second, value))

    pending: Dict[int, List[_Message]] = defaultdict(list)
    buckets: Dict[int, _Bucket] = {}
    roots: List[_Message] = []

    for var in order.order:
        children = pending.pop(var, [])
        separator = {u for u, _ in later_edges[var]}
        for child in children:
            separator.update(child.scope)
        separator.discard(var)
        scope = tuple(sorted(separator, key=position.__getitem__))
        scope_u = (var,) + scope

        rows_u = np.arange(1 << len(scope_u), dtype=np.int64)
        z = 1.0 - 2.0 * ((rows_u[:, None] >> np.arange(len(scope_u))) & 1)
        base = problem.h[var] * z[:, 0]
        column = {u: t for t, u in enumerate(scope_u)}
        for u, value in later_edges[var]:
            base = base + value * (z[:, 0] * z[:, column[u]])

        merged = np.zeros((rows_u.size, 1))
        entries: List[np.ndarray] = []
        for child in children:
            projected = child.energies[_project_rows(rows_u, scope_u, child.scope)]
            merged, left, right = _kbest_sum(merged, projected, capacity)
            entries = [np.take_along_axis(e, left, axis=1) for e in entries]
            entries.append(right.astype(entry_dtype))
            child.energies = np.empty((0, 0))

        total = merged + base[:, None]
        width_u = total.shape[1]
        values, idx = _select_kbest(
            np.concatenate([total[0::2], total[1::2]], axis=1), capacity
        )
        buckets[var] = _Bucket(
            scope=scope,
            children=children,
            child_entries=entries,
            choice_x=(idx >= width_u).astype(np.uint8),
            choice_u=(idx % width_u).astype(entry_dtype),
        )
        message = _Message(var=var, scope=scope, energies=values)
        if scope:
            pending[scope[0]].append(message)
        else:
            roots.append(message)

    merged = np.zeros((1, 1))
    root_entries: List[np.ndarray] = []
    for message in roots:
        merged, left, right = _kbest_sum(merged, message.energies, capacity)
        root_entries = [np.take_along_axis(e, left, axis=1) for e in root_entries]
        root_entries.append(right)

    count = merged.shape[1]
    entry_of: Dict[int, np.ndarray] = {
        message.var: root_entries[t][0].astype(np.int64) for t, message in enumerate(roots)
    }
    bits = np.zeros((count, problem.n), dtype=np.uint8)
    for var in reversed(order.order):
        bucket = buckets[var]
        row = np.zeros(count, dtype=np.int64)
        for t, u in enumerate(bucket.scope):
            row |= bits[:, u].astype(np.int64) << t
        entry = entry_of.pop(var)
        x = bucket.choice_x[row, entry]
        u_entry = bucket.choice_u[row, entry].astype(np.int64)
        bits[:, var] = x
        row_u = x.astype(np.int64) + 2 * row
        for child, child_entry in zip(bucket.children, bucket.child_entries):
            entry_of[child.var] = child_entry[row_u, u_entry].astype(np.int64)
    return bits


# =============================================================================
# Ordering and closure helpers
# =============================================================================

def _closure_count(sorted_energies: np.ndarray, target: int, tolerance: float) -> int:
    """Smallest count >= target whose last energy is separated from the next by > tolerance."""
    count = target
    while count < sorted_energies.size and sorted_energies[count] <= sorted_energies[count - 1] + tolerance:
        count += 1
    return count


def _canonical_basis(
    n: int,
    bits: np.ndarray,
    energies: np.ndarray,
    tolerance: float,
) -> SubspaceBasis:
    """Ascending energy; states within one tie level ordered by bit string."""
    order = np.argsort(energies, kind="stable")
    bits = bits[order]
    energies = energies[order]
    states = [_pack(row) for row in bits]
    strings = [bits_to_string(s, n) for s in states]

    final: List[int] = []
    start = 0
    for stop in range(1, len(states) + 1):
        if stop == len(states) or energies[stop] > energies[stop - 1] + tolerance:
            final.extend(sorted(range(start, stop), key=strings.__getitem__))
            start = stop
    index = np.array(final, dtype=np.int64)
    return SubspaceBasis(
        n=n,
        states=tuple(states[i] for i in final),
        energies=energies[index],
        bits=bits[index],
    )


def _pack(row: np.ndarray) -> int:
    return int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")


def _unpack(states: np.ndarray, n: int) -> np.ndarray:
    return ((states[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.uint8)


# =============================================================================
# Public operations
# =============================================================================

@log_duration("enumerate_low_states")
def enumerate_low_states(
    problem: IsingProblem,
    target_size: int,
    order: Optional[EliminationOrder] = None,
) -> SubspaceBasis:
    """
    The target_size lowest-energy states, extended to close the top level.

    Args:
        problem: The Ising problem.
        target_size: Requested basis size; clamped to 2^n.
        order: Elimination order; chosen with min-fill when omitted.

    Returns:
        Degeneracy-closed SubspaceBasis with at least target_size states.

    Raises:
        ContractViolationError: If target_size < 1.
        ResourceError: If the elimination tables exceed the memory budget.
    """
    if target_size < 1:
        raise ContractViolationError(f"target_size must be >= 1, got {target_size}")
    config = settings.enumeration
    total = 1 << problem.n
    target = min(target_size, total)
    order = order or choose_elimination_order(problem)
    get_metrics().enumeration_width.set(order.width)

    capacity = min(total, target + max(8, target // 4))
    while True:
        required = (1 << order.width) * capacity
        if required > config.memory_budget_entries:
            raise ResourceError(order.width, required, config.memory_budget_entries)

        bits = _kbest_assignments(problem, order, capacity)
        energies = classical_energies(problem, 1.0 - 2.0 * bits.astype(np.float64))
        ranked = np.sort(energies, kind="stable")
        count = _closure_count(ranked, target, config.tie_tolerance)
        if count < ranked.size or capacity == total:
            break
        logger.info(
            "Top level not closed, widening k-best capacity",
            extra={"extra_fields": {"capacity": capacity, "target": target}}
        )
        capacity = min(total, 2 * capacity)

    keep = energies <= ranked[count - 1]
    logger.info(
        f"Enumerated {int(keep.sum())} low-energy states",
        extra={"extra_fields": {
            "n": problem.n,
            "target_size": target_size,
            "basis_size": int(keep.sum()),
            "width": order.width,
            "capacity": capacity,
        }}
    )
    return _canonical_basis(problem.n, bits[keep], energies[keep], config.tie_tolerance)


def brute_force_low_states(problem: IsingProblem, target_size: int) -> SubspaceBasis:
    """
    Same contract as enumerate_low_states, by exhaustive enumeration.

    Raises:
        FeasibilityError: If n exceeds the brute-force limit.
        ContractViolationError: If target_size < 1.
    """
    config = settings.enumeration
    if problem.n > config.brute_force_max_qubits:
        raise FeasibilityError("brute_force_low_states", config.brute_force_max_qubits, problem.n)
    if target_size < 1:
        raise ContractViolationError(f"target_size must be >= 1, got {target_size}")

    energies = all_classical_energies(problem)
    target = min(target_size, energies.size)
    cutoff = float(np.partition(energies, target - 1)[target - 1])
    while True:
        selected = np.flatnonzero(energies <= cutoff + config.tie_tolerance)
        widened = float(energies[selected].max())
        if widened == cutoff:
            break
        cutoff = widened
    selected = np.flatnonzero(energies <= cutoff)
    return _canonical_basis(
        problem.n,
        _unpack(selected.astype(np.int64), problem.n),
        energies[selected],
        config.tie_tolerance,
    )


def closure_violations(problem: IsingProblem, basis: SubspaceBasis) -> List[int]:
    """
    Single-flip neighbors outside the basis that tie or undercut its top level.

    A necessary-condition check of degeneracy closure; an empty list means no
    violation was found among Hamming-1 neighbors.
    """
    tolerance = settings.enumeration.tie_tolerance
    local_field = basis.spins @ problem.coupling_matrix + problem.h_array
    neighbor_energies = basis.energies[:, None] - 2.0 * basis.spins * local_field
    violations = set()
    for row, qubit in zip(*np.nonzero(neighbor_energies <= basis.top_energy + tolerance)):
        neighbor = basis.states[row] ^ (1 << int(qubit))
        if basis.index_of(neighbor) is None:
            violations.add(neighbor)
    return sorted(violations)


def energy_multiset(basis: SubspaceBasis, decimals: int = 9) -> List[float]:
    """Rounded sorted energies, for comparing bases from different methods."""
    return sorted(np.round(basis.energies, decimals).tolist())


def order_is_permutation(order: Sequence[int], n: int) -> bool:
    return sorted(order) == list(range(n))
