"""
Interaction graphs for generated instances.

An edge is a triple (i, j, kind) where kind says how its coupling is
drawn: "strong" edges get J = -1, "random" edges get J uniformly from
{-1/3, +1/3}.
"""

import re
from typing import List, Sequence, Tuple

import networkx as nx

from effham.core.exceptions import ContractViolationError


STRONG = "strong"
RANDOM = "random"
EDGE_KINDS = (STRONG, RANDOM)

Edge = Tuple[int, int, str]


def validate_edges(n: int, edges: Sequence[Edge]) -> List[Edge]:
    """
    Check an edge list against a qubit count and normalize it to i < j.

    Args:
        n: Qubit count.
        edges: Edge triples.

    Returns:
        Normalized edges, input order preserved.

    Raises:
        ContractViolationError: On bad indices, self loops, duplicates or kinds.
    """
    seen = set()
    normalized: List[Edge] = []
    for i, j, kind in edges:
        if kind not in EDGE_KINDS:
            raise ContractViolationError(f"Unknown edge kind {kind!r} on ({i}, {j})")
        if not (0 <= i < n and 0 <= j < n):
            raise ContractViolationError(f"Edge ({i}, {j}) out of range for n={n}")
        if i == j:
            raise ContractViolationError(f"Self loop on qubit {i}")
        a, b = (i, j) if i < j else (j, i)
        if (a, b) in seen:
            raise ContractViolationError(f"Duplicate edge ({a}, {b})")
        seen.add((a, b))
        normalized.append((a, b, kind))
    return normalized


def tagged_edges(graph: nx.Graph, kind: str) -> List[Edge]:
    """Edges of an integer-labelled graph as sorted (i, j, kind) triples."""
    return sorted((min(i, j), max(i, j), kind) for i, j in graph.edges)


def chain(n: int, kind: str = RANDOM) -> Tuple[int, List[Edge]]:
    """Open chain 0-1-...-(n-1)."""
    return n, tagged_edges(nx.path_graph(n), kind)


def grid(rows: int, cols: int, kind: str = RANDOM) -> Tuple[int, List[Edge]]:
    """Rectangular lattice with row-major qubit numbering."""
    labels = {(r, c): r * cols + c for r in range(rows) for c in range(cols)}
    lattice = nx.relabel_nodes(nx.grid_2d_graph(rows, cols), labels)
    return rows * cols, tagged_edges(lattice, kind)


def chimera(m: int, n: int, t: int) -> Tuple[int, List[Edge]]:
    """
    Processor-style lattice of m x n unit cells, each a complete bipartite K_{t,t}.

    Qubit (r, c, side, k) is numbered ((r * n + c) * 2 + side) * t + k. Side 0
    qubits couple vertically to the same position in the cell below, side 1
    qubits horizontally to the cell to the right. Couplers inside a cell are
    "random"; couplers between cells are "strong".

    Args:
        m: Cell rows.
        n: Cell columns.
        t: Qubits per cell side.

    Returns:
        (qubit count, edges).
    """
    def q(r: int, c: int, side: int, k: int) -> int:
        return ((r * n + c) * 2 + side) * t + k

    edges: List[Edge] = []
    for r in range(m):
        for c in range(n):
            for a in range(t):
                for b in range(t):
                    edges.append((q(r, c, 0, a), q(r, c, 1, b), RANDOM))
            for k in range(t):
                if r + 1 < m:
                    edges.append((q(r, c, 0, k), q(r + 1, c, 0, k), STRONG))
                if c + 1 < n:
                    edges.append((q(r, c, 1, k), q(r, c + 1, 1, k), STRONG))
    return 2 * m * n * t, edges


_SPEC_PATTERNS = {
    "chain": re.compile(r"^chain:(\d+)(?::(strong|random))?$"),
    "grid": re.compile(r"^grid:(\d+)x(\d+)(?::(strong|random))?$"),
    "chimera": re.compile(r"^chimera:(\d+)x(\d+)x(\d+)$"),
}


def parse_topology(spec: str) -> Tuple[int, List[Edge]]:
    """
    Build a topology from a short spec string.

    Accepted forms: ``chain:N[:kind]``, ``grid:RxC[:kind]``, ``chimera:MxNxT``.

    Raises:
        ContractViolationError: If the spec is not recognized.
    """
    spec = spec.strip()
    if match := _SPEC_PATTERNS["chain"].match(spec):
        return chain(int(match.group(1)), match.group(2) or RANDOM)
    if match := _SPEC_PATTERNS["grid"].match(spec):
        return grid(int(match.group(1)), int(match.group(2)), match.group(3) or RANDOM)
    if match := _SPEC_PATTERNS["chimera"].match(spec):
        return chimera(int(match.group(1)), int(match.group(2)), int(match.group(3)))
    raise ContractViolationError(f"Unrecognized topology spec {spec!r}")
