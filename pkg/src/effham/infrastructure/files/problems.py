"""
Problem and topology JSON files.

Problem: {"n": int, "h": [float, ...], "couplings": [[i, j, J], ...]}.
Topology: {"n": int, "edges": [[i, j, "strong" | "random"], ...]}.
Output is indented, pairs sorted, so equal problems give identical bytes.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

from effham.core.exceptions import ContractViolationError
from effham.core.ising import IsingProblem
from effham.core.topology import Edge, validate_edges


PathLike = Union[str, Path]


def problem_to_dict(problem: IsingProblem) -> Dict[str, Any]:
    return {
        "n": problem.n,
        "h": list(problem.h),
        "couplings": [[i, j, value] for (i, j), value in problem.couplings.items()],
    }


def problem_from_dict(data: Dict[str, Any]) -> IsingProblem:
    """
    Build a problem from decoded JSON.

    Raises:
        ContractViolationError: On missing keys or malformed entries.
    """
    missing = {"n", "h", "couplings"} - set(data)
    if missing:
        raise ContractViolationError(f"Problem file lacks {sorted(missing)}")
    triples = []
    for entry in data["couplings"]:
        if not isinstance(entry, list) or len(entry) != 3:
            raise ContractViolationError(f"Coupling entry must be [i, j, J], got {entry!r}")
        triples.append((int(entry[0]), int(entry[1]), float(entry[2])))
    return IsingProblem.from_triples(int(data["n"]), data["h"], triples)


def dumps_problem(problem: IsingProblem) -> str:
    return json.dumps(problem_to_dict(problem), indent=2) + "\n"


def save_problem(problem: IsingProblem, path: PathLike) -> None:
    Path(path).write_text(dumps_problem(problem), encoding="utf-8")


def load_problem(path: PathLike) -> IsingProblem:
    """
    Read a problem JSON file.

    Raises:
        ContractViolationError: If the content is not a valid problem.
        OSError: If the file cannot be read.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ContractViolationError(f"{path}: not valid JSON ({e.msg})") from e
    if not isinstance(data, dict):
        raise ContractViolationError(f"{path}: expected a JSON object")
    return problem_from_dict(data)


def save_topology(n: int, edges: List[Edge], path: PathLike) -> None:
    payload = {"n": n, "edges": [[i, j, kind] for i, j, kind in edges]}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_topology(path: PathLike) -> Tuple[int, List[Edge]]:
    """
    Read a topology JSON file.

    Raises:
        ContractViolationError: On malformed content or invalid edges.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ContractViolationError(f"{path}: not valid JSON ({e.msg})") from e
    if not isinstance(data, dict) or "n" not in data or "edges" not in data:
        raise ContractViolationError(f"{path}: expected an object with 'n' and 'edges'")
    n = int(data["n"])
    edges = [(int(i), int(j), str(kind)) for i, j, kind in data["edges"]]
    return n, validate_edges(n, edges)
