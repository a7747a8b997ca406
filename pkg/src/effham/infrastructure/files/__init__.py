"""Problem, topology, schedule and result files."""

from effham.infrastructure.files.problems import (
    dumps_problem,
    load_problem,
    load_topology,
    problem_from_dict,
    problem_to_dict,
    save_problem,
    save_topology,
)
from effham.infrastructure.files.results import (
    ResultTable,
    dumps_result_table,
    loads_result_table,
    read_result_table,
    write_basis_dump,
    write_result_table,
)
from effham.infrastructure.files.schedules import load_schedule, save_schedule


__all__ = [
    "ResultTable",
    "dumps_problem",
    "dumps_result_table",
    "load_problem",
    "load_schedule",
    "load_topology",
    "loads_result_table",
    "problem_from_dict",
    "problem_to_dict",
    "read_result_table",
    "save_problem",
    "save_schedule",
    "save_topology",
    "write_basis_dump",
    "write_result_table",
]
