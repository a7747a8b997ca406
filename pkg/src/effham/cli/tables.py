"""
Result tables for each CLI mode.

Column layouts for sweep, exact and compare outputs.
"""

from typing import Dict, Mapping

from effham.infrastructure.files.results import Cell, ResultTable
from effham.services.oracle import Comparison, ExactSweep
from effham.services.sweep import SpectrumSweep


def sweep_table(sweep: SpectrumSweep, meta: Mapping[str, object]) -> ResultTable:
    """Columns s, E_k, rel_k (k >= 1), gap, lambda_k, warnings."""
    m = sweep.m
    columns = (
        ["s"]
        + [f"E_{k}" for k in range(m)]
        + [f"rel_{k}" for k in range(1, m)]
        + ["gap"]
        + [f"lambda_{k}" for k in range(m)]
        + ["warnings"]
    )
    header = {key: str(value) for key, value in meta.items()}
    header["basis_size"] = str(sweep.basis_size)
    header["failures"] = str(len(sweep.failures))
    if sweep.min_gap is not None:
        header["min_gap_s"] = format(sweep.min_gap.s_star, ".17g")
        header["min_gap"] = format(sweep.min_gap.gap, ".17g")
        header["min_gap_refined"] = str(sweep.min_gap.refined).lower()

    relative = sweep.relative_levels
    rows = []
    for g, s in enumerate(sweep.s_grid):
        row: Dict[str, Cell] = {"s": float(s), "gap": float(sweep.gap_curve[g])}
        for k in range(m):
            row[f"E_{k}"] = float(sweep.levels[g, k])
            row[f"lambda_{k}"] = float(sweep.lambda_estimates[g, k])
            if k >= 1:
                row[f"rel_{k}"] = float(relative[g, k])
        row["warnings"] = ";".join(sweep.warnings[g])
        rows.append(row)
    return ResultTable(header=header, columns=columns, rows=rows)


def exact_table(exact: ExactSweep, meta: Mapping[str, object]) -> ResultTable:
    """Columns s, X_k, gap."""
    columns = ["s"] + [f"X_{k}" for k in range(exact.m)] + ["gap"]
    header = {key: str(value) for key, value in meta.items()}
    header["method"] = exact.method
    min_gap = exact.min_gap
    if min_gap is not None:
        header["min_gap_s"] = format(min_gap.s_star, ".17g")
        header["min_gap"] = format(min_gap.gap, ".17g")
    gaps = exact.gap_curve
    rows = []
    for g, s in enumerate(exact.s_grid):
        row: Dict[str, Cell] = {"s": float(s), "gap": float(gaps[g])}
        for k in range(exact.m):
            row[f"X_{k}"] = float(exact.levels[g, k])
        rows.append(row)
    return ResultTable(header=header, columns=columns, rows=rows)


def comparison_table(
    sweep: SpectrumSweep,
    exact: ExactSweep,
    comparison: Comparison,
    meta: Mapping[str, object],
) -> ResultTable:
    """Columns s, E_k, X_k, err_k, row_max_err, warnings; header carries max_error."""
    m = sweep.m
    columns = (
        ["s"]
        + [f"E_{k}" for k in range(m)]
        + [f"X_{k}" for k in range(m)]
        + [f"err_{k}" for k in range(m)]
        + ["row_max_err", "warnings"]
    )
    header = {key: str(value) for key, value in meta.items()}
    header["basis_size"] = str(sweep.basis_size)
    header["max_error"] = format(comparison.max_error, ".17g")
    rows = []
    for g, s in enumerate(sweep.s_grid):
        row: Dict[str, Cell] = {"s": float(s), "row_max_err": float(comparison.row_max_error[g])}
        for k in range(m):
            row[f"E_{k}"] = float(sweep.levels[g, k])
            row[f"X_{k}"] = float(exact.levels[g, k])
            row[f"err_{k}"] = float(comparison.errors[g, k])
        row["warnings"] = ";".join(sweep.warnings[g])
        rows.append(row)
    return ResultTable(header=header, columns=columns, rows=rows)
