"""
Result CSV files.

A ``# key=value`` comment header describing the run, then a CSV table.
Numbers are written with 17 significant digits so re-reading and
re-writing a table reproduces it exactly.
"""

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, List, Union

import numpy as np

from effham.core.enumeration import SubspaceBasis
from effham.core.exceptions import ContractViolationError


PathLike = Union[str, Path]
Cell = Union[float, str]
TEXT_COLUMNS: FrozenSet[str] = frozenset({"warnings"})


@dataclass
class ResultTable:
    """
    Header metadata plus rows keyed by column name.

    Attributes:
        header: Ordered key/value pairs for the comment header.
        columns: Column names in output order.
        rows: One dict per row; text columns hold strings, all others floats.
    """
    header: Dict[str, str] = field(default_factory=dict)
    columns: List[str] = field(default_factory=list)
    rows: List[Dict[str, Cell]] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.rows], dtype=np.float64)


def _format_cell(value: Cell) -> str:
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def dumps_result_table(table: ResultTable) -> str:
    buffer = io.StringIO()
    for key, value in table.header.items():
        if "\n" in str(value):
            raise ContractViolationError(f"Header value for {key!r} spans lines")
        buffer.write(f"# {key}={value}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_format_cell(row[name]) for name in table.columns])
    return buffer.getvalue()


def write_result_table(table: ResultTable, path: PathLike) -> None:
    Path(path).write_text(dumps_result_table(table), encoding="utf-8")


def loads_result_table(text: str, text_columns: FrozenSet[str] = TEXT_COLUMNS) -> ResultTable:
    """
    Parse a result table.

    Raises:
        ContractViolationError: On a malformed header line or non-numeric cell.
    """
    header: Dict[str, str] = {}
    body: List[str] = []
    for line in text.splitlines():
        if line.startswith("#") and not body:
            key, sep, value = line[1:].strip().partition("=")
            if not sep:
                raise ContractViolationError(f"Header line without '=': {line!r}")
            header[key] = value
        else:
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader, [])
    rows: List[Dict[str, Cell]] = []
    for values in reader:
        if len(values) != len(columns):
            raise ContractViolationError(f"Row has {len(values)} cells, expected {len(columns)}")
        row: Dict[str, Cell] = {}
        for name, value in zip(columns, values):
            if name in text_columns:
                row[name] = value
            else:
                try:
                    row[name] = float(value)
                except ValueError as e:
                    raise ContractViolationError(f"Column {name!r}: not a number {value!r}") from e
        rows.append(row)
    return ResultTable(header=header, columns=columns, rows=rows)


def read_result_table(path: PathLike) -> ResultTable:
    return loads_result_table(Path(path).read_text(encoding="utf-8"))


def write_basis_dump(basis: SubspaceBasis, path: PathLike) -> None:
    """Write the enumerated basis as JSON records for auditing."""
    payload = {"n": basis.n, "size": basis.size, "states": basis.to_records()}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
