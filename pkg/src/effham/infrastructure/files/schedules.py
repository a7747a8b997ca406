"""
Schedule CSV files.

Header ``s,delta,eps``, one knot per row, rows sorted by s.
"""

import csv
from pathlib import Path
from typing import Union

from effham.core.exceptions import ContractViolationError
from effham.core.schedule import Schedule


SCHEDULE_COLUMNS = ["s", "delta", "eps"]


def load_schedule(path: Union[str, Path]) -> Schedule:
    """
    Read a schedule CSV.

    Raises:
        ContractViolationError: On a wrong header, unparsable values or invalid knots.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != SCHEDULE_COLUMNS:
            raise ContractViolationError(f"{path}: header must be {','.join(SCHEDULE_COLUMNS)}")
        rows = []
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                s, delta, eps = (float(value) for value in row)
            except ValueError as e:
                raise ContractViolationError(f"{path}:{line}: expected three numbers") from e
            rows.append((s, delta, eps))
    return Schedule.from_rows(rows, label=path.name)


def save_schedule(schedule: Schedule, path: Union[str, Path]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SCHEDULE_COLUMNS)
        for point in schedule.points:
            writer.writerow([format(value, ".17g") for value in point])
