"""
Annealing schedules.

Tabulated energy scales Delta(s) (transverse field) and Eps(s) (problem
Hamiltonian) over s in [0, 1], piecewise-linear between knots.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from effham.core.exceptions import ContractViolationError, DomainError


SchedulePoint = Tuple[float, float, float]


@dataclass(frozen=True)
class Schedule:
    """
    Knots (s, delta, eps) with strictly increasing s from 0 to 1.

    Attributes:
        points: Ordered knots.
        label: Free-form description carried into output headers.
    """
    points: Tuple[SchedulePoint, ...]
    label: str = "custom"

    def __post_init__(self) -> None:
        points = tuple((float(s), float(d), float(e)) for s, d, e in self.points)
        if len(points) < 2:
            raise ContractViolationError("A schedule needs at least two knots")
        s_values = [p[0] for p in points]
        if s_values[0] != 0.0 or s_values[-1] != 1.0:
            raise ContractViolationError("Schedule must start at s=0 and end at s=1")
        if any(b <= a for a, b in zip(s_values, s_values[1:])):
            raise ContractViolationError("Schedule s values must be strictly increasing")
        for s, delta, eps in points:
            if not (math.isfinite(delta) and math.isfinite(eps)) or delta < 0 or eps < 0:
                raise ContractViolationError(
                    f"delta and eps must be finite and nonnegative (s={s})"
                )
        object.__setattr__(self, "points", points)

    @classmethod
    def linear(cls, delta0: float = 10.0, eps0: float = 10.0) -> "Schedule":
        """
        Synthetic schedule Delta(s) = delta0 (1 - s), Eps(s) = eps0 s.

        Not a hardware schedule; used as the default and in tests.
        """
        return cls(
            points=((0.0, delta0, 0.0), (1.0, 0.0, eps0)),
            label=f"synthetic-linear(delta0={delta0!r},eps0={eps0!r})",
        )

    @classmethod
    def from_rows(cls, rows: Sequence[SchedulePoint], label: str = "custom") -> "Schedule":
        return cls(points=tuple(rows), label=label)

    @property
    def s_values(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])


def schedule_at(schedule: Schedule, s: float) -> Tuple[float, float]:
    """
    Interpolate (delta, eps) at s.

    Exact at knots.

    Raises:
        DomainError: If s lies outside [0, 1].
    """
    if not (0.0 <= s <= 1.0):
        raise DomainError("s", s, 0.0, 1.0)
    knots = schedule.s_values
    delta = float(np.interp(s, knots, [p[1] for p in schedule.points]))
    eps = float(np.interp(s, knots, [p[2] for p in schedule.points]))
    return delta, eps
