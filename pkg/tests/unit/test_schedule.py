"""
Tests for annealing schedules.
"""

import pytest

from effham.core.exceptions import ContractViolationError, DomainError
from effham.core.schedule import Schedule, schedule_at


class TestSchedule:
    """Tests for Schedule validation."""

    def test_must_span_unit_interval(self):
        """Knots start at 0 and end at 1."""
        with pytest.raises(ContractViolationError):
            Schedule(points=((0.0, 1.0, 0.0), (0.9, 0.0, 1.0)))

    def test_s_must_increase(self):
        """Repeated s values are rejected."""
        with pytest.raises(ContractViolationError):
            Schedule(points=((0.0, 1.0, 0.0), (0.5, 1.0, 1.0), (0.5, 1.0, 1.0), (1.0, 0.0, 1.0)))

    def test_negative_scale_rejected(self):
        """Energy scales are nonnegative."""
        with pytest.raises(ContractViolationError):
            Schedule(points=((0.0, -1.0, 0.0), (1.0, 0.0, 1.0)))

    def test_linear_label_names_parameters(self):
        """The synthetic schedule says what it is."""
        assert Schedule.linear(4.0, 2.0).label.startswith("synthetic-linear")


class TestScheduleAt:
    """Tests for interpolation."""

    def test_exact_at_knots(self, hardware_like_schedule):
        """Knot values come back unchanged."""
        for s, delta, eps in hardware_like_schedule.points:
            assert schedule_at(hardware_like_schedule, s) == (delta, eps)

    def test_linear_between_knots(self):
        """Values between knots are piecewise-linear."""
        schedule = Schedule.linear(10.0, 10.0)

        delta, eps = schedule_at(schedule, 0.25)

        assert delta == pytest.approx(7.5)
        assert eps == pytest.approx(2.5)

    @pytest.mark.parametrize("s", [-0.01, 1.01])
    def test_outside_unit_interval_raises(self, linear_schedule, s):
        """s outside [0, 1] is a domain error."""
        with pytest.raises(DomainError):
            schedule_at(linear_schedule, s)
