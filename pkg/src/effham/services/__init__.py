"""
Services Layer.

Orchestration of the core numerics:
- Spectrum sweeps with level selection and tracking
- Exact oracle sweeps and comparisons
"""

from effham.services.oracle import Comparison, ExactSweep, compare_sweeps, exact_sweep
from effham.services.sweep import (
    LevelSelection,
    MinGap,
    PointFailure,
    SelectionRule,
    SpectrumSweep,
    SweepConfig,
    SweepService,
    find_min_gap,
    run_sweep,
    select_level,
)


__all__ = [
    "Comparison",
    "ExactSweep",
    "LevelSelection",
    "MinGap",
    "PointFailure",
    "SelectionRule",
    "SpectrumSweep",
    "SweepConfig",
    "SweepService",
    "compare_sweeps",
    "exact_sweep",
    "find_min_gap",
    "run_sweep",
    "select_level",
]
