"""Configuration package."""

from effham.config.settings import (
    EigenSettings,
    EnumerationSettings,
    PerturbationSettings,
    Settings,
    SweepSettings,
    settings,
)

__all__ = [
    "EigenSettings",
    "EnumerationSettings",
    "PerturbationSettings",
    "Settings",
    "SweepSettings",
    "settings",
]
