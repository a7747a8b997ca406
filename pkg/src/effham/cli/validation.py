"""
Run Configuration Validation.

Uses Pydantic to validate command-line options before any work starts.
"""

from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from effham.config import settings
from effham.core.exceptions import UsageError
from effham.services.sweep import SelectionRule


Mode = Literal["sweep", "exact", "compare", "generate"]


def parse_s_grid(value: str) -> Tuple[float, ...]:
    """
    Parse ``start:stop:count`` or a comma-separated list of s values.

    Raises:
        ValueError: If the text is malformed.
    """
    text = value.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("expected start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError("count must be at least 1")
        return tuple(float(s) for s in np.linspace(start, stop, count))
    return tuple(float(item) for item in text.split(",") if item.strip())


class RunConfig(BaseModel):
    """Validated options for one CLI run."""

    mode: Mode
    problem: Optional[Path] = Field(default=None, description="Problem JSON file")
    schedule: Optional[Path] = Field(
        default=None,
        description="Schedule CSV; the synthetic linear schedule when absent",
    )
    ns: int = Field(default=50, ge=1, description="Target subspace size N_S")
    levels: int = Field(default=2, ge=1, description="Number of levels m")
    s_grid: Tuple[float, ...] = Field(default=(0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0))
    diag_order: Literal[2, 4] = 4
    offdiag_order: Literal[1, 2] = 2
    select: SelectionRule = SelectionRule.AUTO
    seed: int = Field(default_factory=lambda: settings.seed)
    out: Optional[Path] = Field(default=None, description="Output file; standard output when absent")
    topology: Optional[str] = Field(
        default=None,
        description="Topology spec (chain:N, grid:RxC, chimera:MxNxT) or topology JSON file",
    )
    exact_levels: Optional[int] = Field(default=None, ge=1)
    exact_method: Literal["auto", "dense", "lanczos"] = "auto"
    workers: Optional[int] = Field(default=None, ge=1, le=256)
    basis_dump: Optional[Path] = None

    @field_validator("s_grid", mode="before")
    @classmethod
    def parse_grid(cls, v: Any) -> Any:
        """Accept the textual grid forms."""
        if isinstance(v, str):
            return parse_s_grid(v)
        return v

    @field_validator("s_grid")
    @classmethod
    def validate_grid(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        """Grid must be nonempty, inside [0, 1] and strictly ascending."""
        if not v:
            raise ValueError("s grid cannot be empty")
        if any(not (0.0 <= s <= 1.0) for s in v):
            raise ValueError("s values must lie in [0, 1]")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("s values must be strictly ascending")
        return v

    @model_validator(mode="after")
    def check_mode_requirements(self) -> "RunConfig":
        """Fields each mode needs, and cross-field bounds."""
        if self.mode == "generate":
            if not self.topology:
                raise UsageError("topology", "required in generate mode")
            if self.out is None:
                raise UsageError("out", "required in generate mode")
            return self
        if self.problem is None:
            raise UsageError("problem", f"required in {self.mode} mode")
        if self.mode in ("sweep", "compare") and self.levels > self.ns:
            raise UsageError("levels", f"{self.levels} exceeds ns={self.ns}")
        if self.mode == "compare" and self.exact_levels is not None and self.exact_levels < self.levels:
            raise UsageError("exact_levels", f"must be at least levels={self.levels}")
        return self

    @property
    def oracle_levels(self) -> int:
        return self.exact_levels or self.levels


def parse_run_config(raw: Dict[str, Any]) -> RunConfig:
    """
    Validate raw option values.

    Args:
        raw: Option names mapped to values; None means "not given".

    Returns:
        RunConfig.

    Raises:
        UsageError: Naming the first invalid field.
    """
    try:
        return RunConfig(**{key: value for key, value in raw.items() if value is not None})
    except ValidationError as e:
        error = e.errors()[0]
        field = ".".join(str(part) for part in error["loc"]) or "config"
        raise UsageError(field, error["msg"]) from e
