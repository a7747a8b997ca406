"""
Infrastructure Layer.

Side effects and adapters:
- Structured logging
- In-process metrics
- Problem, schedule and result files (effham.infrastructure.files)
"""

from effham.infrastructure.logging import (
    bind_run_context,
    get_logger,
    log_duration,
    logger,
    StructuredLogger,
)
from effham.infrastructure.metrics import get_metrics, reset_metrics


__all__ = [
    "bind_run_context",
    "get_logger",
    "get_metrics",
    "log_duration",
    "logger",
    "reset_metrics",
    "StructuredLogger",
]
