"""Command-line layer: option validation, mode dispatch and result tables."""

from effham.cli.commands import CommandRunner, exit_code_for, run
from effham.cli.validation import RunConfig, parse_run_config


__all__ = [
    "CommandRunner",
    "RunConfig",
    "exit_code_for",
    "parse_run_config",
    "run",
]
