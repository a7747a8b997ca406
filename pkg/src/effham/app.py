"""
Command-Line Entry Point.

Parses flags, binds the run context for logging and hands a validated
RunConfig to the command runner.
"""

import argparse
import sys
import uuid
from typing import Optional, Sequence

from effham import __version__
from effham.cli.commands import EXIT_USAGE, run
from effham.cli.validation import parse_run_config
from effham.core.exceptions import UsageError
from effham.infrastructure.logging import bind_run_context, logger


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="effham",
        description="Low-energy spectra of transverse-field Ising Hamiltonians "
        "from perturbative effective Hamiltonians.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--mode", required=True, choices=["sweep", "exact", "compare", "generate"])
    parser.add_argument("--problem", help="problem JSON file")
    parser.add_argument("--schedule", help="schedule CSV (s,delta,eps); synthetic linear if omitted")
    parser.add_argument("--ns", type=int, help="target subspace size")
    parser.add_argument("--levels", type=int, help="number of levels to follow")
    parser.add_argument("--s-grid", dest="s_grid", help="start:stop:count or comma-separated list")
    parser.add_argument("--diag-order", dest="diag_order", type=int, choices=[2, 4])
    parser.add_argument("--offdiag-order", dest="offdiag_order", type=int, choices=[1, 2])
    parser.add_argument("--select", choices=["index", "overlap", "auto"])
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="output file; standard output if omitted")
    parser.add_argument("--topology", help="chain:N, grid:RxC, chimera:MxNxT or topology JSON file")
    parser.add_argument("--exact-levels", dest="exact_levels", type=int)
    parser.add_argument("--exact-method", dest="exact_method", choices=["auto", "dense", "lanczos"])
    parser.add_argument("--workers", type=int, help="threads for independent (s, k) tasks")
    parser.add_argument("--basis-dump", dest="basis_dump", help="write the enumerated basis as JSON")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the command line.

    Args:
        argv: Arguments without the program name; sys.argv when None.

    Returns:
        Exit status.
    """
    args = create_parser().parse_args(argv)
    bind_run_context(uuid.uuid4().hex[:12], args.mode)
    try:
        config = parse_run_config(vars(args))
    except UsageError as e:
        sys.stderr.write(f"error: {e.message}\n")
        logger.error(e.message, extra={"extra_fields": {"field": e.field}})
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
