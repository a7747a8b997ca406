"""
CLI Commands.

Executes a validated RunConfig: loads inputs, dispatches to the services,
writes result tables and maps failures to exit codes.
"""

import sys
from pathlib import Path
from typing import Any, Dict, Optional, TextIO

from effham import __version__
from effham.cli.tables import comparison_table, exact_table, sweep_table
from effham.cli.validation import RunConfig
from effham.core.enumeration import enumerate_low_states
from effham.core.exceptions import ComputationError, EffhamError, FeasibilityError, InputError
from effham.core.ising import IsingProblem, generate_instance
from effham.core.perturbation import OrderConfig
from effham.core.schedule import Schedule
from effham.core.topology import parse_topology
from effham.infrastructure.files import (
    ResultTable,
    dumps_result_table,
    load_problem,
    load_schedule,
    load_topology,
    save_problem,
    write_basis_dump,
    write_result_table,
)
from effham.infrastructure.logging import get_logger, log_duration
from effham.infrastructure.metrics import get_metrics
from effham.services.oracle import compare_sweeps, exact_sweep
from effham.services.sweep import SpectrumSweep, SweepConfig, SweepService


logger = get_logger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_FEASIBILITY = 3
EXIT_COMPUTATION = 4


def exit_code_for(error: BaseException) -> int:
    """Exit status for an error raised during a run."""
    if isinstance(error, FeasibilityError):
        return EXIT_FEASIBILITY
    if isinstance(error, (InputError, OSError)):
        return EXIT_USAGE
    if isinstance(error, ComputationError):
        return EXIT_COMPUTATION
    return EXIT_UNEXPECTED


class CommandRunner:
    """
    Runs one CLI mode.

    Responsible for:
    - Reading problem, schedule and topology files
    - Calling the sweep and oracle services
    - Writing tables to a file or standard output
    """

    def __init__(
        self,
        sweep_service: Optional[SweepService] = None,
        stdout: Optional[TextIO] = None,
        stderr: Optional[TextIO] = None,
    ) -> None:
        self._sweep_service = sweep_service or SweepService()
        self._stdout = stdout or sys.stdout
        self._stderr = stderr or sys.stderr

    def _load_schedule(self, config: RunConfig) -> Schedule:
        if config.schedule is None:
            return Schedule.linear()
        return load_schedule(config.schedule)

    def _load_problem(self, config: RunConfig) -> IsingProblem:
        assert config.problem is not None
        return load_problem(config.problem)

    def _meta(self, config: RunConfig, schedule: Schedule) -> Dict[str, Any]:
        meta: Dict[str, Any] = {
            "version": __version__,
            "mode": config.mode,
            "problem": config.problem,
            "schedule": schedule.label,
            "seed": config.seed,
            "s_grid": ",".join(format(s, ".17g") for s in config.s_grid),
        }
        if config.mode != "exact":
            meta.update({
                "ns": config.ns,
                "levels": config.levels,
                "diag_order": config.diag_order,
                "offdiag_order": config.offdiag_order,
                "select": config.select.value,
            })
        if config.mode != "sweep":
            meta["exact_levels"] = config.oracle_levels
            meta["exact_method"] = config.exact_method
        return meta

    def _emit(self, table: ResultTable, out: Optional[Path]) -> None:
        if out is None:
            self._stdout.write(dumps_result_table(table))
        else:
            write_result_table(table, out)
            logger.info(
                f"Wrote {len(table.rows)} rows to {out}",
                extra={"extra_fields": {"path": str(out), "rows": len(table.rows)}}
            )

    def _sweep(self, config: RunConfig, problem: IsingProblem, schedule: Schedule) -> SpectrumSweep:
        basis = enumerate_low_states(problem, config.ns)
        if config.basis_dump is not None:
            write_basis_dump(basis, config.basis_dump)
        sweep_config = SweepConfig(
            target_size=config.ns,
            levels=config.levels,
            s_grid=config.s_grid,
            orders=OrderConfig(config.diag_order, config.offdiag_order),
            selection_rule=config.select,
            max_workers=config.workers,
        )
        return self._sweep_service.run(problem, schedule, sweep_config, basis)

    def run_sweep_mode(self, config: RunConfig) -> None:
        problem = self._load_problem(config)
        schedule = self._load_schedule(config)
        sweep = self._sweep(config, problem, schedule)
        self._emit(sweep_table(sweep, self._meta(config, schedule)), config.out)

    def run_exact_mode(self, config: RunConfig) -> None:
        problem = self._load_problem(config)
        schedule = self._load_schedule(config)
        exact = exact_sweep(
            problem, schedule, config.s_grid, config.oracle_levels,
            method=config.exact_method, rng_seed=config.seed,
        )
        self._emit(exact_table(exact, self._meta(config, schedule)), config.out)

    def run_compare_mode(self, config: RunConfig) -> None:
        problem = self._load_problem(config)
        schedule = self._load_schedule(config)
        exact = exact_sweep(
            problem, schedule, config.s_grid, config.oracle_levels,
            method=config.exact_method, rng_seed=config.seed,
        )
        sweep = self._sweep(config, problem, schedule)
        comparison = compare_sweeps(sweep, exact)
        table = comparison_table(sweep, exact, comparison, self._meta(config, schedule))
        self._emit(table, config.out)

    def run_generate_mode(self, config: RunConfig) -> None:
        assert config.topology is not None and config.out is not None
        source = Path(config.topology)
        n, edges = load_topology(source) if source.is_file() else parse_topology(config.topology)
        problem = generate_instance(n, edges, config.seed)
        save_problem(problem, config.out)
        logger.info(
            f"Generated {n}-qubit problem",
            extra={"extra_fields": {"n": n, "edges": len(edges), "seed": config.seed}}
        )

    @log_duration("cli_run")
    def _dispatch(self, config: RunConfig) -> None:
        handlers = {
            "sweep": self.run_sweep_mode,
            "exact": self.run_exact_mode,
            "compare": self.run_compare_mode,
            "generate": self.run_generate_mode,
        }
        handlers[config.mode](config)

    def run(self, config: RunConfig) -> int:
        """
        Execute a run.

        Args:
            config: Validated configuration.

        Returns:
            Process exit status.
        """
        try:
            self._dispatch(config)
        except (EffhamError, OSError) as e:
            return self._fail(e)
        except Exception as e:  # noqa: BLE001
            logger.exception(f"Unexpected error: {e}")
            return self._fail(e)
        finally:
            logger.info(
                "Run metrics",
                extra={"extra_fields": {"metrics": get_metrics().snapshot()}}
            )
        return EXIT_OK

    def _fail(self, error: BaseException) -> int:
        code = exit_code_for(error)
        message = error.message if isinstance(error, EffhamError) else str(error)
        self._stderr.write(f"error: {message}\n")
        logger.error(
            message,
            extra={"extra_fields": {"error_type": type(error).__name__, "exit_code": code}}
        )
        return code


def run(config: RunConfig) -> int:
    """Run a configuration with default collaborators."""
    return CommandRunner().run(config)
