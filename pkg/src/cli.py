"""
Command line front end for the multiobjective CG solver.

Commands read a JSON run configuration, run the solver and write JSON
reports and CSV data next to each other in the output directory.

Exit codes: 0 converged, 2 max-iters, 1 runtime error, 3 check failure,
64 usage or configuration error, including step parameters that violate
their contract for the chosen problem (delta, DY scale).
"""

import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, Optional

import click
import numpy as np
import pandas as pd

from src.checks import SUITES, run_checks
from src.exceptions import ConfigError, ContractViolationError, MocgError
from src.settings import RunConfig, RuntimeSettings, load_run_config
from src.solver import (
    ParetoFront,
    SolveReport,
    SolveStatus,
    multistart_pareto,
    solve,
    trajectory_columns,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MAX_ITERS = 2
EXIT_CHECK_FAILED = 3
EXIT_USAGE = 64

STATUS_EXIT_CODES = {
    SolveStatus.CONVERGED: EXIT_OK,
    SolveStatus.MAX_ITERS: EXIT_MAX_ITERS,
    SolveStatus.DEGENERATE: EXIT_ERROR,
    SolveStatus.ERROR: EXIT_ERROR,
}

FLOAT_FORMAT = "%.17g"


def write_json(path: Path, payload: Dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n")


def write_trajectory(path: Path, report: SolveReport) -> None:
    n = report.final_x.size
    m = 0 if report.final_objectives is None else report.final_objectives.size
    frame = pd.DataFrame(
        [record.as_row() for record in report.records], columns=trajectory_columns(n, m)
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)


def write_front(path: Path, front: ParetoFront) -> None:
    rows = []
    for index, (report, dominated) in enumerate(zip(front.reports, front.dominated)):
        objectives = report.final_objectives
        if objectives is None:
            objectives = np.full(front.m, np.nan)
        row = {"start": index, "status": report.status.value}
        row.update({f"F_{i}": value for i, value in enumerate(objectives)})
        row["dominated"] = int(dominated)
        rows.append(row)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(rows).to_csv(path, index=False, float_format=FLOAT_FORMAT)


def run_summary(report: SolveReport) -> Dict[str, Any]:
    return {
        "status": report.status.value,
        "iterations": report.iterations,
        "func_evals": report.func_evals,
        "jac_evals": report.jac_evals,
        "stepsize_func_evals": report.stepsize_func_evals,
        "stepsize_jac_evals": report.stepsize_jac_evals,
        "final_norm_v": report.final_norm_v,
        "restarts": report.restarts,
        "message": report.message,
    }


def _load(config_path: Path, seed: Optional[int], out: Optional[Path]) -> RunConfig:
    config = load_run_config(config_path)
    updates: Dict[str, Any] = {}
    if seed is not None:
        updates["seed"] = seed
    if out is not None:
        updates["out_dir"] = str(out)
    return config.model_copy(update=updates)


def _guarded(ctx: click.Context, command) -> None:
    """Run ``command`` and exit with its code, mapping failures onto exit codes."""
    try:
        code = command()
    except ConfigError as e:
        click.echo(f"Config error: {e}", err=True)
        code = EXIT_USAGE
    except ContractViolationError as e:
        # step constants that only become checkable once the problem is known
        click.echo(f"Parameter error: {e}", err=True)
        code = EXIT_USAGE
    except MocgError as e:
        logger.error(f"Run failed: {e}")
        code = EXIT_ERROR
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        code = EXIT_ERROR
    ctx.exit(code)


config_option = click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="JSON run configuration.",
)
out_option = click.option(
    "--out", type=click.Path(file_okay=False, path_type=Path), help="Output directory."
)
seed_option = click.option("--seed", type=int, help="Overrides the config seed.")


def _quiet(ctx: click.Context, param: Optional[click.Parameter], value: bool) -> None:
    """Lower the root logger to WARNING; accepted before or after the subcommand."""
    if value:
        logging.getLogger().setLevel(logging.WARNING)


quiet_option = click.option(
    "--quiet",
    is_flag=True,
    expose_value=False,
    callback=_quiet,
    help="Only log warnings and errors.",
)


@click.group()
@click.option("--quiet", is_flag=True, help="Only log warnings and errors.")
@click.pass_context
def cli(ctx: click.Context, quiet: bool) -> None:
    """Line-search-free nonlinear CG for multiobjective optimization."""
    settings = RuntimeSettings()
    logging.basicConfig(
        level=settings.log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    _quiet(ctx, None, quiet)
    ctx.obj = settings


@cli.command("solve")
@config_option
@quiet_option
@out_option
@seed_option
@click.pass_context
def cmd_solve(ctx, config_path, out, seed):
    """Solve once and write report.json and trajectory.csv."""

    def command():
        config = _load(config_path, seed, out)
        problem = config.build_problem()
        x0 = config.initial_point(problem)
        report = solve(problem, x0, config.to_solve_config())
        out_dir = Path(config.out_dir)
        payload = report.to_dict()
        payload["config"] = config.model_dump(mode="json")
        write_json(out_dir / "report.json", payload)
        write_trajectory(out_dir / "trajectory.csv", report)
        logger.info(f"{report.status.value} after {report.iterations} iterations, wrote {out_dir}")
        return STATUS_EXIT_CODES[report.status]

    _guarded(ctx, command)


@cli.command("compare")
@config_option
@quiet_option
@out_option
@seed_option
@click.pass_context
def cmd_compare(ctx, config_path, out, seed):
    """Run the fixed stepsize and the Wolfe baseline from the same start."""

    def command():
        config = _load(config_path, seed, out)
        problem = config.build_problem()
        x0 = config.initial_point(problem)
        fixed = solve(problem, x0, config.to_solve_config("fixed"))
        baseline = solve(problem, x0, config.to_solve_config(config.baseline_mode))
        if baseline.status == SolveStatus.ERROR:
            logger.warning(f"Baseline {config.baseline_mode} run failed: {baseline.message}")
        payload = {
            "problem": problem.name,
            "dimension": problem.n,
            "x0": [float(v) for v in x0],
            "beta_rule": fixed.beta_rule,
            "runs": {"fixed": run_summary(fixed), config.baseline_mode: run_summary(baseline)},
        }
        write_json(Path(config.out_dir) / "comparison.json", payload)
        return STATUS_EXIT_CODES[fixed.status]

    _guarded(ctx, command)


@cli.command("pareto")
@config_option
@quiet_option
@out_option
@seed_option
@click.pass_context
def cmd_pareto(ctx, config_path, out, seed):
    """Multistart front approximation; writes front.csv and summary.json."""
    settings: RuntimeSettings = ctx.obj

    def command():
        config = _load(config_path, seed, out)
        problem = config.build_problem()
        started = time.perf_counter()
        front = multistart_pareto(
            problem,
            config.starts,
            config.seed,
            config.to_solve_config(),
            scheduler=settings.scheduler,
        )
        runtime = time.perf_counter() - started
        out_dir = Path(config.out_dir)
        write_front(out_dir / "front.csv", front)
        statuses = [r.status for r in front.reports]
        write_json(
            out_dir / "summary.json",
            {
                "problem": problem.name,
                "starts": config.starts,
                "seed": config.seed,
                "converged": front.converged_count,
                "errors": statuses.count(SolveStatus.ERROR),
                "nondominated": int((front.valid & ~front.dominated).sum()),
                "restarts": front.restarts,
                "runtime_seconds": runtime,
            },
        )
        if SolveStatus.ERROR in statuses or SolveStatus.DEGENERATE in statuses:
            return EXIT_ERROR
        if SolveStatus.MAX_ITERS in statuses:
            return EXIT_MAX_ITERS
        return EXIT_OK

    _guarded(ctx, command)


@cli.command("check")
@click.argument("scope", default="all", type=click.Choice(["all", *SUITES]))
@quiet_option
@click.pass_context
def cmd_check(ctx, scope):
    """Run the invariant suites; exit 3 if any check fails."""
    settings: RuntimeSettings = ctx.obj

    def command():
        results = run_checks(scope, settings)
        for suite in results:
            click.echo(f"[{'PASS' if suite.passed else 'FAIL'}] {suite.name}")
            for check in suite.checks:
                mark = "ok" if check.passed else "FAILED"
                click.echo(
                    f"    {check.name}: worst={check.worst:.3e} "
                    f"threshold={check.threshold:.1e} {mark} {check.detail}".rstrip()
                )
        return EXIT_OK if all(s.passed for s in results) else EXIT_CHECK_FAILED

    _guarded(ctx, command)


def main(argv=None) -> None:
    try:
        code = cli.main(args=argv, prog_name="mocg", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        code = EXIT_USAGE
    except click.ClickException as e:
        e.show()
        code = EXIT_ERROR
    except click.Abort:
        code = EXIT_ERROR
    sys.exit(code or EXIT_OK)


if __name__ == "__main__":
    main()
