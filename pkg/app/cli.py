"""
Command-line entry point.

    python -m app.cli simulate [--config FILE] [--key value ...]
    python -m app.cli fuzz     [--config FILE] [--key value ...]
    python -m app.cli presets
    python -m app.cli converge [--key value ...]

Exit codes: 0 success, 1 configuration or usage error, 2 run breakdown or
failed convergence study, 3 inequality violation.
"""

import functools
import logging
import sys
from typing import Any, Dict, List, Optional

import click

from app.errors import ConfigError, InvalidPreset
from app.models.request import FuzzConfig, ModelKind, OutputFormat, RunConfig, StudyConfig
from app.models.response import TrajectorySummary
from app.services.config_service import build_config, read_config_file
from app.services.fuzz_service import fuzz_service
from app.services.output_service import write_csv, write_fuzz_report, write_json
from app.services.simulation_service import simulation_service
from app.services.study_service import study_service
from app.services.trialgen import PRESET_CATALOG

# Configure logging
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BREAKDOWN = 2
EXIT_VIOLATION = 3


def _configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _config_errors_exit(command):
    """Report ConfigError / InvalidPreset as a one-line message and exit 1."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (ConfigError, InvalidPreset) as e:
            click.echo(f"error: {e.message}", err=True)
            click.get_current_context().exit(EXIT_CONFIG)

    return wrapper


def _load(model, config_path: Optional[str], overrides: Dict[str, Any]):
    file_values = read_config_file(config_path) if config_path else {}
    return build_config(model, file_values, overrides)


def _format_optional(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.6e}"


def _echo_summary(summary: TrajectorySummary) -> None:
    click.echo(f"termination:          {summary.termination.value}")
    if summary.message:
        click.echo(f"message:              {summary.message}")
    click.echo(f"steps:                {summary.steps}")
    click.echo(f"records:              {summary.records}")
    click.echo(f"final t:              {summary.final_t:.6g}")
    click.echo(f"final mass:           {summary.final_mass:.15g}")
    click.echo(f"relative mass drift:  {summary.relative_mass_drift:.3e}")
    click.echo(f"final L2 distance:    {summary.final_l2_dist:.6e}")
    click.echo(f"entropy residual:     {_format_optional(summary.entropy_residual)}")
    click.echo(f"energy residual:      {_format_optional(summary.energy_residual)}")
    click.echo(f"decay bound holds:    {summary.decay_bound_ok}")
    click.echo(f"monotone quantities:  {summary.monotone_ok}")


@click.group()
@click.option("-v", "--verbose", count=True, help="Log INFO (-v) or DEBUG (-vv) to stderr.")
@click.option("-q", "--quiet", is_flag=True, help="Only log errors.")
def cli(verbose: int, quiet: bool):
    """Arctan-fast diffusion on the circle: simulation and inequality checks."""
    _configure_logging(verbose, quiet)


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="key = value run file.")
@click.option("--model", type=click.Choice([k.value for k in ModelKind]), help="PDE to integrate.")
@click.option("--n", type=int, help="Grid points (power of two >= 8).")
@click.option("--cfl", type=float, help="Parabolic CFL number.")
@click.option("--t_end", "--t-end", "t_end", type=float, help="Final time.")
@click.option("--record_every", "--record-every", "record_every", type=float, help="Diagnostics interval.")
@click.option("--preset", help="Initial datum, e.g. 'cosine_bump(0.5)'.")
@click.option("--initial_data", "--initial-data", "initial_data", help="File with n samples of u0.")
@click.option("--epsilon", type=float, help="Artificial viscosity (regularized only).")
@click.option("--kappa", type=float, help="Mollification time (regularized only).")
@click.option("--delta", type=float, help="Initial-data lift (regularized only).")
@click.option("--hilbert_sign", "--hilbert-sign", "hilbert_sign", type=int, help="+1 or -1.")
@click.option("--output", "-o", help="Output file.")
@click.option("--format", "output_format", type=click.Choice([f.value for f in OutputFormat]), help="csv or json.")
@click.option("--max_steps", "--max-steps", "max_steps", type=int, help="Hard cap on steps.")
@click.option("--positivity_floor", "--positivity-floor", "positivity_floor", type=float, help="Smallest admissible min u.")
@_config_errors_exit
def simulate(config_path, output_format, **overrides):
    """Integrate one trajectory and write its diagnostics."""
    overrides["format"] = output_format
    config: RunConfig = _load(RunConfig, config_path, overrides)
    result = simulation_service.run(config)

    if config.output:
        if config.format == OutputFormat.JSON:
            write_json(config.output, result.to_response())
        else:
            write_csv(config.output, result.trajectory.records)

    _echo_summary(result.summary)
    if not result.trajectory.succeeded:
        click.get_current_context().exit(EXIT_BREAKDOWN)


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="key = value fuzz file.")
@click.option("--trials", type=int, help="Number of random trials.")
@click.option("--seed0", type=int, help="Base seed; trial i uses seed0 + i.")
@click.option("--n", type=int, help="Grid points (power of two >= 8).")
@click.option("--max_mode", "--max-mode", "max_mode", type=int, help="Highest wavenumber K (<= n/4).")
@click.option("--min_floor", "--min-floor", "min_floor", type=float, help="Lower bound for 1 + g.")
@click.option("--amplitude_decay", "--amplitude-decay", "amplitude_decay", type=float, help="Envelope exponent.")
@click.option("--tolerance", type=float, help="Margins below -tolerance are violations.")
@click.option("--report", help="Per-trial CSV report.")
@click.option("--workers", type=int, help="Concurrent evaluation threads.")
@_config_errors_exit
def fuzz(config_path, **overrides):
    """Check both Sobolev-type inequalities on random positive densities."""
    config: FuzzConfig = _load(FuzzConfig, config_path, overrides)
    response = fuzz_service.run(config)
    if config.report:
        write_fuzz_report(config.report, response.rows)

    click.echo(f"trials:        {response.trials}")
    click.echo(f"min margin 1:  {response.min_margin_1:.6e}")
    click.echo(f"min margin 2:  {response.min_margin_2:.6e}")
    if not response.passed:
        row = next(r for r in response.rows if r.seed == response.failing_seed)
        click.echo(
            f"VIOLATION seed={row.seed} margin_1={row.margin_1:.6e} margin_2={row.margin_2:.6e}",
            err=True,
        )
        click.get_current_context().exit(EXIT_VIOLATION)


@cli.command()
def presets():
    """List the named initial data and their parameter constraints."""
    click.echo(f"{'name':<14}{'parameters':<12}{'constraint':<16}description")
    for info in PRESET_CATALOG:
        params = ",".join(info.parameters) or "-"
        click.echo(f"{info.name:<14}{params:<12}{info.constraint:<16}{info.description}")


@cli.command()
@click.option("--preset", help="Initial datum preset.")
@click.option("--n", type=int, help="Base grid points.")
@click.option("--cfl", type=float, help="Parabolic CFL number at the base resolution.")
@click.option("--t_end", "--t-end", "t_end", type=float, help="Final time.")
@click.option("--level", "levels", type=float, multiple=True, help="Regularization level (repeatable).")
@click.option("--threshold", type=float, help="Required sup-distance at the finest level.")
@click.option("--resolution_tolerance", "--resolution-tolerance", "resolution_tolerance", type=float)
@_config_errors_exit
def converge(levels, **overrides):
    """Regularization and resolution convergence studies."""
    overrides["levels"] = list(levels) or None
    config: StudyConfig = build_config(StudyConfig, {}, overrides)

    regularization = study_service.regularization(config)
    click.echo(f"reference: {regularization.reference_termination.value}")
    click.echo(f"{'level':<12}{'sup distance':<16}termination")
    for row in regularization.levels:
        click.echo(f"{row.level:<12.3g}{row.sup_distance:<16.6e}{row.termination.value}")
    click.echo(f"monotone: {regularization.monotone}  below threshold {config.threshold:g}: {regularization.threshold_ok}")

    resolution = study_service.resolution(config)
    click.echo(
        f"resolution n={resolution.n} vs n={resolution.n_fine}: "
        f"L-inf difference {resolution.linf_difference:.6e} (tolerance {resolution.tolerance:g})"
    )

    if not (regularization.passed and resolution.passed):
        click.get_current_context().exit(EXIT_BREAKDOWN)


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and return its exit code; usage errors map to 1."""
    try:
        code = cli.main(args=argv, prog_name="python -m app.cli", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_CONFIG
    except click.ClickException as e:
        e.show()
        return EXIT_CONFIG
    return code if isinstance(code, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
