# backend/app/cli.py

import logging
import sys

import click
from logs.config import setup_logging

from .exceptions import EdrEngineError
from .models.decision import Decision, DecisionReason
from .services.decision_engine import DecisionEngine, find_saturation_capacity
from .services.dp_oracle import DpConfig, oracle_check
from .services.formulation import validate_schedule
from .services.reports import (
    read_schedule_csv,
    write_comparison_report,
    write_decision_report,
    write_sweep_report,
)
from .services.scenario_loader import load_scenario

logger = logging.getLogger(__name__)

EXIT_PARTICIPATE = 0
EXIT_NONPARTICIPATE = 1
EXIT_INFEASIBLE = 2
EXIT_ERROR = 3


def exit_code_for(decision: Decision) -> int:
    if decision.reason == DecisionReason.INFEASIBLE:
        return EXIT_INFEASIBLE
    return EXIT_PARTICIPATE if decision.participate else EXIT_NONPARTICIPATE


def _parse_capacities(value: str) -> list[float]:
    try:
        capacities = [float(part) for part in value.split(",") if part.strip()]
    except ValueError as e:
        raise click.BadParameter(f"expected comma-separated kWh values, got '{value}'") from e
    if not capacities:
        raise click.BadParameter("at least one capacity is required")
    return capacities


def _fail(ctx: click.Context, exc: Exception) -> None:
    logger.error(f"{ctx.command.name} failed: {exc}", exc_info=True)
    click.echo(f"error: {exc}", err=True)
    ctx.exit(EXIT_ERROR)


@click.group()
@click.option("--log-config", envvar="LOG_CFG", default=None, help="YAML logging config.")
def cli(log_config: str | None):
    """EDR participation decisions for a BES-assisted EV charging station."""
    if log_config:
        setup_logging(default_path=log_config)
    else:
        setup_logging()


@cli.command()
@click.option("--scenario", "scenario_path", required=True, help="Scenario config file.")
@click.option("--out", "out_dir", required=True, help="Report output directory.")
@click.option("--format", "fmt", type=click.Choice(["text", "csv", "both"]), default="both",
              show_default=True)
@click.option("--oracle", is_flag=True, help="Cross-check the optimum against the DP oracle.")
@click.option("--soc-resolution", type=float, default=DpConfig().soc_grid_resolution,
              show_default=True)
@click.option("--power-resolution", type=float, default=DpConfig().power_grid_resolution,
              show_default=True)
@click.pass_context
def decide(ctx, scenario_path, out_dir, fmt, oracle, soc_resolution, power_resolution):
    """Decide whether to join the EDR event and write the report."""
    try:
        scenario = load_scenario(scenario_path)
        decision = DecisionEngine().decide(scenario)
        check = None
        if oracle:
            config = DpConfig(soc_grid_resolution=soc_resolution,
                              power_grid_resolution=power_resolution)
            check = oracle_check(scenario, decision.c_edr, config)
        write_decision_report(decision, scenario, out_dir, fmt=fmt, oracle=check)
    except (EdrEngineError, OSError, ValueError) as e:
        _fail(ctx, e)
        return
    click.echo(
        f"{scenario.name}: {'participate' if decision.participate else 'nonparticipate'} "
        f"({decision.reason.value})"
    )
    ctx.exit(exit_code_for(decision))


@cli.command()
@click.option("--scenario", "scenario_path", required=True)
@click.option("--capacities", required=True, help="Comma-separated BES capacities in kWh.")
@click.option("--out", "out_dir", required=True)
@click.pass_context
def sweep(ctx, scenario_path, capacities, out_dir):
    """Re-run the decision over a list of BES capacities."""
    values = _parse_capacities(capacities)
    try:
        scenario = load_scenario(scenario_path)
        entries = DecisionEngine().capacity_sweep(scenario, values)
        saturation = find_saturation_capacity(entries)
        write_sweep_report(scenario, entries, saturation, out_dir)
    except (EdrEngineError, OSError, ValueError) as e:
        _fail(ctx, e)
        return
    click.echo(f"{scenario.name}: {len(entries)} capacities, saturation "
               f"{'none' if saturation is None else f'{saturation:g} kWh'}")


@cli.command()
@click.option("--scenario", "scenario_path", required=True)
@click.option("--schedule", "schedule_path", required=True, help="Schedule CSV to check.")
@click.pass_context
def validate(ctx, scenario_path, schedule_path):
    """Check a schedule CSV against every model constraint."""
    try:
        scenario = load_scenario(scenario_path)
        violations = validate_schedule(read_schedule_csv(schedule_path, scenario), scenario)
    except (EdrEngineError, OSError, ValueError) as e:
        _fail(ctx, e)
        return
    for violation in violations:
        click.echo(str(violation))
    if violations:
        click.echo(f"{len(violations)} violation(s)")
        ctx.exit(EXIT_NONPARTICIPATE)
    click.echo("schedule is feasible")


@cli.command()
@click.option("--scenario", "scenario_paths", required=True, multiple=True)
@click.option("--out", "out_dir", required=True)
@click.pass_context
def compare(ctx, scenario_paths, out_dir):
    """Tabulate with/without-EDR profit for several scenarios."""
    try:
        scenarios = [load_scenario(path) for path in scenario_paths]
        rows = DecisionEngine().compare(scenarios)
        write_comparison_report(rows, out_dir)
    except (EdrEngineError, OSError, ValueError) as e:
        _fail(ctx, e)
        return
    for row in rows:
        click.echo(f"{row.name}: {'participate' if row.participate else 'nonparticipate'}")


def main(argv: list[str] | None = None) -> None:
    """Console entry point; click usage errors also map to the error exit code."""
    try:
        code = cli.main(args=argv, prog_name="edr-station", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        sys.exit(EXIT_ERROR)
    except click.Abort:
        sys.exit(EXIT_ERROR)
    except Exception as e:
        logger.error(f"edr-station failed: {e}", exc_info=True)
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_ERROR)
    sys.exit(code or 0)


if __name__ == "__main__":
    main()
