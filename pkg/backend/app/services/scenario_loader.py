# backend/app/services/scenario_loader.py

import logging
from pathlib import Path
from typing import TypeVar

from dotenv import dotenv_values
from pydantic import BaseModel, ValidationError

from ..exceptions import ScenarioConfigError
from ..models.grid import format_clock, make_time_grid, parse_clock, price_per_kwh, price_per_mwh
from ..models.scenario import BesSpec, EdrSignal, LoadForecast, PriceSeries, Scenario, StationConfig
from ..models.scenario_file import ScenarioFile
from .timeseries import load_timeseries_csv, write_timeseries_csv

logger = logging.getLogger(__name__)

CONFIG_NAME = "scenario.cfg"

M = TypeVar("M", bound=BaseModel)


def _first_error(exc: ValidationError, prefix: str | None = None) -> tuple[str, str]:
    error = exc.errors()[0]
    loc = ".".join(str(part) for part in error["loc"])
    if prefix:
        loc = f"{prefix}.{loc}" if loc else prefix
    return error["msg"], loc or (prefix or "scenario")


def _build(model: type[M], prefix: str, **fields) -> M:
    try:
        return model(**fields)
    except ValidationError as e:
        message, field = _first_error(e, prefix)
        raise ScenarioConfigError(message, field=field) from e


def load_scenario_file(config_path: str | Path) -> ScenarioFile:
    config_path = Path(config_path)
    if not config_path.is_file():
        raise ScenarioConfigError(f"config file {config_path} does not exist")
    raw = dotenv_values(config_path, interpolate=False)
    data = {key: value for key, value in raw.items() if value not in (None, "")}
    try:
        return ScenarioFile.model_validate(data)
    except ValidationError as e:
        message, field = _first_error(e)
        raise ScenarioConfigError(message, field=field) from e


def load_scenario(config_path: str | Path) -> Scenario:
    """Read a ``key = value`` scenario config and the CSVs it references.

    CSV paths are resolved relative to the config file. Prices arrive in $/MWh
    and leave as $/kWh.
    """
    config_path = Path(config_path)
    cfg = load_scenario_file(config_path)
    base = config_path.parent

    try:
        grid = make_time_grid(cfg.event_start, cfg.horizon_hours, cfg.step_minutes)
    except ValidationError as e:
        message, _ = _first_error(e)
        raise ScenarioConfigError(message, field="grid.step_minutes") from e

    forecast = load_timeseries_csv(base / cfg.forecast_csv, grid)
    grid_price = _to_kwh(load_timeseries_csv(base / cfg.grid_price_csv, grid), "prices.csv")

    if cfg.incentive_price_csv is not None:
        incentive = _to_kwh(
            load_timeseries_csv(base / cfg.incentive_price_csv, grid), "edr.incentive_price_csv"
        )
    else:
        incentive = (price_per_kwh(cfg.incentive_price_mwh),) * grid.steps
    if cfg.min_reduction_csv is not None:
        min_reduction = load_timeseries_csv(base / cfg.min_reduction_csv, grid)
    else:
        min_reduction = (cfg.min_reduction_kw,) * grid.steps

    scenario = _build(
        Scenario,
        "scenario",
        name=cfg.name or config_path.parent.name or config_path.stem,
        grid=grid,
        prices=_build(PriceSeries, "prices", grid_price=grid_price, currency=cfg.currency),
        forecast=_build(LoadForecast, "forecast", forecast=forecast),
        edr=_build(
            EdrSignal,
            "edr",
            incentive_price=incentive,
            min_reduction=min_reduction,
            notification_time=parse_clock(cfg.notification_time),
            decision_window=cfg.decision_window_hours,
        ),
        bes=_build(
            BesSpec,
            "bes",
            rated_capacity=cfg.rated_capacity_kwh,
            max_discharge_power=cfg.max_discharge_kw,
            max_charge_power=cfg.max_charge_kw,
            discharge_eff=cfg.discharge_eff,
            charge_eff=cfg.charge_eff,
            soc_min=cfg.soc_min,
            soc_max=cfg.soc_max,
            initial_soc=cfg.initial_soc,
            terminal_soc_min=cfg.terminal_soc_min,
        ),
        station=_build(StationConfig, "station", ev_price_multiplier=cfg.ev_price_multiplier),
    )
    logger.info(
        f"Loaded scenario '{scenario.name}' from {config_path}: "
        f"{format_clock(grid.start_time)}-{format_clock(grid.end_time)}, {grid.steps} steps"
    )
    return scenario


def _to_kwh(values: tuple[float, ...], field: str) -> tuple[float, ...]:
    try:
        return tuple(price_per_kwh(v) for v in values)
    except ValueError as e:
        raise ScenarioConfigError(str(e), field=field) from e


def _is_constant(values: tuple[float, ...]) -> bool:
    return all(v == values[0] for v in values)


def dump_scenario(scenario: Scenario, directory: str | Path) -> Path:
    """Write ``scenario`` as a config plus CSVs that ``load_scenario`` reads back."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    grid = scenario.grid
    bes = scenario.bes

    lines = [
        f"# scenario '{scenario.name}'",
        f"scenario.name = {scenario.name}",
        f"grid.step_minutes = {grid.step}",
        f"edr.notification_time = {format_clock(scenario.edr.notification_time)}",
        f"edr.decision_window_hours = {scenario.edr.decision_window!r}",
        f"edr.event_start = {format_clock(grid.start_time)}",
        f"edr.event_end = {format_clock(grid.end_time)}",
    ]

    incentive = scenario.edr.incentive_price
    if _is_constant(incentive):
        lines.append(f"edr.incentive_price_mwh = {price_per_mwh(incentive[0])!r}")
    else:
        write_timeseries_csv(
            directory / "incentive_price.csv", grid, [price_per_mwh(p) for p in incentive]
        )
        lines.append("edr.incentive_price_csv = incentive_price.csv")
    min_reduction = scenario.edr.min_reduction
    if _is_constant(min_reduction):
        lines.append(f"edr.min_reduction_kw = {float(min_reduction[0])!r}")
    else:
        write_timeseries_csv(directory / "min_reduction.csv", grid, min_reduction)
        lines.append("edr.min_reduction_csv = min_reduction.csv")

    write_timeseries_csv(directory / "forecast.csv", grid, scenario.forecast.forecast)
    write_timeseries_csv(
        directory / "grid_price.csv", grid, [price_per_mwh(p) for p in scenario.prices.grid_price]
    )
    lines += [
        "forecast.csv = forecast.csv",
        "prices.csv = grid_price.csv",
        f"prices.currency = {scenario.prices.currency}",
        f"bes.rated_capacity_kwh = {bes.rated_capacity!r}",
        f"bes.max_discharge_kw = {bes.max_discharge_power!r}",
        f"bes.max_charge_kw = {bes.max_charge_power!r}",
        f"bes.discharge_eff = {bes.discharge_eff!r}",
        f"bes.charge_eff = {bes.charge_eff!r}",
        f"bes.soc_min = {bes.soc_min!r}",
        f"bes.soc_max = {bes.soc_max!r}",
        f"bes.initial_soc = {bes.initial_soc!r}",
    ]
    if bes.terminal_soc_min is not None:
        lines.append(f"bes.terminal_soc_min = {bes.terminal_soc_min!r}")
    lines.append(f"station.ev_price_multiplier = {scenario.station.ev_price_multiplier!r}")

    config_path = directory / CONFIG_NAME
    config_path.write_text("\n".join(lines) + "\n")
    logger.info(f"Wrote scenario '{scenario.name}' to {config_path}")
    return config_path
