# backend/test/conftest.py

from pathlib import Path

import numpy as np
import pytest
from app.models.grid import make_time_grid
from app.models.scenario import (
    BesSpec,
    EdrSignal,
    LoadForecast,
    PriceSeries,
    Scenario,
    StationConfig,
)
from dotenv import load_dotenv

load_dotenv()

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

TABLE1_BES = {
    "rated_capacity": 400.0,
    "max_discharge_power": 55.0,
    "max_charge_power": 50.0,
    "discharge_eff": 1.15,
    "charge_eff": 0.85,
    "soc_min": 0.2,
    "soc_max": 0.85,
    "initial_soc": 0.85,
}

IDLE_BES = {**TABLE1_BES, "rated_capacity": 0.0}


def build_scenario(
    forecast,
    grid_price,
    incentive_price,
    min_reduction,
    bes=None,
    start="12:00",
    step=15,
    notification=None,
    ev_price_multiplier=3.0,
    name="fixture",
) -> Scenario:
    """Assemble a Scenario from per-step lists ($/kWh) or scalars broadcast over the window."""
    forecast = [float(v) for v in forecast]
    steps = len(forecast)

    def series(value):
        if np.isscalar(value):
            return tuple(float(value) for _ in range(steps))
        return tuple(float(v) for v in value)

    grid = make_time_grid(start, steps * step / 60, step)
    notification_time = grid.start_time - 60 if notification is None else notification
    return Scenario(
        name=name,
        grid=grid,
        prices=PriceSeries(grid_price=series(grid_price)),
        forecast=LoadForecast(forecast=tuple(forecast)),
        edr=EdrSignal(
            incentive_price=series(incentive_price),
            min_reduction=series(min_reduction),
            notification_time=notification_time,
            decision_window=(grid.start_time - notification_time) / 60,
        ),
        bes=BesSpec(**(bes or TABLE1_BES)),
        station=StationConfig(ev_price_multiplier=ev_price_multiplier),
    )


@pytest.fixture
def scenario_factory():
    return build_scenario


@pytest.fixture
def case1_scenario() -> Scenario:
    """Morning event: rising forecast, low incentive, (K_EV - 1) * grid price above it."""
    forecast = [160 + 12 * k for k in range(20)]
    grid_price = [0.08] * 4 + [0.12] * 12 + [0.15] * 4
    return build_scenario(forecast, grid_price, 0.075, 150.0, start="07:00", name="case1")


@pytest.fixture
def case2_scenario() -> Scenario:
    """Evening event: falling forecast, incentive at or above the lost EV margin."""
    forecast = [400 - 10 * k for k in range(20)]
    grid_price = [0.10] * 8 + [0.09] * 12
    return build_scenario(forecast, grid_price, 0.2, 150.0, start="16:00", name="case2")


@pytest.fixture
def scenario_dir() -> Path:
    return SCENARIO_DIR


def random_small_scenario(rng: np.random.Generator, bes: dict | None = None) -> Scenario:
    """3-6 step scenario with a scaled-down battery, for oracle and property suites."""
    steps = int(rng.integers(3, 7))
    forecast = rng.uniform(200.0, 400.0, steps)
    min_reduction = forecast * rng.uniform(0.0, 0.4, steps)
    grid_price = rng.uniform(0.08, 0.15, steps)
    incentive = rng.uniform(0.05, 0.35)
    scaled = {
        "rated_capacity": 20.0,
        "max_discharge_power": 5.5,
        "max_charge_power": 5.0,
        "discharge_eff": 1.15,
        "charge_eff": 0.85,
        "soc_min": 0.2,
        "soc_max": 0.85,
        "initial_soc": float(np.round(rng.uniform(0.3, 0.85), 3)),
    }
    return build_scenario(
        forecast, grid_price, incentive, min_reduction, bes=bes or scaled, name="random"
    )


@pytest.fixture
def random_scenario():
    return random_small_scenario
