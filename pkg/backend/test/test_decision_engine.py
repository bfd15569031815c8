# backend/test/test_decision_engine.py

import logging
import time

import numpy as np
import pytest
from app.config.settings import EngineSettings
from app.models.decision import DecisionReason, SweepEntry
from app.models.scenario import BesSpec
from app.services.decision_engine import (
    DecisionEngine,
    capacity_sweep,
    compare_scenarios,
    decide,
    find_saturation_capacity,
    profit_without_edr,
)
from app.services.dp_oracle import zero_bes_profit
from app.services.formulation import validate_schedule
from logs.config import setup_logging

from .conftest import IDLE_BES, random_small_scenario

setup_logging()
logger = logging.getLogger(__name__)

TABLE6_CAPACITIES = [0, 80, 160, 240, 320, 400, 480, 560, 600, 800]


def test_baseline_income_over_cost_is_markup(case1_scenario, case2_scenario):
    for scenario in (case1_scenario, case2_scenario):
        baseline = profit_without_edr(scenario)
        assert baseline.ev_income / baseline.grid_cost == pytest.approx(3.0, rel=1e-3)
        assert baseline.edr_income == 0.0


def test_baseline_formula(scenario_factory):
    scenario = scenario_factory([200, 200, 200, 200], 0.1, 0.2, 150)
    # (K_EV - 1) * rho * P * dt summed over one hour
    assert profit_without_edr(scenario).total == pytest.approx(2 * 0.1 * 200 * 1.0)


def test_case1_nonparticipation(case1_scenario):
    decision = decide(case1_scenario)
    assert not decision.participate
    assert decision.reason == DecisionReason.PROFIT_NOT_HIGHER
    assert decision.breakdown_with_edr.edr_income == pytest.approx(56.25, abs=1e-3)
    assert decision.c_edr < decision.c_non_edr
    assert validate_schedule(decision.schedule, case1_scenario) == []


def test_case2_participation(case2_scenario):
    decision = decide(case2_scenario)
    assert decision.participate
    assert decision.reason == DecisionReason.PROFIT_HIGHER
    assert decision.c_edr > decision.c_non_edr
    assert decision.utilization.baseline_compensation_kwh > 0


def test_infeasible_requirement_means_nonparticipation(scenario_factory):
    scenario = scenario_factory([100, 300, 300], 0.1, 0.2, 150)
    decision = decide(scenario)
    assert not decision.participate
    assert decision.reason == DecisionReason.INFEASIBLE
    assert decision.c_edr is None
    assert decision.schedule is None
    assert decision.c_non_edr == pytest.approx(profit_without_edr(scenario).total)


def test_tie_goes_to_nonparticipation(scenario_factory):
    # zero reduction, idle battery, incentive equal to the lost margin: C_EDR == C_non-EDR
    scenario = scenario_factory([200] * 4, 0.1, 0.2, 0.0, bes=IDLE_BES)
    decision = decide(scenario)
    assert decision.c_edr == pytest.approx(decision.c_non_edr, abs=1e-9)
    assert not decision.participate


def test_dominant_incentive_participates(scenario_factory):
    scenario = scenario_factory([300, 250, 200], [0.1, 0.08, 0.06], 0.3, 150, bes=IDLE_BES)
    assert decide(scenario).participate


def test_decision_is_deterministic(case2_scenario):
    assert decide(case2_scenario) == decide(case2_scenario)


def test_full_event_decides_quickly(case2_scenario):
    started = time.perf_counter()
    decision = decide(case2_scenario)
    elapsed = time.perf_counter() - started
    logger.info(f"20-step decide took {elapsed:.3f}s over {decision.nodes_explored} nodes")
    assert elapsed < 1.0


def test_table6_sweep_pattern(case2_scenario):
    entries = capacity_sweep(case2_scenario, TABLE6_CAPACITIES)
    profits = [e.c_edr for e in entries]
    assert all(b >= a - 1e-6 for a, b in zip(profits, profits[1:], strict=False))
    assert find_saturation_capacity(entries) == 560
    assert profits[-1] - profits[TABLE6_CAPACITIES.index(560)] <= 0.01
    assert profits[TABLE6_CAPACITIES.index(480)] < profits[TABLE6_CAPACITIES.index(560)] - 0.01


def test_sweep_zero_capacity_matches_closed_form(case2_scenario):
    (entry,) = capacity_sweep(case2_scenario, [0])
    assert entry.c_edr == pytest.approx(zero_bes_profit(case2_scenario.with_capacity(0)).profit,
                                        abs=1e-6)


def test_sweep_keeps_input_order(case2_scenario):
    entries = capacity_sweep(case2_scenario, [400, 0, 160])
    assert [e.capacity_kwh for e in entries] == [400, 0, 160]


def test_parallel_sweep_matches_serial(case2_scenario):
    capacities = [320, 80, 560]
    serial = DecisionEngine(EngineSettings(sweep_workers=1)).capacity_sweep(
        case2_scenario, capacities
    )
    parallel = DecisionEngine(EngineSettings(sweep_workers=3)).capacity_sweep(
        case2_scenario, capacities
    )
    assert serial == parallel


def test_sweep_rejects_bad_capacities(case2_scenario):
    with pytest.raises(ValueError):
        capacity_sweep(case2_scenario, [])
    with pytest.raises(ValueError):
        capacity_sweep(case2_scenario, [100, -1])


def test_saturation_needs_a_larger_capacity():
    entries = [SweepEntry(capacity_kwh=c, c_edr=p, participate=True)
               for c, p in [(0, 1.0), (100, 2.0), (200, 3.0)]]
    assert find_saturation_capacity(entries) is None
    entries.append(SweepEntry(capacity_kwh=300, c_edr=3.005, participate=True))
    assert find_saturation_capacity(entries) == 200


def test_compare_keeps_input_order(case1_scenario, case2_scenario):
    rows = compare_scenarios([case2_scenario, case1_scenario])
    assert [r.name for r in rows] == ["case2", "case1"]
    assert [r.participate for r in rows] == [True, False]


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(200))
def test_zero_bes_matches_closed_form(seed):
    rng = np.random.default_rng(1000 + seed)
    scenario = random_small_scenario(rng, bes=IDLE_BES)
    decision = decide(scenario)
    expected = zero_bes_profit(scenario)
    assert decision.c_edr is not None and expected.feasible
    assert decision.c_edr == pytest.approx(expected.profit, abs=1e-6)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(20))
def test_profit_monotone_in_incentive(seed):
    rng = np.random.default_rng(2000 + seed)
    scenario = random_small_scenario(rng)
    bump = rng.uniform(0.0, 0.1, scenario.grid.steps)
    richer = scenario.model_copy(update={"edr": scenario.edr.model_copy(update={
        "incentive_price": tuple(p + d for p, d in zip(scenario.edr.incentive_price, bump,
                                                       strict=True))
    })})
    assert decide(richer).c_edr >= decide(scenario).c_edr - 1e-6


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(20))
def test_profit_monotone_in_capacity(seed):
    rng = np.random.default_rng(3000 + seed)
    scenario = random_small_scenario(rng)
    low, high = sorted(rng.uniform(0.0, 60.0, 2))
    assert decide(scenario.with_capacity(high)).c_edr >= (
        decide(scenario.with_capacity(low)).c_edr - 1e-6
    )


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(20))
def test_profit_antitone_in_min_reduction(seed):
    rng = np.random.default_rng(4000 + seed)
    scenario = random_small_scenario(rng)
    forecast = np.asarray(scenario.forecast.forecast)
    current = np.asarray(scenario.edr.min_reduction)
    raised = np.minimum(current + rng.uniform(0.0, 40.0, current.size), forecast)
    stricter = scenario.model_copy(update={"edr": scenario.edr.model_copy(update={
        "min_reduction": tuple(float(v) for v in raised)
    })})
    assert decide(stricter).c_edr <= decide(scenario).c_edr + 1e-6


@pytest.mark.parametrize("factor", [0.5, 2.0, 10.0])
def test_price_scaling(case1_scenario, case2_scenario, factor):
    for scenario in (case1_scenario, case2_scenario):
        base = decide(scenario)
        scaled = decide(scenario.scale_prices(factor))
        assert scaled.c_edr == pytest.approx(factor * base.c_edr, rel=1e-6)
        assert scaled.c_non_edr == pytest.approx(factor * base.c_non_edr, rel=1e-6)
        assert scaled.participate == base.participate


def pinned_minimum_profit(scenario):
    """Profit of buying forecast - min_reduction from the grid with the battery idle."""
    dt = scenario.grid.dt_hours
    k_ev = scenario.station.ev_price_multiplier
    total = 0.0
    for f, r, rho, edr in zip(scenario.forecast.forecast, scenario.edr.min_reduction,
                              scenario.prices.grid_price, scenario.edr.incentive_price, strict=True):
        grid = max(f - r, 0.0)
        total += ((k_ev - 1) * rho * grid + edr * (f - grid)) * dt
    return total


@pytest.mark.parametrize("seed", range(15))
def test_profit_beats_pinned_minimum_point(seed):
    scenario = random_small_scenario(np.random.default_rng(700 + seed))
    decision = decide(scenario)
    assert decision.c_edr >= pinned_minimum_profit(scenario) - 1e-6


def test_pinned_minimum_profit_of_case1(case1_scenario):
    assert decide(case1_scenario).c_edr >= pinned_minimum_profit(case1_scenario) - 1e-6


@pytest.mark.parametrize("bes", [
    IDLE_BES,
    {"rated_capacity": 20.0, "max_discharge_power": 5.5, "max_charge_power": 5.0,
     "discharge_eff": 1.0, "charge_eff": 1.0, "soc_min": 0.0, "soc_max": 1.0, "initial_soc": 0.1},
    {"rated_capacity": 4000.0, "max_discharge_power": 900.0, "max_charge_power": 0.0,
     "discharge_eff": 1.3, "charge_eff": 0.5, "soc_min": 0.4, "soc_max": 0.9, "initial_soc": 0.9,
     "terminal_soc_min": 0.5},
])
def test_baseline_ignores_the_battery(case2_scenario, bes):
    other = case2_scenario.model_copy(update={"bes": BesSpec(**bes)})
    assert profit_without_edr(other) == profit_without_edr(case2_scenario)
    assert decide(other).c_non_edr == decide(case2_scenario).c_non_edr
