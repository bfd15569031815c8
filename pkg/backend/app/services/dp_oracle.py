# backend/app/services/dp_oracle.py
"""Brute-force reference values for the EDR scheduling model.

``dp_profit`` runs backward induction over a lattice of SOC cells with a
discretised charge-XOR-discharge action set; ``zero_bes_profit`` is the closed
form of the model when the battery cannot move energy. Both exist to check the
MILP solver, not to replace it.

Each action level moves SOC toward its target only as far as the last lattice
cell it reaches, and the step is scored at the power that move actually takes.
Every scored policy is therefore feasible for the continuous model.
"""

import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..exceptions import OracleResolutionError
from ..models.decision import OracleCheck
from ..models.scenario import BesSpec, Scenario, ev_price
from .formulation import effective_power_limits, soc_coefficients

logger = logging.getLogger(__name__)

LATTICE_DECIMALS = 12
SNAP_TOL = 1e-12


class DpConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    soc_grid_resolution: float = Field(default=0.005, gt=0, description="SOC fraction per cell")
    power_grid_resolution: float = Field(default=0.25, gt=0, description="kW per action cell")


class OracleResult(BaseModel):
    feasible: bool
    profit: float | None = None

    @classmethod
    def infeasible(cls) -> "OracleResult":
        return cls(feasible=False)


def _stage_profit(
    forecast: float, min_red: float, rho_ev: float, rho_grid: float, rho_edr: float,
    bes_net: np.ndarray, dt: float,
) -> np.ndarray:
    """Best profit of one step per battery output; -inf where the step is infeasible.

    The stage profit is linear in grid_load, so the optimum sits on an end of
    the admissible interval.
    """
    lo = np.maximum(0.0, -bes_net)
    hi = np.minimum(forecast - min_red, forecast - bes_net)
    feasible = lo <= hi + 1e-12
    slope = rho_ev - rho_grid - rho_edr
    grid_load = np.maximum(hi, lo) if slope > 0 else lo
    profit = (slope * grid_load + rho_ev * bes_net + rho_edr * forecast) * dt
    return np.where(feasible, profit, -math.inf)


def _stage_inputs(scenario: Scenario):
    return (
        scenario.forecast.forecast,
        scenario.edr.min_reduction,
        ev_price(scenario.prices, scenario.station).grid_price,
        scenario.prices.grid_price,
        scenario.edr.incentive_price,
    )


def zero_bes_profit(scenario: Scenario) -> OracleResult:
    """Closed-form optimum with the battery removed: the steps decouple."""
    dt = scenario.grid.dt_hours
    forecast, min_red, rho_ev, rho_grid, rho_edr = _stage_inputs(scenario)
    idle = np.zeros(1)
    total = 0.0
    # accumulate backwards, in the same order as dp_profit's value recursion
    for t in reversed(range(scenario.grid.steps)):
        stage = float(_stage_profit(forecast[t], min_red[t], rho_ev[t], rho_grid[t], rho_edr[t],
                                    idle, dt)[0])
        if math.isinf(stage):
            return OracleResult.infeasible()
        total = stage + total
    return OracleResult(feasible=True, profit=total)


def _action_levels(limit: float, resolution: float) -> np.ndarray:
    if limit <= 0:
        return np.zeros(0)
    count = int(math.floor(limit / resolution + 1e-9))
    levels = np.arange(1, count + 1) * resolution
    if levels.size == 0 or limit - levels[-1] > 1e-9:
        levels = np.append(levels, limit)
    return levels


def soc_lattice(bes: BesSpec, resolution: float) -> np.ndarray:
    """SOC states in whole cells either side of the initial SOC, plus the SOC bounds.

    Halving ``resolution`` yields a superset of the states.
    """
    down = int(math.floor((bes.initial_soc - bes.soc_min) / resolution + 1e-9))
    up = int(math.floor((bes.soc_max - bes.initial_soc) / resolution + 1e-9))
    states = bes.initial_soc + np.arange(-down, up + 1) * resolution
    anchors = [bes.soc_min, bes.soc_max]
    if bes.terminal_soc_min is not None:
        anchors.append(bes.terminal_soc_min)
    states = np.clip(np.append(states, anchors), bes.soc_min, bes.soc_max)
    return np.unique(np.round(states, LATTICE_DECIMALS))


def _transitions(lattice: np.ndarray, levels: np.ndarray, per_kw: float, discharge: bool):
    """(next-state index, bes_net kW) per state for each action level."""
    out = []
    if per_kw <= 0:
        return out
    for level in levels:
        if discharge:
            idx = np.searchsorted(lattice, lattice - per_kw * level - SNAP_TOL, side="left")
            net = (lattice - lattice[idx]) / per_kw
        else:
            idx = np.searchsorted(lattice, lattice + per_kw * level + SNAP_TOL, side="right") - 1
            net = -(lattice[idx] - lattice) / per_kw
        out.append((idx, net))
    return out


def dp_profit(scenario: Scenario, config: DpConfig | None = None) -> OracleResult:
    config = config or DpConfig()
    bes = scenario.bes
    dt = scenario.grid.dt_hours
    n = scenario.grid.steps
    forecast, min_red, rho_ev, rho_grid, rho_edr = _stage_inputs(scenario)

    dis_max, ch_max = effective_power_limits(bes)
    a_dis, a_ch = soc_coefficients(bes, dt)
    lattice = soc_lattice(bes, config.soc_grid_resolution)
    states = np.arange(lattice.size)

    transitions = [(states, np.zeros(lattice.size))]
    transitions += _transitions(lattice, _action_levels(dis_max, config.power_grid_resolution),
                                a_dis, discharge=True)
    transitions += _transitions(lattice, _action_levels(ch_max, config.power_grid_resolution),
                                a_ch, discharge=False)

    value = np.zeros(lattice.size)
    if bes.terminal_soc_min is not None:
        value[lattice < bes.terminal_soc_min - SNAP_TOL] = -math.inf

    for t in reversed(range(n)):
        best = np.full(lattice.size, -math.inf)
        for idx, net in transitions:
            stage = _stage_profit(forecast[t], min_red[t], rho_ev[t], rho_grid[t], rho_edr[t], net, dt)
            best = np.maximum(best, stage + value[idx])
        value = best

    start = int(np.argmin(np.abs(lattice - bes.initial_soc)))
    result = float(value[start])
    if math.isinf(result):
        idle_feasible = all(f >= r for f, r in zip(forecast, min_red, strict=True))
        if idle_feasible and bes.terminal_soc_min is not None:
            raise OracleResolutionError(
                f"no lattice policy reaches terminal SOC {bes.terminal_soc_min} at "
                f"resolution {config.soc_grid_resolution}/{config.power_grid_resolution}"
            )
        return OracleResult.infeasible()
    logger.debug(f"DP oracle: {lattice.size} SOC cells, {len(transitions)} actions, profit={result:.6f}")
    return OracleResult(feasible=True, profit=result)


def oracle_check(scenario: Scenario, milp_profit: float | None, config: DpConfig | None = None) -> OracleCheck:
    """Compare an optimal MILP profit against the DP lattice value."""
    result = dp_profit(scenario, config)
    if not result.feasible or milp_profit is None:
        return OracleCheck(dp_profit=result.profit, milp_profit=milp_profit,
                           absolute_gap=None, relative_gap=None)
    gap = milp_profit - result.profit
    relative = abs(gap) / abs(milp_profit) if milp_profit else None
    logger.info(f"Oracle check for '{scenario.name}': MILP={milp_profit:.4f}, DP={result.profit:.4f}")
    return OracleCheck(dp_profit=result.profit, milp_profit=milp_profit,
                       absolute_gap=gap, relative_gap=relative)
