# backend/app/services/decision_engine.py

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..config.settings import EngineSettings, settings as default_settings
from ..models.decision import ComparisonRow, Decision, DecisionReason, SweepEntry
from ..models.lp import LpStatus
from ..models.scenario import Scenario
from ..models.schedule import ProfitBreakdown
from ..solver import solve_milp
from .formulation import bes_utilization, build_edr_milp, extract_schedule, profit_breakdown

logger = logging.getLogger(__name__)

SATURATION_TOL = 0.01


def profit_without_edr(scenario: Scenario) -> ProfitBreakdown:
    """Baseline event profit: the full forecast is bought from the grid and resold, battery idle."""
    dt = scenario.grid.dt_hours
    energy_cost = float(
        np.asarray(scenario.prices.grid_price) @ np.asarray(scenario.forecast.forecast)
    ) * dt
    return ProfitBreakdown(
        ev_income=scenario.station.ev_price_multiplier * energy_cost,
        edr_income=0.0,
        grid_cost=energy_cost,
    )


class DecisionEngine:
    def __init__(self, config: EngineSettings | None = None):
        self.config = config or default_settings

    def decide(self, scenario: Scenario) -> Decision:
        logger.info(f"Deciding EDR participation for '{scenario.name}' ({scenario.grid.steps} steps)")
        baseline = profit_without_edr(scenario)
        outcome = solve_milp(build_edr_milp(scenario), config=self.config)

        if outcome.status == LpStatus.INFEASIBLE:
            logger.info(f"'{scenario.name}': EDR requirement infeasible, nonparticipation")
            return Decision(
                participate=False,
                reason=DecisionReason.INFEASIBLE,
                c_non_edr=baseline.total,
                breakdown_without_edr=baseline,
                nodes_explored=outcome.nodes_explored,
            )

        schedule = extract_schedule(outcome, scenario)
        with_edr = profit_breakdown(schedule, scenario)
        c_edr = with_edr.total
        # ties go to nonparticipation
        participate = c_edr > baseline.total + self.config.decision_eps
        reason = DecisionReason.PROFIT_HIGHER if participate else DecisionReason.PROFIT_NOT_HIGHER
        logger.info(
            f"'{scenario.name}': C_EDR={c_edr:.4f}, C_non-EDR={baseline.total:.4f} -> "
            f"{'participate' if participate else 'nonparticipate'}"
        )
        return Decision(
            participate=participate,
            reason=reason,
            c_edr=c_edr,
            c_non_edr=baseline.total,
            breakdown_with_edr=with_edr,
            breakdown_without_edr=baseline,
            schedule=schedule,
            utilization=bes_utilization(schedule, scenario),
            nodes_explored=outcome.nodes_explored,
        )

    def capacity_sweep(self, scenario: Scenario, capacities: list[float]) -> list[SweepEntry]:
        if not capacities:
            raise ValueError("capacity sweep needs at least one capacity")
        for c in capacities:
            if c < 0:
                raise ValueError(f"capacity must be >= 0 kWh, got {c}")
        variants = [scenario.with_capacity(c) for c in capacities]
        workers = min(self.config.sweep_workers, len(variants))
        logger.info(f"Capacity sweep over {len(capacities)} capacities with {workers} worker(s)")
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                decisions = list(pool.map(self.decide, variants))
        else:
            decisions = [self.decide(v) for v in variants]
        return [
            SweepEntry(capacity_kwh=c, c_edr=d.c_edr, participate=d.participate)
            for c, d in zip(capacities, decisions, strict=True)
        ]

    def compare(self, scenarios: list[Scenario]) -> list[ComparisonRow]:
        rows = []
        for scenario in scenarios:
            decision = self.decide(scenario)
            rows.append(ComparisonRow(
                name=scenario.name,
                c_non_edr=decision.c_non_edr,
                c_edr=decision.c_edr,
                participate=decision.participate,
                reason=decision.reason,
            ))
        return rows


def find_saturation_capacity(
    entries: list[SweepEntry], tol: float = SATURATION_TOL
) -> float | None:
    """Smallest capacity beyond which every larger capacity's profit stays within ``tol``."""
    points = sorted((e.capacity_kwh, e.c_edr) for e in entries if e.c_edr is not None)
    for k in range(len(points) - 1):
        capacity, profit = points[k]
        later = points[k + 1:]
        if all(abs(p - profit) <= tol for _, p in later) and later[-1][0] > capacity:
            return capacity
    return None


def decide(scenario: Scenario, config: EngineSettings | None = None) -> Decision:
    return DecisionEngine(config).decide(scenario)


def capacity_sweep(
    scenario: Scenario, capacities: list[float], config: EngineSettings | None = None
) -> list[SweepEntry]:
    return DecisionEngine(config).capacity_sweep(scenario, capacities)


def compare_scenarios(
    scenarios: list[Scenario], config: EngineSettings | None = None
) -> list[ComparisonRow]:
    return DecisionEngine(config).compare(scenarios)
