from .decision import ComparisonRow, Decision, DecisionReason, OracleCheck, SweepEntry
from .grid import TimeGrid, format_clock, make_time_grid, parse_clock, price_per_kwh, price_per_mwh
from .lp import (
    LinearConstraint,
    LpOutcome,
    LpProblem,
    LpStatus,
    MilpOutcome,
    MilpProblem,
    Relation,
    Sense,
)
from .scenario import (
    BesSpec,
    EdrSignal,
    LoadForecast,
    PriceSeries,
    Scenario,
    StationConfig,
    ev_price,
)
from .scenario_file import ScenarioFile
from .schedule import BesUtilization, ProfitBreakdown, Schedule, Violation

__all__ = [
    # Time grid
    "TimeGrid",
    "format_clock",
    "make_time_grid",
    "parse_clock",
    "price_per_kwh",
    "price_per_mwh",
    # Scenario
    "BesSpec",
    "EdrSignal",
    "LoadForecast",
    "PriceSeries",
    "Scenario",
    "ScenarioFile",
    "StationConfig",
    "ev_price",
    # Linear programs
    "LinearConstraint",
    "LpOutcome",
    "LpProblem",
    "LpStatus",
    "MilpOutcome",
    "MilpProblem",
    "Relation",
    "Sense",
    # Schedules
    "BesUtilization",
    "ProfitBreakdown",
    "Schedule",
    "Violation",
    # Decisions
    "ComparisonRow",
    "Decision",
    "DecisionReason",
    "OracleCheck",
    "SweepEntry",
]
