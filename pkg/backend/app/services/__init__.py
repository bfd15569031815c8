from .decision_engine import (
    DecisionEngine,
    capacity_sweep,
    compare_scenarios,
    decide,
    find_saturation_capacity,
    profit_without_edr,
)
from .dp_oracle import DpConfig, OracleResult, dp_profit, oracle_check, zero_bes_profit
from .formulation import (
    bes_utilization,
    build_edr_milp,
    extract_schedule,
    profit_breakdown,
    validate_schedule,
)
from .scenario_loader import dump_scenario, load_scenario
from .timeseries import load_timeseries_csv

__all__ = [
    # Formulation
    "bes_utilization",
    "build_edr_milp",
    "extract_schedule",
    "profit_breakdown",
    "validate_schedule",
    # Decision
    "DecisionEngine",
    "capacity_sweep",
    "compare_scenarios",
    "decide",
    "find_saturation_capacity",
    "profit_without_edr",
    # Oracle
    "DpConfig",
    "OracleResult",
    "dp_profit",
    "oracle_check",
    "zero_bes_profit",
    # Files
    "dump_scenario",
    "load_scenario",
    "load_timeseries_csv",
]
