try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        def __str__(self) -> str:
            return str(self.value)

        def __format__(self, format_spec: str) -> str:
            return str(self.value).__format__(format_spec)

from pydantic import BaseModel, Field

from .schedule import BesUtilization, ProfitBreakdown, Schedule


class DecisionReason(StrEnum):
    PROFIT_HIGHER = "profit_higher"
    PROFIT_NOT_HIGHER = "profit_not_higher"
    INFEASIBLE = "infeasible"


class Decision(BaseModel):
    participate: bool
    reason: DecisionReason
    c_edr: float | None = Field(None, description="Optimal event profit with EDR, $")
    c_non_edr: float = Field(description="Baseline event profit without EDR, $")
    breakdown_with_edr: ProfitBreakdown | None = None
    breakdown_without_edr: ProfitBreakdown
    schedule: Schedule | None = None
    utilization: BesUtilization | None = None
    nodes_explored: int = 0


class SweepEntry(BaseModel):
    capacity_kwh: float
    c_edr: float | None
    participate: bool


class ComparisonRow(BaseModel):
    name: str
    c_non_edr: float
    c_edr: float | None
    participate: bool
    reason: DecisionReason


class OracleCheck(BaseModel):
    dp_profit: float | None
    milp_profit: float | None
    absolute_gap: float | None
    relative_gap: float | None
