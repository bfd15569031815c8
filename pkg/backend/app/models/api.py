from pydantic import BaseModel, Field

from .decision import Decision, DecisionReason
from .grid import make_time_grid, parse_clock, price_per_kwh
from .scenario import BesSpec, EdrSignal, LoadForecast, PriceSeries, Scenario, StationConfig
from .schedule import ProfitBreakdown, Violation


class ScenarioPayload(BaseModel):
    """Inline scenario for the HTTP API; prices in $/MWh like the CSV inputs."""

    name: str = "scenario"
    event_start: str = Field(description="HH:MM")
    horizon_hours: float = Field(gt=0)
    step_minutes: int = Field(default=15, gt=0)
    notification_time: str
    decision_window_hours: float = Field(ge=0)
    grid_price_mwh: list[float]
    forecast_kw: list[float]
    incentive_price_mwh: float | list[float]
    min_reduction_kw: float | list[float]
    currency: str = "USD"
    bes: BesSpec
    ev_price_multiplier: float

    def to_scenario(self) -> Scenario:
        grid = make_time_grid(self.event_start, self.horizon_hours, self.step_minutes)
        incentive = (
            [self.incentive_price_mwh] * grid.steps
            if isinstance(self.incentive_price_mwh, float)
            else self.incentive_price_mwh
        )
        min_reduction = (
            [self.min_reduction_kw] * grid.steps
            if isinstance(self.min_reduction_kw, float)
            else self.min_reduction_kw
        )
        return Scenario(
            name=self.name,
            grid=grid,
            prices=PriceSeries(
                grid_price=tuple(price_per_kwh(p) for p in self.grid_price_mwh),
                currency=self.currency,
            ),
            forecast=LoadForecast(forecast=tuple(self.forecast_kw)),
            edr=EdrSignal(
                incentive_price=tuple(price_per_kwh(p) for p in incentive),
                min_reduction=tuple(min_reduction),
                notification_time=parse_clock(self.notification_time),
                decision_window=self.decision_window_hours,
            ),
            bes=self.bes,
            station=StationConfig(ev_price_multiplier=self.ev_price_multiplier),
        )


class ScheduleRow(BaseModel):
    time: str
    grid_load_kw: float
    ev_served_kw: float
    bes_discharge_kw: float
    bes_charge_kw: float
    mode_dis: int
    mode_ch: int
    soc: float
    reduction_kw: float


class DecisionResponse(BaseModel):
    name: str
    participate: bool
    reason: DecisionReason
    c_edr: float | None
    c_non_edr: float
    breakdown_with_edr: ProfitBreakdown | None
    breakdown_without_edr: ProfitBreakdown
    schedule: list[ScheduleRow] = []

    @classmethod
    def from_decision(cls, name: str, decision: Decision, labels: list[str]) -> "DecisionResponse":
        rows = []
        s = decision.schedule
        if s is not None:
            rows = [
                ScheduleRow(
                    time=labels[t],
                    grid_load_kw=s.grid_load[t],
                    ev_served_kw=s.ev_served[t],
                    bes_discharge_kw=s.bes_discharge[t],
                    bes_charge_kw=s.bes_charge[t],
                    mode_dis=int(s.mode_discharge[t]),
                    mode_ch=int(s.mode_charge[t]),
                    soc=s.soc[t],
                    reduction_kw=s.reduction[t],
                )
                for t in range(s.steps)
            ]
        return cls(
            name=name,
            participate=decision.participate,
            reason=decision.reason,
            c_edr=decision.c_edr,
            c_non_edr=decision.c_non_edr,
            breakdown_with_edr=decision.breakdown_with_edr,
            breakdown_without_edr=decision.breakdown_without_edr,
            schedule=rows,
        )


class SweepRequest(BaseModel):
    scenario: ScenarioPayload
    capacities: list[float] = Field(min_length=1)


class SweepRow(BaseModel):
    capacity_kwh: float
    percent_of_reference: float | None
    c_edr: float | None
    participate: bool


class SweepResponse(BaseModel):
    rows: list[SweepRow]
    saturation_capacity: float | None


class ValidateRequest(BaseModel):
    scenario: ScenarioPayload
    schedule: list[ScheduleRow]


class ValidateResponse(BaseModel):
    feasible: bool
    violations: list[Violation]
