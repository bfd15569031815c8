from pydantic import BaseModel, ConfigDict, Field, model_validator

from .grid import format_clock, parse_clock


class ScenarioFile(BaseModel):
    """Flat ``key = value`` scenario config, validated before any series is read.

    Prices are quoted in $/MWh and converted to $/kWh when the Scenario is built.
    """

    model_config = ConfigDict(populate_by_name=True, extra="forbid", frozen=True)

    name: str | None = Field(None, alias="scenario.name")
    step_minutes: int = Field(15, alias="grid.step_minutes", gt=0)

    notification_time: str = Field(alias="edr.notification_time")
    decision_window_hours: float = Field(alias="edr.decision_window_hours", ge=0)
    event_start: str = Field(alias="edr.event_start")
    event_end: str = Field(alias="edr.event_end")
    incentive_price_mwh: float | None = Field(None, alias="edr.incentive_price_mwh", ge=0)
    incentive_price_csv: str | None = Field(None, alias="edr.incentive_price_csv")
    min_reduction_kw: float | None = Field(None, alias="edr.min_reduction_kw", ge=0)
    min_reduction_csv: str | None = Field(None, alias="edr.min_reduction_csv")

    forecast_csv: str = Field(alias="forecast.csv")
    grid_price_csv: str = Field(alias="prices.csv")
    currency: str = Field("USD", alias="prices.currency")

    rated_capacity_kwh: float = Field(alias="bes.rated_capacity_kwh")
    max_discharge_kw: float = Field(alias="bes.max_discharge_kw")
    max_charge_kw: float = Field(alias="bes.max_charge_kw")
    discharge_eff: float = Field(alias="bes.discharge_eff")
    charge_eff: float = Field(alias="bes.charge_eff")
    soc_min: float = Field(alias="bes.soc_min")
    soc_max: float = Field(alias="bes.soc_max")
    initial_soc: float = Field(alias="bes.initial_soc")
    terminal_soc_min: float | None = Field(None, alias="bes.terminal_soc_min")

    ev_price_multiplier: float = Field(alias="station.ev_price_multiplier")

    @model_validator(mode="after")
    def _check_event_window(self) -> "ScenarioFile":
        if (self.incentive_price_mwh is None) == (self.incentive_price_csv is None):
            raise ValueError(
                "set exactly one of edr.incentive_price_mwh and edr.incentive_price_csv"
            )
        if (self.min_reduction_kw is None) == (self.min_reduction_csv is None):
            raise ValueError("set exactly one of edr.min_reduction_kw and edr.min_reduction_csv")
        notification = parse_clock(self.notification_time)
        start = parse_clock(self.event_start)
        end = parse_clock(self.event_end)
        expected = notification + self.decision_window_hours * 60
        if abs(expected - start) > 1e-6:
            raise ValueError(
                f"edr.event_start {self.event_start} must equal edr.notification_time "
                f"{self.notification_time} + edr.decision_window_hours "
                f"{self.decision_window_hours} h ({format_clock(round(expected))})"
            )
        if end <= start:
            raise ValueError(f"edr.event_end {self.event_end} must be after edr.event_start")
        return self

    @property
    def horizon_hours(self) -> float:
        return (parse_clock(self.event_end) - parse_clock(self.event_start)) / 60
