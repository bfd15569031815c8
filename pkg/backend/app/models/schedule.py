from pydantic import BaseModel, ConfigDict, Field, computed_field

Series = tuple[float, ...]


class Schedule(BaseModel):
    """Per-step station operating point over the event window (kW, SOC fraction)."""

    model_config = ConfigDict(frozen=True)

    grid_load: Series
    ev_served: Series
    bes_net: Series
    bes_discharge: Series
    bes_charge: Series
    mode_discharge: Series
    mode_charge: Series
    soc: Series
    reduction: Series

    @property
    def steps(self) -> int:
        return len(self.grid_load)


class ProfitBreakdown(BaseModel):
    """The three terms of the operating-profit objective, in $."""

    model_config = ConfigDict(frozen=True)

    ev_income: float = Field(ge=0)
    edr_income: float = Field(ge=0)
    grid_cost: float = Field(ge=0)

    @computed_field
    @property
    def total(self) -> float:
        return self.ev_income + self.edr_income - self.grid_cost


class Violation(BaseModel):
    equation: str = Field(description="Constraint label, e.g. 'Eq. (12)' or 'demand bound'")
    step: int
    residual: float
    message: str

    def __str__(self) -> str:
        return f"{self.equation} at step {self.step}: {self.message} (residual {self.residual:.3e})"


class BesUtilization(BaseModel):
    """How the battery's delivered energy was used during the event (kWh)."""

    baseline_compensation_kwh: float = Field(
        description="Energy that let served EV load exceed the EDR baseline"
    )
    surplus_supply_kwh: float = Field(description="Delivered energy below the EDR baseline")
    charged_kwh: float
    soc_change: float
