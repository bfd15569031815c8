import math

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .grid import TimeGrid, format_clock

Series = tuple[float, ...]


def _check_non_negative(values: Series, name: str) -> Series:
    for k, v in enumerate(values):
        if math.isnan(v) or v < 0:
            raise ValueError(f"{name}[{k}] must be >= 0, got {v}")
    return values


class PriceSeries(BaseModel):
    """Per-step grid TOU price in $/kWh."""

    model_config = ConfigDict(frozen=True)

    grid_price: Series
    currency: str = "USD"

    @field_validator("grid_price")
    @classmethod
    def _non_negative(cls, v: Series) -> Series:
        return _check_non_negative(v, "grid_price")


class LoadForecast(BaseModel):
    """Short-term forecast of station charging demand in kW."""

    model_config = ConfigDict(frozen=True)

    forecast: Series

    @field_validator("forecast")
    @classmethod
    def _non_negative(cls, v: Series) -> Series:
        return _check_non_negative(v, "forecast")


class EdrSignal(BaseModel):
    """What the ISO sends with an EDR notification."""

    model_config = ConfigDict(frozen=True)

    incentive_price: Series = Field(description="$/kWh paid per kWh of reduction")
    min_reduction: Series = Field(description="kW below forecast the grid draw must drop")
    notification_time: int = Field(ge=0, description="Minutes since midnight")
    decision_window: float = Field(ge=0, description="Hours between notification and event start")

    @field_validator("incentive_price")
    @classmethod
    def _incentive_non_negative(cls, v: Series) -> Series:
        return _check_non_negative(v, "incentive_price")

    @field_validator("min_reduction")
    @classmethod
    def _reduction_non_negative(cls, v: Series) -> Series:
        return _check_non_negative(v, "min_reduction")

    @property
    def event_start(self) -> float:
        return self.notification_time + self.decision_window * 60


class BesSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    rated_capacity: float = Field(ge=0, description="kWh")
    max_discharge_power: float = Field(ge=0, description="kW")
    max_charge_power: float = Field(ge=0, description="kW")
    discharge_eff: float = Field(description="SOC drained per kWh delivered, >= 1")
    charge_eff: float = Field(description="SOC stored per kWh purchased, in (0, 1]")
    soc_min: float
    soc_max: float
    initial_soc: float
    terminal_soc_min: float | None = Field(
        default=None, description="Optional end-of-event SOC floor (off by default)"
    )

    @model_validator(mode="after")
    def _check_invariants(self) -> "BesSpec":
        if not 0 <= self.soc_min <= self.initial_soc <= self.soc_max <= 1:
            raise ValueError(
                "require 0 <= soc_min <= initial_soc <= soc_max <= 1, got "
                f"soc_min={self.soc_min}, initial_soc={self.initial_soc}, soc_max={self.soc_max}"
            )
        if not self.discharge_eff >= 1 >= self.charge_eff > 0:
            raise ValueError(
                "require discharge_eff >= 1 >= charge_eff > 0, got "
                f"discharge_eff={self.discharge_eff}, charge_eff={self.charge_eff}"
            )
        if self.terminal_soc_min is not None and not (
            self.soc_min <= self.terminal_soc_min <= self.soc_max
        ):
            raise ValueError(
                f"terminal_soc_min={self.terminal_soc_min} outside [soc_min, soc_max]"
            )
        return self

    @property
    def is_idle(self) -> bool:
        """True when the battery cannot move energy at all."""
        return self.rated_capacity == 0 or (
            self.max_discharge_power == 0 and self.max_charge_power == 0
        )


class StationConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    ev_price_multiplier: float = Field(gt=1, description="K_EV: EV retail price over grid price")


class Scenario(BaseModel):
    """All inputs of one participation decision, aligned to a single time grid."""

    model_config = ConfigDict(frozen=True)

    name: str = "scenario"
    grid: TimeGrid
    prices: PriceSeries
    forecast: LoadForecast
    edr: EdrSignal
    bes: BesSpec
    station: StationConfig

    @model_validator(mode="after")
    def _check_alignment(self) -> "Scenario":
        steps = self.grid.steps
        lengths = {
            "prices.grid_price": len(self.prices.grid_price),
            "forecast.forecast": len(self.forecast.forecast),
            "edr.incentive_price": len(self.edr.incentive_price),
            "edr.min_reduction": len(self.edr.min_reduction),
        }
        for field, length in lengths.items():
            if length != steps:
                raise ValueError(f"{field} has {length} values but the time grid has {steps} steps")
        if abs(self.edr.event_start - self.grid.start_time) > 1e-6:
            raise ValueError(
                f"notification {format_clock(self.edr.notification_time)} + "
                f"{self.edr.decision_window} h decision window does not reach event start "
                f"{format_clock(self.grid.start_time)}"
            )
        return self

    def with_capacity(self, rated_capacity: float) -> "Scenario":
        bes = BesSpec.model_validate({**self.bes.model_dump(), "rated_capacity": rated_capacity})
        return self.model_copy(update={"bes": bes})

    def scale_prices(self, factor: float) -> "Scenario":
        """Scale grid and incentive prices (and hence EV prices) by ``factor``."""
        if factor <= 0:
            raise ValueError(f"price scale factor must be positive, got {factor}")
        prices = PriceSeries(
            grid_price=tuple(p * factor for p in self.prices.grid_price),
            currency=self.prices.currency,
        )
        edr = self.edr.model_copy(
            update={"incentive_price": tuple(p * factor for p in self.edr.incentive_price)}
        )
        return self.model_copy(update={"prices": prices, "edr": edr})


def ev_price(prices: PriceSeries, station: StationConfig) -> PriceSeries:
    """EV retail price per step: ``K_EV * grid price``."""
    return PriceSeries(
        grid_price=tuple(station.ev_price_multiplier * p for p in prices.grid_price),
        currency=prices.currency,
    )
