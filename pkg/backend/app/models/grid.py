import math

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

MINUTES_PER_DAY = 24 * 60
KWH_PER_MWH = 1000.0


def parse_clock(value: str | int) -> int:
    """Parse ``HH:MM`` (24-hour, ``24:00`` allowed) into minutes since midnight."""
    if isinstance(value, int):
        minutes = value
    else:
        text = str(value).strip()
        hours, sep, mins = text.partition(":")
        if not sep or not hours.isdigit() or not mins.isdigit() or len(mins) != 2:
            raise ValueError(f"Invalid clock time '{value}', expected HH:MM")
        if int(mins) >= 60:
            raise ValueError(f"Invalid clock time '{value}': minutes must be < 60")
        minutes = int(hours) * 60 + int(mins)
    if not 0 <= minutes <= MINUTES_PER_DAY:
        raise ValueError(f"Clock time {value} is outside 00:00-24:00")
    return minutes


def format_clock(minutes: int) -> str:
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


def price_per_kwh(price_mwh: float) -> float:
    """Convert a $/MWh quote into the internal $/kWh unit."""
    if price_mwh < 0 or math.isnan(price_mwh):
        raise ValueError(f"Price must be non-negative, got {price_mwh} $/MWh")
    return price_mwh / KWH_PER_MWH


def price_per_mwh(price_kwh: float) -> float:
    if price_kwh < 0 or math.isnan(price_kwh):
        raise ValueError(f"Price must be non-negative, got {price_kwh} $/kWh")
    return price_kwh * KWH_PER_MWH


class TimeGrid(BaseModel):
    """Discrete event window: ``steps`` intervals of ``step`` minutes from ``start_time``."""

    model_config = ConfigDict(frozen=True)

    start_time: int = Field(ge=0, lt=MINUTES_PER_DAY, description="Minutes since midnight")
    horizon: float = Field(gt=0, description="Event duration in hours")
    step: int = Field(gt=0, description="Step width in minutes")

    @model_validator(mode="after")
    def _check_divisible(self) -> "TimeGrid":
        count = self.horizon * 60 / self.step
        if abs(count - round(count)) > 1e-9:
            raise ValueError(
                f"step of {self.step} min does not divide horizon of {self.horizon} h"
            )
        if round(count) < 1:
            raise ValueError("time grid must contain at least one step")
        if self.start_time + round(count) * self.step > MINUTES_PER_DAY:
            raise ValueError("time grid crosses midnight; multi-day grids are not supported")
        return self

    @computed_field
    @property
    def steps(self) -> int:
        return round(self.horizon * 60 / self.step)

    @property
    def dt_hours(self) -> float:
        return self.step / 60

    @property
    def end_time(self) -> int:
        return self.start_time + self.steps * self.step

    def times(self) -> list[int]:
        return [self.start_time + k * self.step for k in range(self.steps)]

    def labels(self) -> list[str]:
        return [format_clock(t) for t in self.times()]


def make_time_grid(start: str | int, horizon: float, step: int) -> TimeGrid:
    return TimeGrid(start_time=parse_clock(start), horizon=horizon, step=step)
