# backend/app/services/timeseries.py

import logging
from pathlib import Path

import pandas as pd

from ..exceptions import TimeSeriesFormatError
from ..models.grid import TimeGrid, format_clock, parse_clock

logger = logging.getLogger(__name__)

COLUMNS = ["time", "value"]


def load_timeseries_csv(path: str | Path, grid: TimeGrid) -> tuple[float, ...]:
    """Read a ``time,value`` CSV and return the values of the grid's steps, in order.

    Rows outside the event window are ignored. Every in-window row must sit on
    a step boundary; no resampling is attempted.
    """
    path = Path(path)
    if not path.exists():
        raise TimeSeriesFormatError(str(path), ["file does not exist"])

    df = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False).fillna("")
    df.columns = [str(c).strip() for c in df.columns]
    if list(df.columns) != COLUMNS:
        raise TimeSeriesFormatError(str(path), [f"header must be 'time,value', got {list(df.columns)}"])

    df["line"] = df.index + 2  # header is line 1
    df["time"] = df["time"].str.strip()
    df["value"] = df["value"].str.strip()
    df = df[(df["time"] != "") | (df["value"] != "")].copy()

    problems: list[str] = []
    minutes: list[int | None] = []
    for line, text in zip(df["line"], df["time"], strict=True):
        try:
            minutes.append(parse_clock(text))
        except ValueError as e:
            problems.append(f"line {line}: {e}")
            minutes.append(None)
    df["minutes"] = pd.array(minutes, dtype="Int64")
    df["number"] = pd.to_numeric(df["value"], errors="coerce")

    valid_time = df["minutes"].notna()
    for line, text in zip(df.loc[valid_time & df["number"].isna(), "line"],
                          df.loc[valid_time & df["number"].isna(), "value"], strict=True):
        problems.append(f"line {line}: non-numeric value '{text}'")

    timed = df[valid_time]
    duplicated = timed[timed["minutes"].duplicated(keep=False)]
    for minute, group in duplicated.groupby("minutes", sort=True):
        lines = ", ".join(str(v) for v in group["line"])
        problems.append(f"duplicate timestamp {format_clock(int(minute))} on lines {lines}")

    in_window = timed[(timed["minutes"] >= grid.start_time) & (timed["minutes"] < grid.end_time)]
    misaligned = in_window[(in_window["minutes"] - grid.start_time) % grid.step != 0]
    for line, minute in zip(misaligned["line"], misaligned["minutes"], strict=True):
        problems.append(
            f"line {line}: timestamp {format_clock(int(minute))} is not aligned to the "
            f"{grid.step}-minute step starting at {format_clock(grid.start_time)}"
        )

    present = dict(zip(in_window["minutes"].astype(int), in_window["number"], strict=True))
    for minute in grid.times():
        if minute not in present:
            problems.append(f"missing timestamp {format_clock(minute)} inside the event window")

    if problems:
        logger.warning(f"{path}: {len(problems)} problem(s) in time series")
        raise TimeSeriesFormatError(str(path), problems)

    values = tuple(float(present[minute]) for minute in grid.times())
    logger.debug(f"Loaded {len(values)} values from {path}")
    return values


def write_timeseries_csv(path: str | Path, grid: TimeGrid, values) -> Path:
    path = Path(path)
    frame = pd.DataFrame({"time": grid.labels(), "value": [float(v) for v in values]})
    frame.to_csv(path, index=False)
    return path
