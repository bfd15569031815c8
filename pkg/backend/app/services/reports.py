# backend/app/services/reports.py
"""Deterministic report rendering for decisions, capacity sweeps and comparisons.

Report bodies carry no timestamps or host details; provenance goes to a
``metadata.json`` sidecar written next to them.
"""

import json
import logging
import platform
from datetime import datetime, timezone
from importlib import metadata as importlib_metadata
from pathlib import Path

import pandas as pd

from ..exceptions import TimeSeriesFormatError
from ..models.decision import ComparisonRow, Decision, OracleCheck, SweepEntry
from ..models.grid import format_clock, parse_clock
from ..models.scenario import Scenario
from ..models.schedule import ProfitBreakdown, Schedule

logger = logging.getLogger(__name__)

SCHEDULE_COLUMNS = [
    "time",
    "grid_load_kw",
    "ev_served_kw",
    "bes_discharge_kw",
    "bes_charge_kw",
    "mode_dis",
    "mode_ch",
    "soc",
    "reduction_kw",
]

SUMMARY_INDEX = [
    "Station profit",
    "Income from the EV charging loads",
    "Income from the EDR participation",
    "Cost for the electricity purchased from the grid",
    "Decision of EDR participation",
]


def money(value: float | None) -> str:
    if value is None:
        return "n/a"
    sign = "-" if value < 0 else ""
    return f"{sign}${abs(value):,.2f}"


def _decision_label(participate: bool) -> str:
    return "Participation" if participate else "Nonparticipation"


def _breakdown_cells(breakdown: ProfitBreakdown | None) -> list[float | None]:
    if breakdown is None:
        return [None, None, None, None]
    return [breakdown.total, breakdown.ev_income, breakdown.edr_income, breakdown.grid_cost]


def summary_frame(decision: Decision) -> pd.DataFrame:
    """Breakdown table: one row per index, without/with EDR columns (unrounded)."""
    without = _breakdown_cells(decision.breakdown_without_edr) + ["Nonparticipation"]
    with_edr = _breakdown_cells(decision.breakdown_with_edr) + [_decision_label(decision.participate)]
    return pd.DataFrame({"index": SUMMARY_INDEX, "without_edr": without, "with_edr": with_edr})


def schedule_frame(schedule: Schedule, scenario: Scenario) -> pd.DataFrame:
    return pd.DataFrame({
        "time": scenario.grid.labels(),
        "grid_load_kw": schedule.grid_load,
        "ev_served_kw": schedule.ev_served,
        "bes_discharge_kw": schedule.bes_discharge,
        "bes_charge_kw": schedule.bes_charge,
        "mode_dis": [int(v) for v in schedule.mode_discharge],
        "mode_ch": [int(v) for v in schedule.mode_charge],
        "soc": schedule.soc,
        "reduction_kw": schedule.reduction,
    })


def read_schedule_csv(path: str | Path, scenario: Scenario) -> Schedule:
    """Parse a schedule CSV written by ``write_decision_report`` back into a Schedule."""
    path = Path(path)
    if not path.is_file():
        raise TimeSeriesFormatError(str(path), ["file does not exist"])
    df = pd.read_csv(path, dtype={"time": str})
    missing = [c for c in SCHEDULE_COLUMNS if c not in df.columns]
    if missing:
        raise TimeSeriesFormatError(str(path), [f"missing column(s): {', '.join(missing)}"])
    try:
        times = [parse_clock(t) for t in df["time"]]
    except ValueError as e:
        raise TimeSeriesFormatError(str(path), [str(e)]) from e
    if times != scenario.grid.times():
        raise TimeSeriesFormatError(
            str(path), [f"time column does not match the event window {scenario.grid.labels()[0]}"
                        f"-{format_clock(scenario.grid.end_time)}"]
        )
    numeric = df[SCHEDULE_COLUMNS[1:]].apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna().any(axis=1)
    if bad.any():
        lines = ", ".join(str(i + 2) for i in numeric.index[bad])
        raise TimeSeriesFormatError(str(path), [f"non-numeric values on line(s) {lines}"])

    dis = numeric["bes_discharge_kw"].astype(float)
    ch = numeric["bes_charge_kw"].astype(float)
    return Schedule(
        grid_load=tuple(numeric["grid_load_kw"].astype(float)),
        ev_served=tuple(numeric["ev_served_kw"].astype(float)),
        bes_net=tuple(dis - ch),
        bes_discharge=tuple(dis),
        bes_charge=tuple(ch),
        mode_discharge=tuple(numeric["mode_dis"].astype(float)),
        mode_charge=tuple(numeric["mode_ch"].astype(float)),
        soc=tuple(numeric["soc"].astype(float)),
        reduction=tuple(numeric["reduction_kw"].astype(float)),
    )


def render_decision_report(
    decision: Decision, scenario: Scenario, oracle: OracleCheck | None = None
) -> str:
    grid = scenario.grid
    edr = scenario.edr
    title = f"EDR participation decision: {scenario.name}"
    lines = [
        title,
        "=" * len(title),
        f"Event window        {format_clock(grid.start_time)}-{format_clock(grid.end_time)} "
        f"({grid.steps} steps of {grid.step} min)",
        f"Notification        {format_clock(edr.notification_time)} "
        f"(decision window {edr.decision_window:g} h)",
        f"BES capacity        {scenario.bes.rated_capacity:g} kWh",
        f"Decision            {_decision_label(decision.participate)}",
        f"Reason              {decision.reason.value}",
        f"C_EDR               {money(decision.c_edr)}",
        f"C_non-EDR           {money(decision.c_non_edr)}",
        "",
        "Profit breakdown",
        "----------------",
    ]
    summary = summary_frame(decision)
    table = pd.DataFrame({
        "Index": summary["index"],
        "Without EDR": [v if isinstance(v, str) else money(v) for v in summary["without_edr"]],
        "With EDR": [v if isinstance(v, str) else money(v) for v in summary["with_edr"]],
    })
    lines.append(table.to_string(index=False, justify="left"))

    if decision.utilization is not None:
        u = decision.utilization
        lines += [
            "",
            "BES utilization",
            "---------------",
            f"Baseline compensation   {u.baseline_compensation_kwh:.2f} kWh",
            f"Surplus supply          {u.surplus_supply_kwh:.2f} kWh",
            f"Charged                 {u.charged_kwh:.2f} kWh",
            f"SOC change              {u.soc_change:+.4f}",
        ]

    if decision.schedule is not None:
        frame = schedule_frame(decision.schedule, scenario)
        lines += ["", "Schedule", "--------", frame.to_string(index=False, float_format=lambda v: f"{v:.3f}")]

    if oracle is not None:
        lines += ["", "Oracle check", "------------"]
        if oracle.dp_profit is None:
            lines.append("DP oracle           infeasible")
        else:
            lines += [
                f"DP oracle profit    {money(oracle.dp_profit)}",
                f"MILP profit         {money(oracle.milp_profit)}",
                f"Absolute gap        {money(oracle.absolute_gap)}",
            ]
            if oracle.relative_gap is not None:
                lines.append(f"Relative gap        {oracle.relative_gap:.4%}")
    return "\n".join(lines) + "\n"


def _package_version() -> str:
    try:
        return importlib_metadata.version("edr-station")
    except importlib_metadata.PackageNotFoundError:
        return "0.1"


def write_metadata(out_dir: Path, command: str, scenario_names: list[str]) -> Path:
    path = out_dir / "metadata.json"
    payload = {
        "command": command,
        "scenarios": scenario_names,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "version": _package_version(),
        "python": platform.python_version(),
        "platform": platform.platform(),
    }
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def write_decision_report(
    decision: Decision,
    scenario: Scenario,
    out_dir: str | Path,
    fmt: str = "both",
    oracle: OracleCheck | None = None,
) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if fmt in ("text", "both"):
        path = out_dir / "report.txt"
        path.write_text(render_decision_report(decision, scenario, oracle))
        written.append(path)
    if fmt in ("csv", "both"):
        path = out_dir / "summary.csv"
        summary_frame(decision).to_csv(path, index=False)
        written.append(path)
        if decision.schedule is not None:
            path = out_dir / "schedule.csv"
            schedule_frame(decision.schedule, scenario).to_csv(path, index=False)
            written.append(path)
    written.append(write_metadata(out_dir, "decide", [scenario.name]))
    logger.info(f"Wrote {len(written)} report file(s) to {out_dir}")
    return written


def sweep_frame(
    entries: list[SweepEntry], reference_capacity: float, saturation: float | None
) -> pd.DataFrame:
    """Rows in input order; percent is relative to the scenario's configured capacity."""
    percent = [
        100.0 * e.capacity_kwh / reference_capacity if reference_capacity > 0 else None
        for e in entries
    ]
    return pd.DataFrame({
        "capacity_kwh": [e.capacity_kwh for e in entries],
        "percent_of_reference": percent,
        "c_edr": [e.c_edr for e in entries],
        "participate": [e.participate for e in entries],
        "saturated": [saturation is not None and e.capacity_kwh == saturation for e in entries],
    })


def render_sweep_report(
    scenario: Scenario, entries: list[SweepEntry], saturation: float | None
) -> str:
    frame = sweep_frame(entries, scenario.bes.rated_capacity, saturation)
    table = pd.DataFrame({
        "BES capacity (kWh)": [f"{c:g}" for c in frame["capacity_kwh"]],
        "% of C_rated": ["n/a" if pd.isna(p) else f"{p:.0f}%" for p in frame["percent_of_reference"]],
        "Total profit": [money(None if pd.isna(v) else v) for v in frame["c_edr"]],
        "Note": ["BES capacity is saturated" if s else "" for s in frame["saturated"]],
    })
    title = f"BES capacity sweep: {scenario.name}"
    lines = [title, "=" * len(title), table.to_string(index=False, justify="left")]
    if saturation is None:
        lines.append("No saturation capacity within the swept range.")
    else:
        lines.append(f"Saturation capacity: {saturation:g} kWh")
    return "\n".join(lines) + "\n"


def write_sweep_report(
    scenario: Scenario, entries: list[SweepEntry], saturation: float | None, out_dir: str | Path
) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    text = out_dir / "sweep.txt"
    text.write_text(render_sweep_report(scenario, entries, saturation))
    table = out_dir / "sweep.csv"
    sweep_frame(entries, scenario.bes.rated_capacity, saturation).to_csv(table, index=False)
    return [text, table, write_metadata(out_dir, "sweep", [scenario.name])]


def comparison_frame(rows: list[ComparisonRow]) -> pd.DataFrame:
    return pd.DataFrame({
        "scenario": [r.name for r in rows],
        "c_non_edr": [r.c_non_edr for r in rows],
        "c_edr": [r.c_edr for r in rows],
        "participate": [r.participate for r in rows],
        "reason": [r.reason.value for r in rows],
    })


def write_comparison_report(rows: list[ComparisonRow], out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = pd.DataFrame({
        "Scenario": [r.name for r in rows],
        "Without EDR": [money(r.c_non_edr) for r in rows],
        "With EDR": [money(r.c_edr) for r in rows],
        "Decision": [_decision_label(r.participate) for r in rows],
    })
    text = out_dir / "comparison.txt"
    text.write_text("EDR decision comparison\n=======================\n"
                    + table.to_string(index=False, justify="left") + "\n")
    csv = out_dir / "comparison.csv"
    comparison_frame(rows).to_csv(csv, index=False)
    return [text, csv, write_metadata(out_dir, "compare", [r.name for r in rows])]
