# backend/app/services/formulation.py

import logging
import math

import numpy as np

from ..exceptions import ScheduleConsistencyError
from ..models.lp import LinearConstraint, LpProblem, LpStatus, MilpOutcome, MilpProblem, Relation, Sense
from ..models.scenario import BesSpec, Scenario, ev_price
from ..models.schedule import BesUtilization, ProfitBreakdown, Schedule, Violation

logger = logging.getLogger(__name__)

# variable block per step: six continuous columns, then the two mode binaries
GRID, EV, DIS, CH, SOC, RED, V_DIS, V_CH = range(8)
BLOCK = 8
BLOCK_NAMES = ("grid_load", "ev_served", "bes_discharge", "bes_charge", "soc", "reduction",
               "mode_dis", "mode_ch")

KW_TOL = 1e-6
SOC_TOL = 1e-9
BINARY_TOL = 1e-6
CLAMP_KW = 1e-9


def effective_power_limits(bes: BesSpec) -> tuple[float, float]:
    """(discharge, charge) limits in kW; an idle battery cannot move energy."""
    if bes.is_idle:
        return 0.0, 0.0
    return bes.max_discharge_power, bes.max_charge_power


def soc_coefficients(bes: BesSpec, dt_hours: float) -> tuple[float, float]:
    """SOC fraction moved per kW of discharge / charge over one step."""
    if bes.rated_capacity == 0:
        return 0.0, 0.0
    return (
        bes.discharge_eff * dt_hours / bes.rated_capacity,
        bes.charge_eff * dt_hours / bes.rated_capacity,
    )


def var_index(step: int, column: int) -> int:
    return step * BLOCK + column


def build_edr_milp(scenario: Scenario) -> MilpProblem:
    grid = scenario.grid
    n = grid.steps
    dt = grid.dt_hours
    bes = scenario.bes
    forecast = scenario.forecast.forecast
    rho_grid = scenario.prices.grid_price
    rho_ev = ev_price(scenario.prices, scenario.station).grid_price
    rho_edr = scenario.edr.incentive_price
    min_red = scenario.edr.min_reduction
    dis_max, ch_max = effective_power_limits(bes)
    a_dis, a_ch = soc_coefficients(bes, dt)

    objective = [0.0] * (n * BLOCK)
    lower = [0.0] * (n * BLOCK)
    upper = [math.inf] * (n * BLOCK)
    names: list[str] = []
    rows: list[LinearConstraint] = []

    def row(coeffs: dict[int, float], relation: Relation, rhs: float, name: str) -> None:
        rows.append(LinearConstraint(
            coeffs={j: c for j, c in coeffs.items() if c != 0.0},
            relation=relation,
            rhs=rhs,
            name=name,
        ))

    for t in range(n):
        idx = {col: var_index(t, col) for col in range(BLOCK)}
        names.extend(f"{label}[{t}]" for label in BLOCK_NAMES)

        objective[idx[EV]] = rho_ev[t] * dt
        objective[idx[RED]] = rho_edr[t] * dt
        objective[idx[GRID]] = -rho_grid[t] * dt

        upper[idx[EV]] = forecast[t]  # never serve more than is demanded
        upper[idx[DIS]] = dis_max
        upper[idx[CH]] = ch_max
        lower[idx[SOC]] = bes.soc_min
        upper[idx[SOC]] = bes.soc_max
        lower[idx[RED]] = min_red[t]  # Eq. (4)
        upper[idx[V_DIS]] = 1.0
        upper[idx[V_CH]] = 1.0

        row({idx[RED]: 1.0, idx[GRID]: 1.0}, Relation.EQ, forecast[t], f"eq3[{t}]")
        row({idx[EV]: 1.0, idx[GRID]: -1.0, idx[DIS]: -1.0, idx[CH]: 1.0}, Relation.EQ, 0.0,
            f"eq6[{t}]")
        soc_row = {idx[SOC]: 1.0, idx[DIS]: a_dis, idx[CH]: -a_ch}
        if t == 0:
            row(soc_row, Relation.EQ, bes.initial_soc, f"eq11[{t}]")
        else:
            soc_row[var_index(t - 1, SOC)] = -1.0
            row(soc_row, Relation.EQ, 0.0, f"eq11[{t}]")
        row({idx[DIS]: 1.0, idx[V_DIS]: -dis_max}, Relation.LE, 0.0, f"eq8[{t}]")
        row({idx[CH]: 1.0, idx[V_CH]: -ch_max}, Relation.LE, 0.0, f"eq9[{t}]")
        row({idx[V_DIS]: 1.0, idx[V_CH]: 1.0}, Relation.LE, 1.0, f"eq10[{t}]")

    if bes.terminal_soc_min is not None:
        last = var_index(n - 1, SOC)
        lower[last] = max(lower[last], bes.terminal_soc_min)

    base = LpProblem(
        sense=Sense.MAXIMIZE,
        objective=tuple(objective),
        constraints=tuple(rows),
        lower=tuple(lower),
        upper=tuple(upper),
        var_names=tuple(names),
    )
    binaries = frozenset(var_index(t, col) for t in range(n) for col in (V_DIS, V_CH))
    logger.debug(f"Built EDR MILP: {n * 6} continuous, {len(binaries)} binary, {len(rows)} rows")
    return MilpProblem(base=base, binary_vars=binaries, warm_start=_pinned_minimum_point(scenario))


def _pinned_minimum_point(scenario: Scenario) -> tuple[float, ...] | None:
    """Serve forecast minus the minimum reduction from the grid with the battery idle."""
    forecast = scenario.forecast.forecast
    min_red = scenario.edr.min_reduction
    if any(f < r for f, r in zip(forecast, min_red, strict=True)):
        return None
    point: list[float] = []
    for f, r in zip(forecast, min_red, strict=True):
        block = [0.0] * BLOCK
        block[GRID] = f - r
        block[EV] = f - r
        block[SOC] = scenario.bes.initial_soc
        block[RED] = r
        point.extend(block)
    return tuple(point)


def extract_schedule(outcome: MilpOutcome, scenario: Scenario) -> Schedule:
    if outcome.status != LpStatus.OPTIMAL or outcome.values is None:
        raise ValueError(f"cannot extract a schedule from a {outcome.status} outcome")
    n = scenario.grid.steps
    values = np.asarray(outcome.values, dtype=float).reshape(n, BLOCK)

    def kw(column: int) -> np.ndarray:
        col = values[:, column].copy()
        col[np.abs(col) < CLAMP_KW] = 0.0
        return col

    grid_load, ev_served, dis, ch, reduction = kw(GRID), kw(EV), kw(DIS), kw(CH), kw(RED)
    mode_dis = np.round(values[:, V_DIS])
    mode_ch = np.round(values[:, V_CH])

    # SOC is re-integrated from the dispatch so Eq. (11) holds to rounding error
    a_dis, a_ch = soc_coefficients(scenario.bes, scenario.grid.dt_hours)
    soc = np.empty(n)
    previous = scenario.bes.initial_soc
    for t in range(n):
        previous = previous - a_dis * dis[t] + a_ch * ch[t]
        soc[t] = previous

    schedule = Schedule(
        grid_load=tuple(grid_load.tolist()),
        ev_served=tuple(ev_served.tolist()),
        bes_net=tuple((dis - ch).tolist()),
        bes_discharge=tuple(dis.tolist()),
        bes_charge=tuple(ch.tolist()),
        mode_discharge=tuple(mode_dis.tolist()),
        mode_charge=tuple(mode_ch.tolist()),
        soc=tuple(soc.tolist()),
        reduction=tuple(reduction.tolist()),
    )
    violations = validate_schedule(schedule, scenario)
    if violations:
        logger.error(f"Extracted schedule fails {len(violations)} checks; first: {violations[0]}")
        raise ScheduleConsistencyError(violations)
    return schedule


def profit_breakdown(schedule: Schedule, scenario: Scenario) -> ProfitBreakdown:
    dt = scenario.grid.dt_hours
    rho_grid = np.asarray(scenario.prices.grid_price)
    rho_ev = np.asarray(ev_price(scenario.prices, scenario.station).grid_price)
    rho_edr = np.asarray(scenario.edr.incentive_price)
    return ProfitBreakdown(
        ev_income=float(rho_ev @ np.asarray(schedule.ev_served)) * dt,
        edr_income=float(rho_edr @ np.asarray(schedule.reduction)) * dt,
        grid_cost=float(rho_grid @ np.asarray(schedule.grid_load)) * dt,
    )


def validate_schedule(
    schedule: Schedule,
    scenario: Scenario,
    soc_tol: float = SOC_TOL,
) -> list[Violation]:
    """Re-check every model constraint; an empty list means the schedule is feasible."""
    n = scenario.grid.steps
    series = schedule.model_dump()
    for name, values in series.items():
        if len(values) != n:
            raise ValueError(f"schedule.{name} has {len(values)} values, scenario has {n} steps")

    bes = scenario.bes
    dis_max, ch_max = effective_power_limits(bes)
    a_dis, a_ch = soc_coefficients(bes, scenario.grid.dt_hours)
    forecast = scenario.forecast.forecast
    min_red = scenario.edr.min_reduction
    s = schedule
    violations: list[Violation] = []

    def check(ok: bool, equation: str, step: int, residual: float, message: str) -> None:
        if not ok:
            violations.append(
                Violation(equation=equation, step=step, residual=residual, message=message)
            )

    previous_soc = bes.initial_soc
    for t in range(n):
        r = s.reduction[t] - (forecast[t] - s.grid_load[t])
        check(abs(r) <= KW_TOL, "Eq. (3)", t, r, "reduction != forecast - grid_load")
        r = min_red[t] - s.reduction[t]
        check(r <= KW_TOL, "Eq. (4)", t, r, "reduction below the requested minimum")
        r = -s.grid_load[t]
        check(r <= KW_TOL, "Eq. (5)", t, r, "negative grid load")
        r = s.ev_served[t] - (s.grid_load[t] + s.bes_net[t])
        check(abs(r) <= KW_TOL, "Eq. (6)", t, r, "ev_served != grid_load + bes_net")
        r = s.bes_net[t] - (s.bes_discharge[t] - s.bes_charge[t])
        check(abs(r) <= KW_TOL, "Eq. (7)", t, r, "bes_net != discharge - charge")

        r = max(-s.bes_discharge[t], s.bes_discharge[t] - dis_max * s.mode_discharge[t])
        check(r <= KW_TOL, "Eq. (8)", t, r, "discharge outside [0, max * mode]")
        r = max(-s.bes_charge[t], s.bes_charge[t] - ch_max * s.mode_charge[t])
        check(r <= KW_TOL, "Eq. (9)", t, r, "charge outside [0, max * mode]")
        for label, mode in (("mode_discharge", s.mode_discharge[t]), ("mode_charge", s.mode_charge[t])):
            r = abs(mode - round(mode))
            check(r <= BINARY_TOL and round(mode) in (0, 1), "binary", t, r, f"{label} is not 0/1")
        r = s.mode_discharge[t] + s.mode_charge[t] - 1.0
        check(r <= BINARY_TOL, "Eq. (10)", t, r, "charging and discharging simultaneously")

        expected = previous_soc - a_dis * s.bes_discharge[t] + a_ch * s.bes_charge[t]
        r = s.soc[t] - expected
        check(abs(r) <= soc_tol, "Eq. (11)", t, r, "SOC does not follow the dispatch")
        r = max(bes.soc_min - s.soc[t], s.soc[t] - bes.soc_max)
        check(r <= soc_tol, "Eq. (12)", t, r, "SOC outside [soc_min, soc_max]")
        r = max(-s.ev_served[t], s.ev_served[t] - forecast[t])
        check(r <= KW_TOL, "demand bound", t, r, "served EV load outside [0, forecast]")
        previous_soc = s.soc[t]

    if bes.terminal_soc_min is not None:
        r = bes.terminal_soc_min - s.soc[n - 1]
        check(r <= soc_tol, "terminal SOC", n - 1, r, "final SOC below terminal_soc_min")
    return violations


def bes_utilization(schedule: Schedule, scenario: Scenario) -> BesUtilization:
    dt = scenario.grid.dt_hours
    baseline = np.asarray(scenario.forecast.forecast) - np.asarray(scenario.edr.min_reduction)
    dis = np.asarray(schedule.bes_discharge)
    above_baseline = np.maximum(np.asarray(schedule.ev_served) - baseline, 0.0)
    compensation = np.minimum(dis, above_baseline)
    compensation_kwh = float(compensation.sum()) * dt
    return BesUtilization(
        baseline_compensation_kwh=compensation_kwh,
        surplus_supply_kwh=float(dis.sum()) * dt - compensation_kwh,
        charged_kwh=float(np.asarray(schedule.bes_charge).sum()) * dt,
        soc_change=schedule.soc[-1] - scenario.bes.initial_soc,
    )
