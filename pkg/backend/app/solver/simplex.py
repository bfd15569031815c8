# backend/app/solver/simplex.py
"""Bounded-variable primal simplex on a dense tableau.

Variables are shifted so every tableau column lives in ``[0, ub]``; nonbasic
columns sit at either bound. Phase 1 minimises the sum of artificial columns,
phase 2 the (sign-adjusted) objective. Dantzig pricing is used until the
objective stalls for ``2 * (rows + cols)`` iterations, after which Bland's
smallest-index rule takes over for the rest of the phase.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..config.settings import EngineSettings, settings as default_settings
from ..exceptions import LpInputError, SolverIterationLimitError, SolverNumericalError
from ..models.lp import LpOutcome, LpProblem, LpStatus, Relation, Sense

logger = logging.getLogger(__name__)

MAX_COEFFICIENT = 1e12

_KIND_SHIFTED = 0   # x = lower + y
_KIND_MIRRORED = 1  # x = upper - y
_KIND_FREE = 2      # x = y_plus - y_minus


@dataclass
class CompiledLp:
    """Dense arrays for one LpProblem; bounds are supplied per solve."""

    a: np.ndarray
    b: np.ndarray
    relations: list[Relation]
    cost: np.ndarray  # minimisation form
    sign: float       # +1 minimise, -1 maximise
    objective: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


@dataclass
class _Tableau:
    t: np.ndarray             # m x (N + 1), last column is B^-1 b
    ub: np.ndarray            # column upper bounds
    basis: list[int]
    at_upper: np.ndarray      # bool per column
    excluded: np.ndarray      # bool per column, never allowed to enter
    iterations: int = 0
    xb: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def n_cols(self) -> int:
        return self.t.shape[1] - 1

    def refresh(self) -> None:
        upper_cols = np.flatnonzero(self.at_upper)
        rhs = self.t[:, -1]
        if upper_cols.size:
            self.xb = rhs - self.t[:, upper_cols] @ self.ub[upper_cols]
        else:
            self.xb = rhs.copy()

    def pivot(self, r: int, j: int) -> None:
        t = self.t
        t[r] /= t[r, j]
        col = t[:, j].copy()
        col[r] = 0.0
        t -= np.outer(col, t[r])
        t[:, j] = 0.0
        t[r, j] = 1.0

    def objective(self, cost: np.ndarray) -> float:
        value = float(cost[self.basis] @ self.xb)
        upper_cols = np.flatnonzero(self.at_upper)
        if upper_cols.size:
            value += float(cost[upper_cols] @ self.ub[upper_cols])
        return value

    def column_values(self) -> np.ndarray:
        w = np.where(self.at_upper, self.ub, 0.0)
        w[self.basis] = self.xb
        return np.clip(w, 0.0, self.ub)


def compile_lp(problem: LpProblem) -> CompiledLp:
    n = problem.num_vars
    m = len(problem.constraints)
    a = np.zeros((m, n))
    b = np.zeros(m)
    for i, row in enumerate(problem.constraints):
        for j, coeff in row.coeffs.items():
            a[i, j] += coeff
        b[i] = row.rhs
    objective = np.asarray(problem.objective, dtype=float)
    lower = np.asarray(problem.lower, dtype=float)
    upper = np.asarray(problem.upper, dtype=float)

    for name, arr in (("constraint coefficient", a), ("right-hand side", b),
                      ("objective coefficient", objective)):
        if arr.size and not np.all(np.isfinite(arr)):
            raise LpInputError(f"non-finite {name}")
        if arr.size and np.max(np.abs(arr)) > MAX_COEFFICIENT:
            raise LpInputError(f"{name} magnitude exceeds {MAX_COEFFICIENT:g}")
    finite_bounds = np.concatenate([lower[np.isfinite(lower)], upper[np.isfinite(upper)]])
    if finite_bounds.size and np.max(np.abs(finite_bounds)) > MAX_COEFFICIENT:
        raise LpInputError(f"variable bound magnitude exceeds {MAX_COEFFICIENT:g}")

    sign = 1.0 if problem.sense == Sense.MINIMIZE else -1.0
    return CompiledLp(
        a=a,
        b=b,
        relations=[row.relation for row in problem.constraints],
        cost=sign * objective,
        sign=sign,
        objective=objective,
        lower=lower,
        upper=upper,
    )


class SimplexSolver:
    def __init__(self, config: EngineSettings | None = None):
        self.config = config or default_settings

    def solve(self, problem: LpProblem) -> LpOutcome:
        return self.solve_compiled(compile_lp(problem))

    def solve_compiled(
        self,
        model: CompiledLp,
        lower: np.ndarray | None = None,
        upper: np.ndarray | None = None,
    ) -> LpOutcome:
        lower = model.lower if lower is None else lower
        upper = model.upper if upper is None else upper
        n = model.a.shape[1]

        kinds = np.where(
            np.isfinite(lower), _KIND_SHIFTED, np.where(np.isfinite(upper), _KIND_MIRRORED, _KIND_FREE)
        )
        offsets = np.where(kinds == _KIND_SHIFTED, lower, np.where(kinds == _KIND_MIRRORED, upper, 0.0))
        offsets = np.where(np.isfinite(offsets), offsets, 0.0)

        # structural columns: one per variable, plus a negative twin for free variables
        col_source: list[tuple[int, float]] = []
        col_upper: list[float] = []
        for j in range(n):
            if kinds[j] == _KIND_SHIFTED:
                col_source.append((j, 1.0))
                col_upper.append(upper[j] - lower[j])
            elif kinds[j] == _KIND_MIRRORED:
                col_source.append((j, -1.0))
                col_upper.append(math.inf)
            else:
                col_source.append((j, 1.0))
                col_upper.append(math.inf)
                col_source.append((j, -1.0))
                col_upper.append(math.inf)
        n_struct = len(col_source)

        m = model.a.shape[0]
        rhs = model.b - model.a @ offsets
        struct = np.zeros((m, n_struct))
        struct_cost = np.zeros(n_struct)
        for k, (j, s) in enumerate(col_source):
            struct[:, k] = s * model.a[:, j]
            struct_cost[k] = s * model.cost[j]

        slack_rows = [i for i, rel in enumerate(model.relations) if rel != Relation.EQ]
        slack_sign = np.zeros(m)
        for i in slack_rows:
            slack_sign[i] = 1.0 if model.relations[i] == Relation.LE else -1.0

        flip = np.zeros(m, dtype=bool)
        for i, rel in enumerate(model.relations):
            flip[i] = rhs[i] <= 0 if rel == Relation.GE else rhs[i] < 0
        row_sign = np.where(flip, -1.0, 1.0)
        struct *= row_sign[:, None]
        rhs = rhs * row_sign
        slack_sign *= row_sign

        artificial_rows = [i for i in range(m) if slack_sign[i] != 1.0]
        n_slack = len(slack_rows)
        n_art = len(artificial_rows)
        n_cols = n_struct + n_slack + n_art

        t = np.zeros((m, n_cols + 1))
        t[:, :n_struct] = struct
        basis = [-1] * m
        for k, i in enumerate(slack_rows):
            t[i, n_struct + k] = slack_sign[i]
            if slack_sign[i] == 1.0:
                basis[i] = n_struct + k
        for k, i in enumerate(artificial_rows):
            col = n_struct + n_slack + k
            t[i, col] = 1.0
            basis[i] = col
        t[:, -1] = rhs

        ub = np.concatenate([np.asarray(col_upper, dtype=float), np.full(n_slack + n_art, math.inf)])
        if np.any(ub < -self.config.bound_tol):
            return LpOutcome(status=LpStatus.INFEASIBLE)
        ub = np.maximum(ub, 0.0)

        tab = _Tableau(
            t=t,
            ub=ub,
            basis=basis,
            at_upper=np.zeros(n_cols, dtype=bool),
            excluded=ub <= 0.0,
        )
        tab.refresh()

        art_cols = np.arange(n_struct + n_slack, n_cols)
        if n_art:
            phase1_cost = np.zeros(n_cols)
            phase1_cost[art_cols] = 1.0
            status = self._iterate(tab, phase1_cost, phase="phase 1")
            infeasibility = tab.objective(phase1_cost)
            if status != LpStatus.OPTIMAL or infeasibility > self.config.feasibility_tol:
                logger.debug(f"Phase 1 ended with infeasibility {infeasibility:.3e}")
                return LpOutcome(status=LpStatus.INFEASIBLE, iterations=tab.iterations)
            self._drive_out_artificials(tab, art_cols)

        phase2_cost = np.zeros(n_cols)
        phase2_cost[:n_struct] = struct_cost
        status = self._iterate(tab, phase2_cost, phase="phase 2")
        if status == LpStatus.UNBOUNDED:
            return LpOutcome(status=LpStatus.UNBOUNDED, iterations=tab.iterations)

        w = tab.column_values()
        x = offsets.copy()
        for k, (j, s) in enumerate(col_source):
            if kinds[j] == _KIND_MIRRORED:
                x[j] -= w[k]
            else:
                x[j] += s * w[k]
        x = np.clip(x, lower, upper)
        self._check_residuals(model, x, lower, upper)

        return LpOutcome(
            status=LpStatus.OPTIMAL,
            objective_value=float(model.objective @ x),
            values=tuple(float(v) for v in x),
            iterations=tab.iterations,
        )

    def _iterate(self, tab: _Tableau, cost: np.ndarray, phase: str) -> LpStatus:
        cfg = self.config
        m, n_cols = tab.t.shape[0], tab.n_cols
        stall_limit = 2 * (m + n_cols)
        max_iterations = 50 * (m + n_cols) + 1000
        use_bland = False
        stalled = 0
        best = tab.objective(cost)

        for _ in range(max_iterations):
            basic = np.zeros(n_cols, dtype=bool)
            basic[tab.basis] = True
            reduced = cost - cost[tab.basis] @ tab.t[:, :n_cols]
            candidates = ~basic & ~tab.excluded & (
                (~tab.at_upper & (reduced < -cfg.optimality_tol))
                | (tab.at_upper & (reduced > cfg.optimality_tol))
            )
            eligible = np.flatnonzero(candidates)
            if eligible.size == 0:
                return LpStatus.OPTIMAL

            if use_bland:
                j = int(eligible[0])
            else:
                j = int(eligible[np.argmax(np.abs(reduced[eligible]))])
            direction = -1.0 if tab.at_upper[j] else 1.0

            g = direction * tab.t[:, j]
            ratios = np.full(m, math.inf)
            ub_basic = tab.ub[tab.basis]
            dec = g > cfg.pivot_tol
            ratios[dec] = np.maximum(tab.xb[dec], 0.0) / g[dec]
            inc = (g < -cfg.pivot_tol) & np.isfinite(ub_basic)
            ratios[inc] = np.maximum(ub_basic[inc] - tab.xb[inc], 0.0) / -g[inc]

            step_row = float(ratios.min()) if m else math.inf
            step_flip = float(tab.ub[j])
            if math.isinf(step_row) and math.isinf(step_flip):
                logger.debug(f"{phase}: column {j} is an unbounded ray")
                return LpStatus.UNBOUNDED

            tab.iterations += 1
            if step_flip <= step_row:
                tab.at_upper[j] = not tab.at_upper[j]
            else:
                tied = np.flatnonzero(ratios <= step_row + 1e-12 * max(1.0, step_row))
                if use_bland:
                    r = int(min(tied, key=lambda i: tab.basis[i]))
                else:
                    r = int(tied[np.argmax(np.abs(g[tied]))])
                leaving = tab.basis[r]
                tab.pivot(r, j)
                tab.basis[r] = j
                tab.at_upper[leaving] = bool(g[r] < 0)
                tab.at_upper[j] = False
            tab.refresh()

            value = tab.objective(cost)
            if value < best - 1e-12 * max(1.0, abs(best)):
                best = value
                stalled = 0
            else:
                stalled += 1
                if not use_bland and stalled >= stall_limit:
                    logger.debug(f"{phase}: no progress in {stalled} iterations, switching to Bland's rule")
                    use_bland = True

        raise SolverIterationLimitError(f"{phase} exceeded {max_iterations} simplex iterations")

    def _drive_out_artificials(self, tab: _Tableau, art_cols: np.ndarray) -> None:
        is_art = np.zeros(tab.n_cols, dtype=bool)
        is_art[art_cols] = True
        for r, col in enumerate(list(tab.basis)):
            if not is_art[col]:
                continue
            basic = np.zeros(tab.n_cols, dtype=bool)
            basic[tab.basis] = True
            row = np.abs(tab.t[r, :tab.n_cols])
            usable = ~basic & ~is_art & ~tab.excluded & (row > self.config.pivot_tol)
            options = np.flatnonzero(usable)
            if options.size == 0:
                # redundant row: the artificial stays basic, pinned at zero
                continue
            j = int(options[np.argmax(row[options])])
            tab.pivot(r, j)
            tab.basis[r] = j
            tab.at_upper[col] = False
            tab.at_upper[j] = False
        tab.ub[art_cols] = 0.0
        tab.excluded[art_cols] = True
        tab.at_upper[art_cols] = False
        tab.refresh()

    def _check_residuals(self, model: CompiledLp, x: np.ndarray, lower, upper) -> None:
        cfg = self.config
        lhs = model.a @ x
        for i, rel in enumerate(model.relations):
            if rel == Relation.LE:
                residual = lhs[i] - model.b[i]
            elif rel == Relation.GE:
                residual = model.b[i] - lhs[i]
            else:
                residual = abs(lhs[i] - model.b[i])
            if residual > cfg.feasibility_tol:
                raise SolverNumericalError(
                    f"row {i} residual {residual:.3e} exceeds feasibility tolerance"
                )
        if np.any(x < lower - cfg.bound_tol) or np.any(x > upper + cfg.bound_tol):
            raise SolverNumericalError("solution violates variable bounds")


def solve_lp(problem: LpProblem, config: EngineSettings | None = None) -> LpOutcome:
    """Solve a continuous LP; deterministic for identical input."""
    outcome = SimplexSolver(config).solve(problem)
    logger.debug(f"LP solved: status={outcome.status}, iterations={outcome.iterations}")
    return outcome
