# backend/app/solver/branch_bound.py

import heapq
import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..config.settings import EngineSettings, settings as default_settings
from ..exceptions import LpInputError, NodeBudgetExceededError, UnboundedRelaxationError
from ..models.lp import LpOutcome, LpStatus, MilpOutcome, MilpProblem, Relation, Sense
from .simplex import CompiledLp, SimplexSolver, compile_lp

logger = logging.getLogger(__name__)

MAX_BINARIES = 64


@dataclass(order=True)
class _Node:
    # heap key: best bound first, then deepest (dive on ties), then creation order
    priority: tuple[float, int, int]
    depth: int = field(compare=False)
    lower: np.ndarray = field(compare=False)
    upper: np.ndarray = field(compare=False)
    outcome: LpOutcome = field(compare=False)


class BranchAndBound:
    """Best-bound branch and bound over 0/1 variables of a MilpProblem."""

    def __init__(self, config: EngineSettings | None = None, node_budget: int | None = None):
        self.config = config or default_settings
        self.node_budget = node_budget or self.config.node_budget
        self.lp = SimplexSolver(self.config)

    def solve(self, problem: MilpProblem) -> MilpOutcome:
        cfg = self.config
        if len(problem.binary_vars) > MAX_BINARIES:
            raise LpInputError(
                f"{len(problem.binary_vars)} binary variables exceed the limit of {MAX_BINARIES}"
            )
        model = compile_lp(problem.base)
        binaries = np.array(sorted(problem.binary_vars), dtype=int)
        # score = objective in "larger is better" orientation
        orient = 1.0 if problem.base.sense == Sense.MAXIMIZE else -1.0

        incumbent: tuple[float, ...] | None = None
        incumbent_score = -math.inf
        history: list[float] = []

        if problem.warm_start is not None and self._is_feasible(model, problem.warm_start, binaries):
            incumbent = tuple(float(v) for v in problem.warm_start)
            incumbent_score = orient * float(model.objective @ np.asarray(incumbent))
            history.append(orient * incumbent_score)
            logger.debug(f"Warm start accepted as incumbent, objective={orient * incumbent_score:.6f}")

        counter = itertools.count()
        nodes = 1
        root = self.lp.solve_compiled(model, model.lower, model.upper)
        if root.status == LpStatus.UNBOUNDED:
            raise UnboundedRelaxationError("LP relaxation of the MILP is unbounded")
        if root.status == LpStatus.INFEASIBLE:
            logger.info("MILP infeasible at the root relaxation")
            return MilpOutcome(status=LpStatus.INFEASIBLE, nodes_explored=nodes)
        root_bound = root.objective_value

        heap: list[_Node] = []

        def consider(outcome: LpOutcome, lower: np.ndarray, upper: np.ndarray, depth: int) -> None:
            nonlocal incumbent, incumbent_score
            score = orient * outcome.objective_value
            if score <= incumbent_score + cfg.gap_tol:
                return
            values = np.asarray(outcome.values)
            if self._branch_variable(values, binaries) is None:
                incumbent = outcome.values
                incumbent_score = score
                history.append(outcome.objective_value)
                logger.debug(f"New incumbent {outcome.objective_value:.6f} at depth {depth}")
                return
            heapq.heappush(heap, _Node((-score, -depth, next(counter)), depth, lower, upper, outcome))

        consider(root, model.lower.copy(), model.upper.copy(), 0)

        while heap:
            best_score = -heap[0].priority[0]
            if best_score <= incumbent_score + cfg.gap_tol:
                break
            node = heapq.heappop(heap)
            j = self._branch_variable(np.asarray(node.outcome.values), binaries)
            for value in (1.0, 0.0):
                if nodes >= self.node_budget:
                    raise NodeBudgetExceededError(
                        self.node_budget,
                        best_bound=orient * best_score,
                        incumbent=None if incumbent is None else orient * incumbent_score,
                    )
                lower = node.lower.copy()
                upper = node.upper.copy()
                lower[j] = upper[j] = value
                nodes += 1
                child = self.lp.solve_compiled(model, lower, upper)
                if child.status == LpStatus.OPTIMAL:
                    consider(child, lower, upper, node.depth + 1)

        if incumbent is None:
            logger.info(f"MILP infeasible after {nodes} nodes")
            return MilpOutcome(
                status=LpStatus.INFEASIBLE, nodes_explored=nodes, root_bound=root_bound
            )

        remaining = -heap[0].priority[0] if heap else incumbent_score
        gap = max(0.0, remaining - incumbent_score)
        objective = float(model.objective @ np.asarray(incumbent))
        logger.info(f"MILP solved: objective={objective:.6f}, nodes={nodes}, gap={gap:.2e}")
        return MilpOutcome(
            status=LpStatus.OPTIMAL,
            objective_value=objective,
            values=incumbent,
            nodes_explored=nodes,
            proven_gap=gap,
            root_bound=root_bound,
            incumbent_history=history,
        )

    def _branch_variable(self, values: np.ndarray, binaries: np.ndarray) -> int | None:
        """Most fractional binary; lowest index wins ties."""
        if binaries.size == 0:
            return None
        frac = np.abs(values[binaries] - np.round(values[binaries]))
        if frac.max() <= self.config.integrality_tol:
            return None
        # argmax returns the first maximum, and binaries are sorted ascending
        return int(binaries[int(np.argmax(frac))])

    def _is_feasible(self, model: CompiledLp, point, binaries: np.ndarray) -> bool:
        cfg = self.config
        x = np.asarray(point, dtype=float)
        if np.any(x < model.lower - cfg.bound_tol) or np.any(x > model.upper + cfg.bound_tol):
            return False
        if binaries.size and np.any(np.abs(x[binaries] - np.round(x[binaries])) > cfg.integrality_tol):
            return False
        lhs = model.a @ x
        for i, rel in enumerate(model.relations):
            if rel == Relation.LE and lhs[i] > model.b[i] + cfg.feasibility_tol:
                return False
            if rel == Relation.GE and lhs[i] < model.b[i] - cfg.feasibility_tol:
                return False
            if rel == Relation.EQ and abs(lhs[i] - model.b[i]) > cfg.feasibility_tol:
                return False
        return True


def solve_milp(
    problem: MilpProblem,
    config: EngineSettings | None = None,
    node_budget: int | None = None,
) -> MilpOutcome:
    return BranchAndBound(config, node_budget).solve(problem)
