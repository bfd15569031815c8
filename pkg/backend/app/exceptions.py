# backend/app/exceptions.py


class EdrEngineError(Exception):
    """Base class for every error raised by the decision engine."""


class LpInputError(EdrEngineError):
    """The linear program is ill-formed or numerically out of range."""


class SolverNumericalError(EdrEngineError):
    """A solve finished but its solution failed the residual check."""


class SolverIterationLimitError(EdrEngineError):
    pass


class NodeBudgetExceededError(EdrEngineError):
    """Branch and bound explored more nodes than allowed."""

    def __init__(self, budget: int, best_bound: float | None, incumbent: float | None):
        self.budget = budget
        self.best_bound = best_bound
        self.incumbent = incumbent
        super().__init__(
            f"Node budget of {budget} exhausted "
            f"(best bound={best_bound}, incumbent={incumbent})"
        )


class UnboundedRelaxationError(EdrEngineError):
    pass


class ScheduleConsistencyError(EdrEngineError):
    """An extracted schedule violates the model it was solved from."""

    def __init__(self, violations: list):
        self.violations = violations
        summary = "; ".join(str(v) for v in violations[:5])
        super().__init__(f"{len(violations)} constraint violation(s) after extraction: {summary}")


class OracleResolutionError(EdrEngineError):
    """The DP lattice is too coarse to represent any feasible policy."""


class ScenarioConfigError(EdrEngineError):
    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class TimeSeriesFormatError(EdrEngineError):
    """A time-series CSV could not be mapped onto the event window."""

    def __init__(self, path: str, problems: list[str]):
        self.path = path
        self.problems = problems
        super().__init__(f"{path}: " + "; ".join(problems))
