import math
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        def __str__(self) -> str:
            return str(self.value)

        def __format__(self, format_spec: str) -> str:
            return str(self.value).__format__(format_spec)

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Sense(StrEnum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


class Relation(StrEnum):
    LE = "<="
    EQ = "="
    GE = ">="


class LpStatus(StrEnum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LinearConstraint(BaseModel):
    """``sum(coeffs[j] * x[j]) <relation> rhs`` with a sparse coefficient row."""

    model_config = ConfigDict(frozen=True)

    coeffs: dict[int, float]
    relation: Relation
    rhs: float
    name: str | None = None


class LpProblem(BaseModel):
    model_config = ConfigDict(frozen=True)

    sense: Sense = Sense.MAXIMIZE
    objective: tuple[float, ...]
    constraints: tuple[LinearConstraint, ...] = ()
    lower: tuple[float, ...] = Field(description="Per-variable lower bound, -inf allowed")
    upper: tuple[float, ...] = Field(description="Per-variable upper bound, +inf allowed")
    var_names: tuple[str, ...] | None = None

    @model_validator(mode="after")
    def _check_shape(self) -> "LpProblem":
        n = len(self.objective)
        if len(self.lower) != n or len(self.upper) != n:
            raise ValueError(
                f"bounds cover {len(self.lower)}/{len(self.upper)} variables, objective has {n}"
            )
        if self.var_names is not None and len(self.var_names) != n:
            raise ValueError("var_names length differs from the number of variables")
        for j, (lo, hi) in enumerate(zip(self.lower, self.upper, strict=True)):
            if math.isnan(lo) or math.isnan(hi) or lo > hi:
                raise ValueError(f"variable {j} has invalid bounds [{lo}, {hi}]")
            if lo == math.inf or hi == -math.inf:
                raise ValueError(f"variable {j} has an empty bound range [{lo}, {hi}]")
        for i, row in enumerate(self.constraints):
            for j in row.coeffs:
                if not 0 <= j < n:
                    raise ValueError(f"constraint {i} references undeclared variable {j}")
        return self

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def with_bounds(self, lower, upper) -> "LpProblem":
        return LpProblem(
            sense=self.sense,
            objective=self.objective,
            constraints=self.constraints,
            lower=tuple(lower),
            upper=tuple(upper),
            var_names=self.var_names,
        )


class LpOutcome(BaseModel):
    status: LpStatus
    objective_value: float | None = None
    values: tuple[float, ...] | None = None
    iterations: int = 0


class MilpProblem(BaseModel):
    model_config = ConfigDict(frozen=True)

    base: LpProblem
    binary_vars: frozenset[int]
    warm_start: tuple[float, ...] | None = Field(
        default=None, description="Candidate point tried as the first incumbent"
    )

    @model_validator(mode="after")
    def _check_binaries(self) -> "MilpProblem":
        for j in self.binary_vars:
            if not 0 <= j < self.base.num_vars:
                raise ValueError(f"binary variable {j} is not declared")
            lo, hi = self.base.lower[j], self.base.upper[j]
            if lo != 0 or hi != 1:
                raise ValueError(f"binary variable {j} must have bounds [0, 1], got [{lo}, {hi}]")
        if self.warm_start is not None and len(self.warm_start) != self.base.num_vars:
            raise ValueError("warm_start length differs from the number of variables")
        return self


class MilpOutcome(BaseModel):
    status: LpStatus
    objective_value: float | None = None
    values: tuple[float, ...] | None = None
    nodes_explored: int = 0
    proven_gap: float = 0.0
    root_bound: float | None = None
    incumbent_history: list[float] = Field(default_factory=list)
