# backend/app/config/settings.py

import logging
import os

from dotenv import load_dotenv
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

load_dotenv()


class EngineSettings(BaseModel):
    node_budget: int = Field(default=1_000_000, gt=0)
    sweep_workers: int = Field(default=1, ge=1)

    feasibility_tol: float = Field(default=1e-7, gt=0)
    optimality_tol: float = Field(default=1e-9, gt=0)
    pivot_tol: float = Field(default=1e-9, gt=0)
    bound_tol: float = Field(default=1e-9, gt=0)
    integrality_tol: float = Field(default=1e-6, gt=0)
    gap_tol: float = Field(default=1e-6, ge=0)
    decision_eps: float = Field(default=1e-6, ge=0)

    @classmethod
    def from_env(cls) -> "EngineSettings":
        values = {
            "node_budget": os.getenv("EDR_NODE_BUDGET"),
            "sweep_workers": os.getenv("EDR_SWEEP_WORKERS"),
            "feasibility_tol": os.getenv("EDR_FEASIBILITY_TOL"),
            "optimality_tol": os.getenv("EDR_OPTIMALITY_TOL"),
            "pivot_tol": os.getenv("EDR_PIVOT_TOL"),
            "integrality_tol": os.getenv("EDR_INTEGRALITY_TOL"),
            "gap_tol": os.getenv("EDR_GAP_TOL"),
            "decision_eps": os.getenv("EDR_DECISION_EPS"),
        }
        overrides = {k: v for k, v in values.items() if v not in (None, "")}
        if overrides:
            logger.info(f"Engine settings overridden from environment: {sorted(overrides)}")
        return cls(**overrides)


settings = EngineSettings.from_env()
