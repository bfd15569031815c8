# backend/app/routers/decision.py

import logging

from fastapi import APIRouter, HTTPException, status
from pydantic import ValidationError

from ..exceptions import EdrEngineError
from ..models.api import (
    DecisionResponse,
    ScenarioPayload,
    SweepRequest,
    SweepResponse,
    SweepRow,
    ValidateRequest,
    ValidateResponse,
)
from ..models.schedule import Schedule
from ..services.decision_engine import DecisionEngine, find_saturation_capacity
from ..services.formulation import validate_schedule

logger = logging.getLogger(__name__)

decision_router = APIRouter(tags=["decision"])


def _unprocessable(e: Exception) -> HTTPException:
    detail = (
        e.errors(include_url=False, include_context=False, include_input=False)
        if isinstance(e, ValidationError)
        else str(e)
    )
    return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=detail)


@decision_router.post("/decide", response_model=DecisionResponse)
def decide(payload: ScenarioPayload):
    """
    Decide EDR participation for an inline scenario.

    Returns both profit breakdowns and, when the event is feasible, the per-step schedule.
    """
    try:
        scenario = payload.to_scenario()
        logger.info(f"Decide request for '{scenario.name}'")
        decision = DecisionEngine().decide(scenario)
        return DecisionResponse.from_decision(scenario.name, decision, scenario.grid.labels())
    except (EdrEngineError, ValidationError, ValueError) as e:
        logger.warning(f"Rejected decide request: {e}")
        raise _unprocessable(e) from e
    except Exception as e:
        logger.error(f"Failed to decide: {e}", exc_info=True)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=str(e)
        ) from e


@decision_router.post("/sweep", response_model=SweepResponse)
def sweep(request: SweepRequest):
    try:
        scenario = request.scenario.to_scenario()
        entries = DecisionEngine().capacity_sweep(scenario, request.capacities)
        reference = scenario.bes.rated_capacity
        rows = [
            SweepRow(
                capacity_kwh=e.capacity_kwh,
                percent_of_reference=100.0 * e.capacity_kwh / reference if reference > 0 else None,
                c_edr=e.c_edr,
                participate=e.participate,
            )
            for e in entries
        ]
        return SweepResponse(rows=rows, saturation_capacity=find_saturation_capacity(entries))
    except (EdrEngineError, ValidationError, ValueError) as e:
        logger.warning(f"Rejected sweep request: {e}")
        raise _unprocessable(e) from e
    except Exception as e:
        logger.error(f"Failed to run capacity sweep: {e}", exc_info=True)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=str(e)
        ) from e


@decision_router.post("/validate", response_model=ValidateResponse)
def validate(request: ValidateRequest):
    """Check a submitted schedule against every model constraint."""
    try:
        scenario = request.scenario.to_scenario()
        rows = request.schedule
        dis = tuple(r.bes_discharge_kw for r in rows)
        ch = tuple(r.bes_charge_kw for r in rows)
        schedule = Schedule(
            grid_load=tuple(r.grid_load_kw for r in rows),
            ev_served=tuple(r.ev_served_kw for r in rows),
            bes_net=tuple(d - c for d, c in zip(dis, ch, strict=True)),
            bes_discharge=dis,
            bes_charge=ch,
            mode_discharge=tuple(float(r.mode_dis) for r in rows),
            mode_charge=tuple(float(r.mode_ch) for r in rows),
            soc=tuple(r.soc for r in rows),
            reduction=tuple(r.reduction_kw for r in rows),
        )
        violations = validate_schedule(schedule, scenario)
        return ValidateResponse(feasible=not violations, violations=violations)
    except (EdrEngineError, ValidationError, ValueError) as e:
        logger.warning(f"Rejected validate request: {e}")
        raise _unprocessable(e) from e
    except Exception as e:
        logger.error(f"Failed to validate schedule: {e}", exc_info=True)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=str(e)
        ) from e
