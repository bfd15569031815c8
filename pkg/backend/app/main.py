# backend/app/main.py

import logging

from fastapi import FastAPI
from logs.config import setup_logging

from .routers import decision_router

setup_logging()
logger = logging.getLogger(__name__)

app = FastAPI(
    title="EDR Station Decision Engine",
    description="EDR participation decisions for a BES-assisted EV charging station",
    version="0.1",
)

app.include_router(decision_router, prefix="/api", tags=["decision"])


@app.get("/")
async def root():
    return {
        "message": "EDR Station Decision Engine API",
        "version": "0.1",
        "status": "running",
        "endpoints": {
            "decide": "/api/decide",
            "sweep": "/api/sweep",
            "validate": "/api/validate",
            "health": "/health"
        }
    }


@app.get("/health")
async def health_check():
    return {
        "status": "healthy",
        "service": "edr-station-backend"
    }
