from .decision import decision_router

__all__ = [
    "decision_router"
]
