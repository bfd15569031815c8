from .branch_bound import BranchAndBound, solve_milp
from .simplex import SimplexSolver, compile_lp, solve_lp

__all__ = [
    "BranchAndBound",
    "SimplexSolver",
    "compile_lp",
    "solve_lp",
    "solve_milp",
]
