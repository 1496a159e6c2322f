from .Solver import *
from .HighsSolver import HighsSolver
from .SimplexSolver import SimplexSolver

builtin_solvers = [
    HighsSolver,
    SimplexSolver
]

def create_solver(name: str, configuration: SolverConfiguration | None = None) -> ISolver:
    """Creates a new instance of a built-in solver by its short name ("highs" or "simplex")."""
    for solver_class in builtin_solvers:
        solver = solver_class(configuration)
        if (solver.name == name):
            return solver

    raise ValueError(f"Unknown solver \"{name}\". Available: {', '.join(cls().name for cls in builtin_solvers)}.")
