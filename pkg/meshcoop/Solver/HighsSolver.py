import numpy as np
from scipy.optimize import linprog

from meshcoop.Errors import NumericFailureError
from meshcoop.Solver import ISolver, LpStatus, SolverConfiguration
from meshcoop.Utils import log

class HighsSolver(ISolver):
    """Solves problems with the HiGHS dual simplex shipped with scipy.

    HiGHS minimizes, so the objective is negated on the way in and the row marginals (sensitivities of the
    minimum) are negated on the way out to become the multipliers of the maximization form.
    """

    def __init__(self, configuration: SolverConfiguration | None = None):
        super().__init__(configuration)
        self.__name = f"meshcoop.Solver.{self.__class__.__name__}"

    @property
    def name(self) -> str:
        return "highs"

    def _solve_max(self, c, ineq_matrix, ineq_bounds, eq_matrix, eq_values):
        has_ineq = ineq_matrix.shape[0] > 0
        has_eq = eq_matrix.shape[0] > 0

        result = linprog(
            -c,
            A_ub = ineq_matrix if has_ineq else None,
            b_ub = ineq_bounds if has_ineq else None,
            A_eq = eq_matrix if has_eq else None,
            b_eq = eq_values if has_eq else None,
            bounds = (0, None),
            method = "highs-ds",
            options = {
                "primal_feasibility_tolerance": max(self.configuration.tolerance, 1e-10),
                "dual_feasibility_tolerance": max(self.configuration.tolerance, 1e-10),
                "presolve": True
            }
        )

        iterations = int(getattr(result, "nit", 0) or 0)

        if (result.status == 2):
            return LpStatus.INFEASIBLE, None, None, None, iterations

        if (result.status == 3):
            return LpStatus.UNBOUNDED, None, None, None, iterations

        if (result.status != 0):
            log(f"> [{self.__name}]: HiGHS stopped with status {result.status}: {result.message}")
            raise NumericFailureError(f"HiGHS could not solve the problem: {result.message}")

        x = np.clip(np.asarray(result.x, dtype = float), 0.0, None)
        y = -np.asarray(result.ineqlin.marginals, dtype = float) if has_ineq else np.zeros(0)
        z = -np.asarray(result.eqlin.marginals, dtype = float) if has_eq else np.zeros(0)

        return LpStatus.OPTIMAL, x, np.clip(y, 0.0, None), z, iterations
