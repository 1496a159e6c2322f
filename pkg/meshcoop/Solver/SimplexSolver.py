"""
    SimplexSolver.py

    Contains a dense two-phase tableau primal simplex with Bland's anti-cycling rule.

    Pivots always choose the lowest-index improving column and, among tied ratios, the row whose basic variable has
    the lowest index, so identical problems yield bitwise-identical solutions. Dual multipliers are recovered at the
    optimal basis by solving ``B^T y = c_B`` against the original rows.
"""

import numpy as np

from meshcoop.Errors import NumericFailureError
from meshcoop.Solver import ISolver, LpStatus, SolverConfiguration
from meshcoop.Utils import debug

class SimplexSolver(ISolver):
    """A dense tableau simplex, suited to small and medium problems."""

    def __init__(self, configuration: SolverConfiguration | None = None):
        super().__init__(configuration)
        self.__name = f"meshcoop.Solver.{self.__class__.__name__}"
        self.__dump = None
        self.__iterations = 0

    @property
    def name(self) -> str:
        return "simplex"

    def _solve_max(self, c, ineq_matrix, ineq_bounds, eq_matrix, eq_values):
        tolerance = self.configuration.tolerance
        n = c.shape[0]
        k = ineq_bounds.shape[0]
        e = eq_values.shape[0]
        m = k + e

        A = ineq_matrix.toarray()
        E = eq_matrix.toarray()

        # Rows: [A I] [x s] = b and [E 0] [x s] = d, flipped where the right-hand side is negative.
        rows = np.zeros((m, n + k))
        rows[:k, :n] = A
        rows[:k, n:] = np.eye(k)
        rows[k:, :n] = E
        rhs = np.concatenate([ineq_bounds, eq_values])
        signs = np.where(rhs < 0, -1.0, 1.0)
        rows *= signs[:, None]
        rhs = rhs * signs

        basis = np.full(m, -1, dtype = int)
        for index in range(k):
            if (signs[index] > 0):
                basis[index] = n + index

        artificial_rows = [index for index in range(m) if basis[index] < 0]
        first_artificial = n + k
        total = first_artificial + len(artificial_rows)

        tableau = np.zeros((m + 1, total + 1))
        tableau[:m, :n + k] = rows
        tableau[:m, -1] = rhs
        for offset, index in enumerate(artificial_rows):
            tableau[index, first_artificial + offset] = 1.0
            basis[index] = first_artificial + offset

        self.__iterations = 0
        self.__dump = open(self.configuration.debug_dump, "a", encoding = "utf-8") if self.configuration.debug_dump else None

        try:
            # Phase I: maximize -sum(artificials).
            if artificial_rows:
                tableau[m, first_artificial:total] = 1.0
                for index in artificial_rows:
                    tableau[m] -= tableau[index]

                self._run(tableau, basis, total, "phase 1")

                if (tableau[m, -1] < -tolerance * max(1.0, float(np.max(np.abs(rhs), initial = 0.0)))):
                    return LpStatus.INFEASIBLE, None, None, None, self.__iterations

                tableau, basis, kept = self._drive_out_artificials(tableau, basis, first_artificial)
            else:
                kept = np.arange(m)

            # Phase II on the structural and slack columns only.
            tableau = np.hstack([tableau[:, :first_artificial], tableau[:, -1:]])
            tableau[-1] = 0.0
            tableau[-1, :n] = -c

            for row, column in enumerate(basis):
                if (tableau[-1, column] != 0.0):
                    tableau[-1] -= tableau[-1, column] * tableau[row]

            if (not self._run(tableau, basis, first_artificial, "phase 2")):
                return LpStatus.UNBOUNDED, None, None, None, self.__iterations
        finally:
            if self.__dump is not None:
                self.__dump.close()
                self.__dump = None

        x = np.zeros(n + k)
        x[basis] = tableau[:-1, -1]
        x = np.clip(x, 0.0, None)

        duals = self._recover_duals(rows[kept], np.concatenate([c, np.zeros(k)]), basis)
        full = np.zeros(m)
        full[kept] = duals
        full *= signs

        return LpStatus.OPTIMAL, x[:n], full[:k], full[k:], self.__iterations

    def _run(self, tableau: np.ndarray, basis: np.ndarray, columns: int, phase: str) -> bool:
        """(Internal) Pivots until optimal. Returns False if the objective is unbounded."""
        tolerance = self.configuration.tolerance
        rows = tableau.shape[0] - 1

        while True:
            self._dump_tableau(tableau, basis, phase)

            improving = np.nonzero(tableau[-1, :columns] < -tolerance)[0]
            if (improving.size == 0):
                return True

            entering = int(improving[0])
            column = tableau[:rows, entering]
            candidates = np.nonzero(column > tolerance)[0]

            if (candidates.size == 0):
                debug(f"> [{self.__name}]: Column {entering} is unbounded ({phase}).")
                return False

            ratios = tableau[candidates, -1] / column[candidates]
            best = np.min(ratios)
            tied = candidates[ratios <= best + tolerance * max(1.0, abs(best))]
            leaving = int(tied[np.argmin(basis[tied])])

            self._pivot(tableau, basis, leaving, entering)

    def _pivot(self, tableau: np.ndarray, basis: np.ndarray, row: int, column: int):
        self.__iterations += 1

        if (self.__iterations > self.configuration.max_iterations):
            raise NumericFailureError(f"Simplex exceeded {self.configuration.max_iterations} iterations.")

        tableau[row] /= tableau[row, column]
        factors = tableau[:, column].copy()
        factors[row] = 0.0
        tableau -= np.outer(factors, tableau[row])
        basis[row] = column

    def _drive_out_artificials(self, tableau: np.ndarray, basis: np.ndarray, first_artificial: int):
        """(Internal) Pivots artificial variables out of the basis, dropping redundant rows."""
        tolerance = self.configuration.tolerance
        kept = []

        for row in range(tableau.shape[0] - 1):
            if (basis[row] < first_artificial):
                kept.append(row)
                continue

            candidates = np.nonzero(np.abs(tableau[row, :first_artificial]) > tolerance)[0]
            if (candidates.size == 0):
                debug(f"> [{self.__name}]: Row {row} is redundant and was dropped.")
                continue

            self._pivot(tableau, basis, row, int(candidates[0]))
            kept.append(row)

        kept = np.asarray(kept, dtype = int)
        tableau = np.vstack([tableau[kept], tableau[-1:]])

        return tableau, basis[kept], kept

    def _recover_duals(self, rows: np.ndarray, costs: np.ndarray, basis: np.ndarray) -> np.ndarray:
        if (basis.size == 0):
            return np.zeros(0)

        try:
            return np.linalg.solve(rows[:, basis].T, costs[basis])
        except np.linalg.LinAlgError as e:
            raise NumericFailureError(f"Optimal basis is singular: {e}")

    def _dump_tableau(self, tableau: np.ndarray, basis: np.ndarray, phase: str):
        if self.__dump is None:
            return

        self.__dump.write(f"# {phase}, iteration {self.__iterations}, basis {basis.tolist()}\n")
        self.__dump.write(np.array2string(tableau, precision = 6, max_line_width = 200, threshold = 1_000_000))
        self.__dump.write("\n\n")
