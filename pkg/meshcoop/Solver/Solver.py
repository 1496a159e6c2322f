"""
    Solver.py

    Contains the LpProblem and LpSolution classes, the ISolver interface to be used for creating LP backends and
    the SolverConfiguration class for configuring them.

    Every backend receives the same maximization problem (``max c.x + constant`` subject to ``A x <= b``,
    ``E x = d`` and ``x >= 0``) and must return primal and dual optimal solutions, which are certified in one
    place (``LpSolution.verify``) so that all backends behave uniformly.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from enum import Enum
from typing import Callable, Any

import numpy as np
from scipy import sparse

from meshcoop.Errors import ValidationError, NumericFailureError
from meshcoop.Utils import log, warn, debug, FEASIBILITY_TOLERANCE, GAME_TOLERANCE

class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"

def _as_matrix(matrix, columns: int) -> sparse.csr_matrix:
    if matrix is None:
        return sparse.csr_matrix((0, columns))

    if sparse.issparse(matrix):
        return sparse.csr_matrix(matrix, dtype = float)

    array = np.asarray(matrix, dtype = float)
    if (array.size == 0):
        return sparse.csr_matrix((0, columns))

    return sparse.csr_matrix(np.atleast_2d(array))

class LpProblem():
    """A linear program ``optimize c.x + constant`` s.t. ``A x <= b``, ``E x = d``, ``x >= 0``.

    Rows and columns can carry opaque labels linking them back to network constraints.
    """

    def __init__(self, objective, ineq_matrix = None, ineq_bounds = None, eq_matrix = None, eq_values = None, *, column_labels: list | None = None, ineq_labels: list | None = None, eq_labels: list | None = None, objective_constant: float = 0.0, sense: str = "max"):
        """Creates and validates a linear program.

        Args:
            objective (``array-like``): The objective coefficients c (length n).
            ineq_matrix (``array-like | sparse``, optional): The matrix A of the ``<=`` rows. Defaults to None.
            ineq_bounds (``array-like``, optional): The right-hand side b. Defaults to None.
            eq_matrix (``array-like | sparse``, optional): The matrix E of the equality rows. Defaults to None.
            eq_values (``array-like``, optional): The right-hand side d. Defaults to None.
            column_labels (``list | None``, optional): One label per variable. Defaults to None.
            ineq_labels (``list | None``, optional): One label per inequality row. Defaults to None.
            eq_labels (``list | None``, optional): One label per equality row. Defaults to None.
            objective_constant (``float``, optional): A constant added to the objective value. Defaults to 0.
            sense (``str``, optional): ``"max"`` or ``"min"``. Defaults to ``"max"``.

        Raises:
            ``ValidationError``: Raised if dimensions disagree or a coefficient is not finite.
        """
        self.__objective = np.asarray(objective, dtype = float).reshape(-1)
        columns = self.__objective.shape[0]

        self.__ineq_matrix = _as_matrix(ineq_matrix, columns)
        self.__ineq_bounds = np.asarray(ineq_bounds if ineq_bounds is not None else [], dtype = float).reshape(-1)
        self.__eq_matrix = _as_matrix(eq_matrix, columns)
        self.__eq_values = np.asarray(eq_values if eq_values is not None else [], dtype = float).reshape(-1)
        self.__objective_constant = float(objective_constant)
        self.__sense = sense

        self.__column_labels = list(column_labels) if column_labels is not None else list(range(columns))
        self.__ineq_labels = list(ineq_labels) if ineq_labels is not None else list(range(self.__ineq_bounds.shape[0]))
        self.__eq_labels = list(eq_labels) if eq_labels is not None else list(range(self.__eq_values.shape[0]))

        self._validate()

    @staticmethod
    def from_rows(objective, ineq_rows: list[tuple[list[float], float]] = (), eq_rows: list[tuple[list[float], float]] = (), **kwargs) -> LpProblem:
        """Creates a problem from lists of ``(row, bound)`` pairs."""
        columns = len(objective)
        ineq_rows = list(ineq_rows)
        eq_rows = list(eq_rows)

        return LpProblem(
            objective,
            [row for row, _ in ineq_rows] if ineq_rows else np.zeros((0, columns)),
            [bound for _, bound in ineq_rows],
            [row for row, _ in eq_rows] if eq_rows else np.zeros((0, columns)),
            [value for _, value in eq_rows],
            **kwargs
        )

    def _validate(self):
        problems = []
        columns = self.columns

        if (self.__sense not in ("max", "min")):
            problems.append(f"sense must be 'max' or 'min', not {self.__sense!r}")
        if (self.__ineq_matrix.shape != (self.__ineq_bounds.shape[0], columns)):
            problems.append(f"inequality block has shape {self.__ineq_matrix.shape}, expected ({self.__ineq_bounds.shape[0]}, {columns})")
        if (self.__eq_matrix.shape != (self.__eq_values.shape[0], columns)):
            problems.append(f"equality block has shape {self.__eq_matrix.shape}, expected ({self.__eq_values.shape[0]}, {columns})")
        if (len(self.__column_labels) != columns):
            problems.append("column labels do not match the variable count")
        if (len(self.__ineq_labels) != self.__ineq_bounds.shape[0] or len(self.__eq_labels) != self.__eq_values.shape[0]):
            problems.append("row labels do not match the row count")

        for name, values in [("objective", self.__objective), ("inequality bounds", self.__ineq_bounds), ("equality values", self.__eq_values), ("inequality matrix", self.__ineq_matrix.data), ("equality matrix", self.__eq_matrix.data)]:
            if (not np.all(np.isfinite(values))):
                problems.append(f"{name} contain non-finite values")

        if problems:
            raise ValidationError("Invalid linear program.", problems)

    def max_form_objective(self) -> np.ndarray:
        """The objective of the equivalent maximization problem."""
        return self.__objective if self.__sense == "max" else -self.__objective

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        return self.__ineq_matrix.toarray(), self.__eq_matrix.toarray()

    def __repr__(self):
        return f"<LpProblem({self.__sense}, variables={self.columns}, ineq_rows={self.ineq_count}, eq_rows={self.eq_count}, nonzeros={self.nonzeros})>"

    @property
    def objective(self) -> np.ndarray:
        return self.__objective

    @property
    def ineq_matrix(self) -> sparse.csr_matrix:
        return self.__ineq_matrix

    @property
    def ineq_bounds(self) -> np.ndarray:
        return self.__ineq_bounds

    @property
    def eq_matrix(self) -> sparse.csr_matrix:
        return self.__eq_matrix

    @property
    def eq_values(self) -> np.ndarray:
        return self.__eq_values

    @property
    def objective_constant(self) -> float:
        return self.__objective_constant

    @property
    def sense(self) -> str:
        return self.__sense

    @property
    def columns(self) -> int:
        return self.__objective.shape[0]

    @property
    def ineq_count(self) -> int:
        return self.__ineq_bounds.shape[0]

    @property
    def eq_count(self) -> int:
        return self.__eq_values.shape[0]

    @property
    def nonzeros(self) -> int:
        return int(self.__ineq_matrix.nnz + self.__eq_matrix.nnz)

    @property
    def column_labels(self) -> list:
        return list(self.__column_labels)

    @property
    def ineq_labels(self) -> list:
        return list(self.__ineq_labels)

    @property
    def eq_labels(self) -> list:
        return list(self.__eq_labels)

class LpSolution():
    """The outcome of a solve: status, optimal value, primal point and one multiplier per row.

    Multipliers follow the problem's own sense, so that ``value == constant + dual_ineq.b + dual_eq.d``
    holds at an optimum. The multipliers can only be non-unique at a degenerate vertex, which ``degenerate`` flags.
    """

    def __init__(self, *, status: LpStatus, value: float = float("nan"), primal = None, dual_ineq = None, dual_eq = None, iterations: int = 0, degenerate: bool = False, solver: str = ""):
        self.__status = LpStatus(status)
        self.__value = float(value)
        self.__primal = np.asarray(primal if primal is not None else [], dtype = float)
        self.__dual_ineq = np.asarray(dual_ineq if dual_ineq is not None else [], dtype = float)
        self.__dual_eq = np.asarray(dual_eq if dual_eq is not None else [], dtype = float)
        self.__iterations = iterations
        self.__degenerate = degenerate
        self.__solver = solver

    def verify(self, lp: LpProblem, tolerance: float = GAME_TOLERANCE) -> list[str]:
        """Checks the optimality certificate of the solution against its problem.

        Checks primal feasibility, dual feasibility, complementary slackness and strong duality, each with the
        hybrid tolerance ``tolerance * max(1, scale)``.

        Args:
            lp (``LpProblem``): The problem that was solved.
            tolerance (``float``, optional): The relative tolerance. Defaults to 1e-6.

        Returns:
            ``list[str]``: The violated conditions; empty if the certificate holds or the status is not optimal.
        """
        if (self.__status != LpStatus.OPTIMAL):
            return []

        problems = []
        sign = 1.0 if lp.sense == "max" else -1.0
        c = lp.max_form_objective()
        x = self.__primal
        y = sign * self.__dual_ineq
        z = sign * self.__dual_eq

        scale = max(1.0, float(np.max(np.abs(c), initial = 0.0)), float(np.max(np.abs(lp.ineq_bounds), initial = 0.0)), float(np.max(np.abs(lp.eq_values), initial = 0.0)))
        allowed = tolerance * scale

        if (x.shape[0] != lp.columns or y.shape[0] != lp.ineq_count or z.shape[0] != lp.eq_count):
            return ["solution dimensions do not match the problem"]

        slack = lp.ineq_bounds - lp.ineq_matrix @ x
        residual = lp.eq_matrix @ x - lp.eq_values
        reduced = lp.ineq_matrix.T @ y + lp.eq_matrix.T @ z - c

        if (np.min(x, initial = 0.0) < -allowed):
            problems.append(f"primal variable below zero by {-np.min(x)}")
        if (np.min(slack, initial = 0.0) < -allowed):
            problems.append(f"inequality violated by {-np.min(slack)}")
        if (np.max(np.abs(residual), initial = 0.0) > allowed):
            problems.append(f"equality violated by {np.max(np.abs(residual))}")
        if (np.min(y, initial = 0.0) < -allowed):
            problems.append(f"inequality multiplier below zero by {-np.min(y)}")
        if (np.min(reduced, initial = 0.0) < -allowed):
            problems.append(f"dual constraint violated by {-np.min(reduced)}")
        if (np.max(np.abs(y * slack), initial = 0.0) > allowed * scale):
            problems.append("complementary slackness violated on inequality rows")
        if (np.max(np.abs(x * reduced), initial = 0.0) > allowed * scale):
            problems.append("complementary slackness violated on variables")

        primal_value = float(c @ x)
        dual_value = float(y @ lp.ineq_bounds + z @ lp.eq_values)
        if (abs(primal_value - dual_value) > tolerance * max(1.0, abs(primal_value))):
            problems.append(f"duality gap {abs(primal_value - dual_value)} exceeds tolerance")

        return problems

    def dual_value(self, lp: LpProblem) -> float:
        return lp.objective_constant + float(self.__dual_ineq @ lp.ineq_bounds + self.__dual_eq @ lp.eq_values)

    def __repr__(self):
        return f"<LpSolution(status={self.__status.value}, value={self.__value:.6f}, iterations={self.__iterations}, degenerate={self.__degenerate}, solver={self.__solver!r})>"

    def __eq__(self, other):
        return (isinstance(other, LpSolution)
                and self.__status == other.status
                and (self.__value == other.value or (np.isnan(self.__value) and np.isnan(other.value)))
                and np.array_equal(self.__primal, other.primal)
                and np.array_equal(self.__dual_ineq, other.dual_ineq)
                and np.array_equal(self.__dual_eq, other.dual_eq))

    @property
    def status(self) -> LpStatus:
        return self.__status

    @property
    def is_optimal(self) -> bool:
        return self.__status == LpStatus.OPTIMAL

    @property
    def value(self) -> float:
        return self.__value

    @property
    def primal(self) -> np.ndarray:
        return self.__primal.copy()

    @property
    def dual_ineq(self) -> np.ndarray:
        return self.__dual_ineq.copy()

    @property
    def dual_eq(self) -> np.ndarray:
        return self.__dual_eq.copy()

    @property
    def iterations(self) -> int:
        return self.__iterations

    @property
    def degenerate(self) -> bool:
        return self.__degenerate

    @property
    def solver(self) -> str:
        return self.__solver

class SolverConfiguration():
    """A class for configuring solver properties"""

    def __init__(self, callback: Callable[[str, Any], None] = None):
        """Initializes the configuration object.

        Args:
            callback (``Callable[[str, Any], None]``, optional): Callback function to execute when a change to the settings is made. Defaults to None.
        """
        self.__config = {}
        self.__config["tolerance"] = FEASIBILITY_TOLERANCE
        self.__config["gap_tolerance"] = GAME_TOLERANCE
        self.__config["max_iterations"] = 100000
        self.__config["debug_dump"] = None
        self.__config["verify"] = True
        self.__callback = callback

    def set_config(self, key: str, value):
        """Sets the value for a setting.

        Args:
            key (``str``): The name of the setting.
            value (``Any``): The value for the setting.

        Raises:
            ``ValueError``: Raised if the setting does not exist.
        """
        if (key not in self.__config):
            raise ValueError(f"Invalid key \"{key}\".")

        if (key in ["tolerance", "gap_tolerance"] and (type(value) not in [int, float] or value <= 0)):
            raise ValueError(f"{key} should be a positive number, not {value!r}.")

        self.__config[key] = value

        if (callable(self.__callback)):
            self.__callback(key, value)

    def get_config(self, key: str, default_value = None):
        """Returns the value of a setting, or the default value if the setting does not exist."""
        return self.__config.get(key, default_value)

    def _set_property(self, key: str, default_value):
        """(Internal) Used by solvers to add the settings they require.

        ATTENTION! Do not use this function, use ``set_config`` instead.
        """
        self.__config[key] = default_value

    def copy(self) -> SolverConfiguration:
        clone = SolverConfiguration()
        for key, value in self.__config.items():
            clone._set_property(key, value)
        return clone

    def __getitem__(self, key: str):
        return self.get_config(key)

    @property
    def tolerance(self) -> float:
        return self.__config["tolerance"]

    @property
    def gap_tolerance(self) -> float:
        return self.__config["gap_tolerance"]

    @property
    def max_iterations(self) -> int:
        return self.__config["max_iterations"]

    @property
    def debug_dump(self) -> str | None:
        return self.__config["debug_dump"]

    @property
    def verify(self) -> bool:
        return self.__config["verify"]

class ISolver(ABC):
    """
        All solvers solve the maximization form ``max c.x`` s.t. ``A x <= b``, ``E x = d``, ``x >= 0`` and report
        one multiplier per row. The conversion from the problem's own sense, the trivial cases and the certificate
        check are shared; backends only implement ``_solve_max``.
    """

    def __init__(self, configuration: SolverConfiguration | None = None):
        self.__config = configuration.copy() if configuration is not None else SolverConfiguration()
        self.__name = f"meshcoop.Solver.{self.__class__.__name__}"

    @property
    @abstractmethod
    def name(self) -> str:
        """The short name the solver is registered under."""
        ...

    @abstractmethod
    def _solve_max(self, c: np.ndarray, ineq_matrix: sparse.csr_matrix, ineq_bounds: np.ndarray, eq_matrix: sparse.csr_matrix, eq_values: np.ndarray) -> tuple[LpStatus, np.ndarray | None, np.ndarray | None, np.ndarray | None, int]:
        """(Internal) Solves the maximization form.

        Returns:
            ``tuple``: ``(status, x, y, z, iterations)``; x, y and z are None unless the status is optimal.
        """
        ...

    def solve(self, lp: LpProblem) -> LpSolution:
        """Solves a linear program.

        Infeasibility and unboundedness are reported through ``LpSolution.status``.

        Args:
            lp (``LpProblem``): The problem to solve.

        Raises:
            ``NumericFailureError``: Raised if the backend fails or its solution cannot be certified.

        Returns:
            ``LpSolution``: The solution with its primal and dual certificates.
        """
        if (not isinstance(lp, LpProblem)):
            raise TypeError(f"lp should be an LpProblem, not {type(lp)}")

        debug(f"> [{self.__name}]: Solving {lp!r}.")

        c = lp.max_form_objective()

        if (lp.columns == 0):
            status, x, y, z, iterations = self._solve_empty(lp)
        else:
            status, x, y, z, iterations = self._solve_max(c, lp.ineq_matrix, lp.ineq_bounds, lp.eq_matrix, lp.eq_values)

        if (status != LpStatus.OPTIMAL):
            log(f"> [{self.__name}]: Problem is {status.value}.")
            return LpSolution(status = status, iterations = iterations, solver = self.name)

        sign = 1.0 if lp.sense == "max" else -1.0
        value = sign * float(c @ x) + lp.objective_constant

        solution = LpSolution(
            status = status,
            value = value,
            primal = x,
            dual_ineq = sign * y,
            dual_eq = sign * z,
            iterations = iterations,
            degenerate = self._is_degenerate(lp, x),
            solver = self.name
        )

        if (self.configuration.verify):
            problems = solution.verify(lp, self.configuration.gap_tolerance)
            if problems:
                raise NumericFailureError(f"{self.name} returned an uncertified solution: {'; '.join(problems)}")

        return solution

    def _solve_empty(self, lp: LpProblem):
        """(Internal) A problem without variables is feasible iff every row holds at x = ()."""
        tolerance = self.configuration.tolerance
        feasible = np.all(lp.ineq_bounds >= -tolerance) and np.all(np.abs(lp.eq_values) <= tolerance)

        if (not feasible):
            return LpStatus.INFEASIBLE, None, None, None, 0

        return LpStatus.OPTIMAL, np.zeros(0), np.zeros(lp.ineq_count), np.zeros(lp.eq_count), 0

    def _is_degenerate(self, lp: LpProblem, x: np.ndarray) -> bool:
        """(Internal) Fewer strictly positive variables and slacks than rows means a degenerate vertex."""
        tolerance = self.configuration.tolerance * 1e3
        slack = lp.ineq_bounds - lp.ineq_matrix @ x
        positive = int(np.sum(x > tolerance) + np.sum(slack > tolerance))

        degenerate = positive < lp.ineq_count + lp.eq_count
        if degenerate:
            debug(f"> [{self.__name}]: Degenerate optimum, dual multipliers may not be unique.")

        return degenerate

    @property
    def configuration(self) -> SolverConfiguration:
        """The solver configuration object."""
        return self.__config

def dual_of(lp: LpProblem) -> LpProblem:
    """Returns the textbook dual of a problem, expressed as another LpProblem.

    For the maximization form ``max c.x`` s.t. ``A x <= b``, ``E x = d``, ``x >= 0`` the dual is
    ``min b.y + d.z`` s.t. ``A^T y + E^T z >= c``, ``y >= 0``, ``z`` free. The free ``z`` is split into
    ``z+ - z-`` and the ``>=`` rows are negated so that the result only uses ``<=`` rows. The sense is chosen
    so that the dual's reported optimal value equals the primal's.

    Args:
        lp (``LpProblem``): The primal problem.

    Returns:
        ``LpProblem``: The dual problem, with columns labelled ``("y", row)``, ``("z+", row)`` and ``("z-", row)``.
    """
    if (not isinstance(lp, LpProblem)):
        raise TypeError(f"lp should be an LpProblem, not {type(lp)}")

    c = lp.max_form_objective()
    blocks = [block for block in (lp.ineq_matrix.T, lp.eq_matrix.T, -lp.eq_matrix.T) if block.shape[1] > 0]
    transposed = sparse.hstack(blocks, format = "csr") if blocks else sparse.csr_matrix((lp.columns, 0))
    objective = np.concatenate([lp.ineq_bounds, lp.eq_values, -lp.eq_values])

    labels = [("y", label) for label in lp.ineq_labels] + [("z+", label) for label in lp.eq_labels] + [("z-", label) for label in lp.eq_labels]

    return LpProblem(
        objective if lp.sense == "max" else -objective,
        -transposed,
        -c,
        column_labels = labels,
        ineq_labels = [("dual", label) for label in lp.column_labels],
        objective_constant = lp.objective_constant,
        sense = "min" if lp.sense == "max" else "max"
    )
