"""
    Allocation.py

    Contains the payoff allocations of the game (the dual payoff, which prices every provider's resources at the
    grand coalition's shadow prices, and the Shapley value) and the imputation and core checks.
"""

from __future__ import annotations

import json
from math import factorial
from reprlib import Repr

import numpy as np

from meshcoop.Coalition import Coalition, CharacteristicFunction
from meshcoop.Errors import DomainError, IncompleteGameError, ValidationError
from meshcoop.Network import Network
from meshcoop.Solver import LpProblem, LpSolution, HighsSolver, dual_of
from meshcoop.Utils import log, warn, submasks, tolerance_for, approx_equal, GAME_TOLERANCE

METHODS = ("dual_payoff", "shapley", "given")

class Allocation():
    """A payoff vector over the members of a coalition (by default, every provider)."""

    def __init__(self, *, method: str, payoffs: dict[int, float], degenerate: bool = False):
        """Creates a new allocation.

        Args:
            method (``str``): ``"dual_payoff"``, ``"shapley"`` or ``"given"``.
            payoffs (``dict[int, float]``): Payoff of every provider.
            degenerate (``bool``, optional): Whether another optimal dual would pay differently. Defaults to False.
        """
        if (method not in METHODS):
            raise ValueError(f"method should be one of {METHODS}, not {method!r}")

        self.__method = method
        self.__payoffs = {int(provider): float(value) for provider, value in sorted(payoffs.items())}
        self.__degenerate = degenerate

    @staticmethod
    def of(values, method: str = "given") -> Allocation:
        """Creates an allocation from a sequence (providers 1..M in order) or a provider -> payoff mapping."""
        if (isinstance(values, Allocation)):
            return values

        if (isinstance(values, dict)):
            return Allocation(method = method, payoffs = values)

        return Allocation(method = method, payoffs = {index + 1: value for index, value in enumerate(values)})

    def total(self) -> float:
        return sum(self.__payoffs.values())

    def of_coalition(self, coalition: Coalition | int) -> float:
        """x(S): the summed payoff of a coalition's members."""
        return sum(self.__payoffs.get(member, 0.0) for member in Coalition.of(coalition))

    def as_list(self) -> list[float]:
        return list(self.__payoffs.values())

    def __getitem__(self, provider: int) -> float:
        return self.__payoffs[provider]

    def __len__(self):
        return len(self.__payoffs)

    def __repr__(self):
        rep = Repr()
        return f"<Allocation(method={self.__method}, payoffs={rep.repr(self.__payoffs)}, degenerate={self.__degenerate})>"

    def __str__(self):
        return json.dumps({"method": self.__method, "payoffs": self.__payoffs, "degenerate": self.__degenerate})

    @property
    def method(self) -> str:
        return self.__method

    @property
    def payoffs(self) -> dict[int, float]:
        return self.__payoffs.copy()

    @property
    def providers(self) -> list[int]:
        return list(self.__payoffs)

    @property
    def coalition(self) -> Coalition:
        """The coalition the allocation divides the value of."""
        return Coalition.from_members(self.__payoffs)

    @property
    def degenerate(self) -> bool:
        """True when another optimal dual of the same LP would give different payoffs."""
        return self.__degenerate

class CoreReport():
    """The outcome of checking an allocation against the core."""

    def __init__(self, *, is_imputation: bool, efficiency_gap: float, violated_coalitions: list[tuple[Coalition, float]]):
        self.__is_imputation = is_imputation
        self.__efficiency_gap = efficiency_gap
        self.__violated = list(violated_coalitions)

    def __repr__(self):
        return f"<CoreReport(in_core={self.in_core}, is_imputation={self.__is_imputation}, efficiency_gap={self.__efficiency_gap:.6g}, violated={self.__violated})>"

    def __bool__(self):
        return self.in_core

    @property
    def is_imputation(self) -> bool:
        return self.__is_imputation

    @property
    def efficiency_gap(self) -> float:
        """|x(M) - v(M)|"""
        return self.__efficiency_gap

    @property
    def violated_coalitions(self) -> list[tuple[Coalition, float]]:
        """Each coalition S with ``x(S) < v(S)``, with its deficit ``v(S) - x(S)``."""
        return list(self.__violated)

    @property
    def in_core(self) -> bool:
        return self.__is_imputation and not self.__violated

def marginal_contribution(cf: CharacteristicFunction, provider: int, coalition: Coalition | int) -> float:
    """Returns Δ_m(v, S) = v(S u {m}) - v(S).

    Raises:
        ``DomainError``: Raised if m already belongs to S.
    """
    coalition = Coalition.of(coalition)

    if (provider in coalition):
        raise DomainError(f"Provider {provider} already belongs to {coalition.label()}.")

    return cf.value(coalition.with_member(provider)) - cf.value(coalition)

def shapley(cf: CharacteristicFunction, players: Coalition | int | None = None) -> Allocation:
    """Computes the Shapley value of a game.

    Every provider's marginal contributions are weighted by ``|S|! (n - |S| - 1)!`` as exact integers and
    divided by ``n!`` once at the end.

    Args:
        cf (``CharacteristicFunction``): The game.
        players (``Coalition | int | None``, optional): Restricts the game to the subsets of a coalition. Defaults to every provider.

    Raises:
        ``IncompleteGameError``: Raised if a coalition the value depends on is missing.

    Returns:
        ``Allocation``: The Shapley value, one payoff per player.
    """
    players = Coalition.of(players) if players is not None else cf.grand_coalition
    cf.require_complete(players)

    n = len(players)
    weights = [factorial(size) * factorial(n - size - 1) for size in range(n)]
    denominator = factorial(n)
    payoffs = {}

    for member in players:
        others = players.without_member(member)
        weighted = weights[0] * marginal_contribution(cf, member, Coalition())

        for mask in submasks(others.mask):
            coalition = Coalition(mask)
            weighted += weights[len(coalition)] * marginal_contribution(cf, member, coalition)

        payoffs[member] = weighted / denominator

    return Allocation(method = "shapley", payoffs = payoffs)

def _payoff_terms(network: Network, cf: CharacteristicFunction, coalition: Coalition, problem: LpProblem) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Internal) Each member's payoff as ``ineq @ dual_ineq + eq @ dual_eq + constant``, one row per member."""
    index = {member: row for row, member in enumerate(coalition.members)}
    ineq = np.zeros((len(index), problem.ineq_count))
    eq = np.zeros((len(index), problem.eq_count))
    constant = np.zeros(len(index))

    for column, (label, bound) in enumerate(zip(problem.ineq_labels, problem.ineq_bounds)):
        if (label[0] == "capacity"):
            ineq[index[network.owner_of(label[1][0])], column] = bound
        elif (label[0] == "demand"):
            ineq[index[network.session(label[1]).owner], column] = bound

    if (cf.mode == "strict"):
        price = network.params.price_per_rate
        for column, (label, rate) in enumerate(zip(problem.eq_labels, problem.eq_values)):
            if (label[0] == "source"):
                row = index[network.session(label[1]).owner]
                eq[row, column] = rate
                constant[row] += price * rate

    return ineq, eq, constant

def _payoffs_are_unique(problem: LpProblem, solution: LpSolution, ineq: np.ndarray, eq: np.ndarray, tolerance: float) -> bool:
    """(Internal) Checks that every optimal dual solution gives the same payoffs.

    Each member's payoff is maximized and minimized over the optimal face of the dual LP, the dual constraints
    plus ``b.y + d.z`` fixed at the optimal value.
    """
    sign = 1.0 if problem.sense == "max" else -1.0
    dual = dual_of(problem)
    face = np.concatenate([problem.ineq_bounds, problem.eq_values, -problem.eq_values]).reshape(1, -1)
    target = sign * float(solution.dual_ineq @ problem.ineq_bounds + solution.dual_eq @ problem.eq_values)
    weights = sign * np.hstack([ineq, eq, -eq])
    reference = ineq @ solution.dual_ineq + eq @ solution.dual_eq
    solver = HighsSolver()

    for weight, expected in zip(weights, reference):
        for sense in ("max", "min"):
            bound = solver.solve(LpProblem(weight, dual.ineq_matrix, dual.ineq_bounds, face, [target], sense = sense))
            if (not bound.is_optimal or abs(bound.value - expected) > tolerance):
                return False

    return True

def dual_payoff(network: Network, cf: CharacteristicFunction, coalition: Coalition | int | None = None, check_unique: bool = True) -> Allocation:
    """Prices every provider's resources at the optimal duals of a coalition's LP.

    A provider is paid ``pi_ij * c_ij`` for every link its nodes transmit on, plus, per owned session,
    ``delta_l * R(l)`` (elastic mode, with delta_l the multiplier of the demand bound) or ``(P + z_l) * r(l)``
    (strict mode, with z_l the multiplier of the source balance). By strong duality the payoffs sum to v(S).

    Optimal duals need not be unique. With ``check_unique`` every member's payoff is also bounded over the whole
    optimal dual face, and the allocation is flagged as degenerate when another optimal dual pays differently.

    Args:
        network (``Network``): The network the game was computed on.
        cf (``CharacteristicFunction``): A characteristic function holding the coalition's LP and solution.
        coalition (``Coalition | int | None``, optional): The coalition to divide. Defaults to the grand coalition.
        check_unique (``bool``, optional): Whether to check that the payoffs do not depend on the chosen dual. Defaults to True.

    Raises:
        ``IncompleteGameError``: Raised if the coalition's LP solution is not available.

    Returns:
        ``Allocation``: The dual payoff of the coalition's members.
    """
    coalition = Coalition.of(coalition) if coalition is not None else cf.grand_coalition
    problem = cf.problem(coalition)
    solution = cf.solution(coalition)

    if (problem is None or solution is None):
        raise IncompleteGameError([coalition])

    ineq, eq, constant = _payoff_terms(network, cf, coalition, problem)
    values = ineq @ solution.dual_ineq + eq @ solution.dual_eq + constant
    payoffs = {member: float(value) for member, value in zip(coalition.members, values)}

    degenerate = False
    if (check_unique and solution.degenerate):
        degenerate = not _payoffs_are_unique(problem, solution, ineq, eq, tolerance_for(cf.value(coalition)))

    allocation = Allocation(method = "dual_payoff", payoffs = payoffs, degenerate = degenerate)

    if (not approx_equal(allocation.total(), cf.value(coalition))):
        warn(f"> [meshcoop.Allocation]: Dual payoff of {coalition!r} sums to {allocation.total()}, not {cf.value(coalition)}.")

    if (degenerate):
        warn(f"> [meshcoop.Allocation]: Dual payoff of {coalition!r} depends on which optimal dual was picked.")

    return allocation

def _check_length(cf: CharacteristicFunction, allocation: Allocation):
    if (set(allocation.providers) != set(cf.grand_coalition)):
        raise ValidationError(f"Allocation should have one payoff per provider 1..{cf.providers}.", allocation.providers)

def is_imputation(cf: CharacteristicFunction, allocation: Allocation | list[float], tolerance: float = GAME_TOLERANCE) -> bool:
    """Returns True if an allocation is efficient and individually rational.

    Args:
        cf (``CharacteristicFunction``): The game.
        allocation (``Allocation | list[float]``): The payoffs of providers 1..M.
        tolerance (``float``, optional): Relative tolerance. Defaults to 1e-6.

    Returns:
        ``bool``: Whether ``x(M) == v(M)`` and ``x_m >= v({m})`` for every provider.
    """
    allocation = Allocation.of(allocation)
    _check_length(cf, allocation)

    if (not approx_equal(allocation.total(), cf.value(cf.grand_coalition), tolerance)):
        return False

    for provider in cf.grand_coalition:
        standalone = cf.value(Coalition.singleton(provider))
        if (allocation[provider] < standalone - tolerance_for(standalone, tolerance)):
            return False

    return True

def in_core(cf: CharacteristicFunction, allocation: Allocation | list[float], tolerance: float = GAME_TOLERANCE) -> CoreReport:
    """Checks an allocation against every coalition of the game.

    Args:
        cf (``CharacteristicFunction``): A complete game.
        allocation (``Allocation | list[float]``): The payoffs of providers 1..M.
        tolerance (``float``, optional): Relative tolerance. Defaults to 1e-6.

    Returns:
        ``CoreReport``: Imputation flag, efficiency gap and every coalition S with ``x(S) < v(S)``.
    """
    allocation = Allocation.of(allocation)
    _check_length(cf, allocation)
    cf.require_complete()

    grand = cf.grand_coalition
    violated = []

    for mask in sorted(submasks(grand.mask)):
        coalition = Coalition(mask)
        value = cf.value(coalition)
        deficit = value - allocation.of_coalition(coalition)

        if (deficit > tolerance_for(value, tolerance)):
            violated.append((coalition, deficit))

    return CoreReport(
        is_imputation = is_imputation(cf, allocation, tolerance),
        efficiency_gap = abs(allocation.total() - cf.value(grand)),
        violated_coalitions = violated
    )
