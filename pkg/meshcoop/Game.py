"""
    Game.py

    Contains the CoalitionGame class, which builds and solves the payoff linear program of every coalition of
    providers and assembles the characteristic function of the game.

    For a coalition S the program routes every session of S's members over the links between S's nodes:

        maximize   P * sum r(l) - C * sum f_(i,j)(l)
        subject to sum_j f_(s,j)(l) - r(l) = 0                   (source balance, per session)
                   sum_j f_(i,j)(l) - sum_p f_(p,i)(l) = 0        (conservation at relays, per session)
                   sum_l f_(i,j)(l) <= c_ij                       (link capacity)
                   r(l) <= R(l)                                   (demand bound, elastic mode)
                   f, r >= 0

    Flows into a session's source and out of its destination are not variables. In strict mode the served rates
    are constants ``min(R(l), F*(l))`` where ``F*(l)`` is the session's max-flow in isolation.

    Coalition evaluations are independent; ``characteristic_function`` can fan them out over a thread pool.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import networkx as nx
from scipy import sparse
from tqdm import tqdm

from meshcoop.Coalition import Coalition, Routing, PayoffBreakdown, CharacteristicFunction
from meshcoop.Errors import DomainError, SizeError, ValidationError, InfeasibleDemandError, NumericFailureError
from meshcoop.Network import Network, Params, FlowSession
from meshcoop.Solver import ISolver, LpProblem, LpSolution, LpStatus, SolverConfiguration, create_solver
from meshcoop.Utils import log, warn, debug, tolerance_for, submasks, GAME_TOLERANCE

MODES = ("elastic", "strict")

# 2^M coalitions are enumerated.
MAX_PROVIDERS = 20

# Above this many providers the O(3^M) superadditivity check is skipped unless asked for.
SUPERADDITIVITY_CHECK_LIMIT = 10

def _check_mode(mode: str) -> str:
    if (mode not in MODES):
        raise ValueError(f"mode should be one of {MODES}, not {mode!r}")
    return mode

class CoalitionGame():
    """The coalitional game played by the providers of a network."""

    def __init__(self, network: Network, *, mode: str = "elastic", solver: str | ISolver = "highs", configuration: SolverConfiguration | None = None):
        """Creates the game of a network.

        Args:
            network (``Network``): The network the providers share.
            mode (``str``, optional): ``"elastic"`` (served rates are variables) or ``"strict"``. Defaults to ``"elastic"``.
            solver (``str | ISolver``, optional): The backend name, or a solver instance used as a template. Defaults to ``"highs"``.
            configuration (``SolverConfiguration | None``, optional): Configuration for the solvers this game creates. Defaults to None.
        """
        if (not isinstance(network, Network)):
            raise TypeError(f"network should be a Network, not {type(network)}")

        self.__network = network
        self.__mode = _check_mode(mode)
        self.__solver_name = solver.name if isinstance(solver, ISolver) else solver
        self.__solver_class = type(solver) if isinstance(solver, ISolver) else None
        self.__configuration = configuration if configuration is not None else (solver.configuration if isinstance(solver, ISolver) else None)
        self.__cache: dict[tuple[int, str], tuple[float, Routing, LpProblem | None, LpSolution | None]] = {}
        self.__lock = threading.Lock()
        self.__name = "meshcoop.CoalitionGame"

        # Fail early on an unknown backend name.
        self._new_solver()

    def _new_solver(self) -> ISolver:
        """(Internal) Every evaluation gets a private solver, so evaluations can run concurrently."""
        if (self.__solver_class is not None):
            return self.__solver_class(self.__configuration)

        return create_solver(self.__solver_name, self.__configuration)

    def build_coalition_lp(self, coalition: Coalition | int, mode: str | None = None) -> LpProblem:
        """Builds the payoff linear program of a coalition.

        Args:
            coalition (``Coalition | int``): A non-empty coalition.
            mode (``str | None``, optional): Overrides the game's mode. Defaults to None.

        Raises:
            ``DomainError``: Raised if the coalition is empty.

        Returns:
            ``LpProblem``: The problem, with columns labelled ``("flow", session, (i, j))`` / ``("rate", session)``
            and rows labelled ``("source", session)``, ``("conserve", session, node)``, ``("capacity", (i, j))``
            and ``("demand", session)``.
        """
        coalition = Coalition.of(coalition)
        mode = _check_mode(mode or self.__mode)
        sub = self.__network.restrict(coalition)
        params = sub.params

        if (mode == "elastic"):
            return _assemble_lp(sub, {session.session_id: session.rate_req for session in sub.sessions}, False, params.price_per_rate, params.cost_per_rate)

        targets = {session.session_id: min(session.rate_req, self._max_rate(sub, session)) for session in sub.sessions}
        return _assemble_lp(sub, targets, True, params.price_per_rate, params.cost_per_rate)

    def coalition_value(self, coalition: Coalition | int, mode: str | None = None) -> tuple[float, Routing]:
        """Returns v(S) and an optimal routing for a coalition. Results are cached per (coalition, mode).

        Args:
            coalition (``Coalition | int``): The coalition; the empty coalition is worth 0.
            mode (``str | None``, optional): Overrides the game's mode. Defaults to None.

        Raises:
            ``InfeasibleDemandError``: Raised in strict mode if the rates cannot be served jointly.

        Returns:
            ``tuple[float, Routing]``: The value and the routing achieving it.
        """
        value, routing, _, _ = self._evaluate(Coalition.of(coalition), _check_mode(mode or self.__mode))
        return value, routing

    def solution(self, coalition: Coalition | int, mode: str | None = None) -> tuple[LpProblem | None, LpSolution | None]:
        """Returns the problem and solution behind a coalition's value (None for the empty coalition)."""
        _, _, problem, solution = self._evaluate(Coalition.of(coalition), _check_mode(mode or self.__mode))
        return problem, solution

    def _evaluate(self, coalition: Coalition, mode: str):
        key = (coalition.mask, mode)

        with self.__lock:
            if key in self.__cache:
                return self.__cache[key]

        if (coalition.is_empty()):
            result = (0.0, Routing(), None, None)
        else:
            result = self._solve(coalition, mode)

        with self.__lock:
            return self.__cache.setdefault(key, result)

    def _solve(self, coalition: Coalition, mode: str):
        problem = self.build_coalition_lp(coalition, mode)
        debug(f"> [{self.__name}]: Coalition {coalition!r} ({mode}): {problem!r}.")

        solution = self._new_solver().solve(problem)

        if (solution.status != LpStatus.OPTIMAL):
            if (mode == "strict" and solution.status == LpStatus.INFEASIBLE):
                blocking = self._blocking_sessions(coalition, problem)
                log(f"> [{self.__name}]: Strict rates of coalition {coalition!r} cannot be served jointly.")
                raise InfeasibleDemandError(f"Coalition {coalition.label()} cannot serve its strict rates jointly.", blocking)

            raise NumericFailureError(f"Coalition {coalition.label()} LP is {solution.status.value}.")

        if (solution.degenerate):
            debug(f"> [{self.__name}]: Coalition {coalition!r} has a degenerate optimum.")

        return solution.value, _routing_from(problem, solution), problem, solution

    def _blocking_sessions(self, coalition: Coalition, problem: LpProblem) -> list[str]:
        """(Internal) Sessions that cannot all reach their strict rate when throughput alone is maximized."""
        sub = self.__network.restrict(coalition)
        targets = {label[1]: float(value) for label, value in zip(problem.eq_labels, problem.eq_values) if label[0] == "source"}

        throughput = _assemble_lp(sub, targets, False, 1.0, 0.0)
        solution = self._new_solver().solve(throughput)
        served = _routing_from(throughput, solution).served

        return [session_id for session_id, target in targets.items() if served.get(session_id, 0.0) < target - tolerance_for(target)]

    def session_max_rate(self, coalition: Coalition | int, session: FlowSession | str) -> float:
        """Returns F*(l): the max-flow of a single session alone on the coalition's sub-network.

        Args:
            coalition (``Coalition | int``): The coalition.
            session (``FlowSession | str``): The session, or its id.

        Raises:
            ``DomainError``: Raised if the session is not owned by a coalition member.

        Returns:
            ``float``: The maximal rate in Kbps.
        """
        coalition = Coalition.of(coalition)
        session = session if isinstance(session, FlowSession) else self.__network.session(session)

        if (session.owner not in coalition):
            raise DomainError(f"Session {session.session_id} is not owned by a member of {coalition.label()}.")

        return self._max_rate(self.__network.restrict(coalition), session)

    def _max_rate(self, sub: Network, session: FlowSession) -> float:
        graph = sub.to_graph()
        return float(nx.maximum_flow_value(graph, session.source, session.destination, capacity = "capacity"))

    def characteristic_function(self, mode: str | None = None, *, workers: int = 1, show_progress: bool = False, check: bool | None = None) -> CharacteristicFunction:
        """Evaluates every coalition and returns the characteristic function.

        Args:
            mode (``str | None``, optional): Overrides the game's mode. Defaults to None.
            workers (``int``, optional): Number of threads evaluating coalitions. Defaults to 1.
            show_progress (``bool``, optional): Whether to show a progress bar. Defaults to False.
            check (``bool | None``, optional): Whether to warn about superadditivity violations (elastic mode only).
                Defaults to checking games of at most 10 providers.

        Raises:
            ``SizeError``: Raised if there are more than 20 providers.

        Returns:
            ``CharacteristicFunction``: v(S) for all 2^M coalitions, with routings and LP certificates.
        """
        mode = _check_mode(mode or self.__mode)
        providers = self.__network.providers

        if (providers > MAX_PROVIDERS):
            raise SizeError(f"Cannot enumerate the coalitions of {providers} providers (at most {MAX_PROVIDERS}).")

        masks = list(range(1, 1 << providers))
        log(f"> [{self.__name}]: Evaluating {len(masks)} coalitions ({mode}, {self.__solver_name}).")

        evaluate = lambda mask: self._evaluate(Coalition(mask), mode)

        if (workers > 1):
            with ThreadPoolExecutor(workers) as executor:
                results = list(tqdm(executor.map(evaluate, masks), total = len(masks), disable = not show_progress, unit = "coalition"))
        else:
            results = [evaluate(mask) for mask in tqdm(masks, disable = not show_progress, unit = "coalition")]

        cf = CharacteristicFunction(providers, mode)
        for mask, (value, routing, problem, solution) in zip(masks, results):
            cf._store(mask, value, routing, problem, solution)

        if (check is None):
            check = providers <= SUPERADDITIVITY_CHECK_LIMIT

        if (mode == "elastic" and check):
            violations = check_superadditive(cf)
            if violations:
                warn(f"> [{self.__name}]: Characteristic function is not superadditive: {violations[:3]}")

        return cf

    @property
    def network(self) -> Network:
        return self.__network

    @property
    def mode(self) -> str:
        return self.__mode

    @property
    def solver_name(self) -> str:
        return self.__solver_name

def _assemble_lp(sub: Network, rates: dict[str, float], fixed: bool, price: float, cost: float) -> LpProblem:
    """(Internal) Builds the routing program of a sub-network.

    Args:
        sub (``Network``): The coalition's sub-network.
        rates (``dict[str, float]``): Per session, the demand bound (elastic) or the fixed served rate (strict).
        fixed (``bool``): Whether served rates are constants rather than variables.
        price (``float``): Payoff per served Kbps.
        cost (``float``): Cost per Kbps per link traversal.
    """
    columns = []
    objective = []
    column_of = {}

    for session in sub.sessions:
        for link in sub.links:
            if (link.target == session.source or link.source == session.destination):
                continue
            column_of[(session.session_id, link.pair)] = len(columns)
            columns.append(("flow", session.session_id, link.pair))
            objective.append(-cost)

    rate_column = {}
    if (not fixed):
        for session in sub.sessions:
            rate_column[session.session_id] = len(columns)
            columns.append(("rate", session.session_id))
            objective.append(price)

    eq_entries, eq_values, eq_labels = [], [], []
    ineq_entries, ineq_bounds, ineq_labels = [], [], []

    def add_row(entries, row, coefficients):
        for column, value in coefficients:
            entries.append((row, column, value))

    for session in sub.sessions:
        sid = session.session_id
        incident = {}

        for (flow_sid, (i, j)), column in column_of.items():
            if (flow_sid != sid):
                continue
            incident.setdefault(i, []).append((column, 1.0))
            incident.setdefault(j, []).append((column, -1.0))

        source_row = [(column, value) for column, value in incident.get(session.source, []) if value > 0]
        if (fixed):
            add_row(eq_entries, len(eq_labels), source_row)
            eq_values.append(rates[sid])
        else:
            add_row(eq_entries, len(eq_labels), source_row + [(rate_column[sid], -1.0)])
            eq_values.append(0.0)
        eq_labels.append(("source", sid))

        for node_id in sorted(incident):
            if (node_id in (session.source, session.destination)):
                continue
            add_row(eq_entries, len(eq_labels), incident[node_id])
            eq_values.append(0.0)
            eq_labels.append(("conserve", sid, node_id))

    for link in sub.links:
        used = [(column_of[(session.session_id, link.pair)], 1.0) for session in sub.sessions if (session.session_id, link.pair) in column_of]
        if (not used):
            continue
        add_row(ineq_entries, len(ineq_labels), used)
        ineq_bounds.append(link.capacity)
        ineq_labels.append(("capacity", link.pair))

    if (not fixed):
        for session in sub.sessions:
            add_row(ineq_entries, len(ineq_labels), [(rate_column[session.session_id], 1.0)])
            ineq_bounds.append(rates[session.session_id])
            ineq_labels.append(("demand", session.session_id))

    def to_matrix(entries, rows):
        if (not entries):
            return sparse.csr_matrix((rows, len(columns)))
        row, column, value = zip(*entries)
        return sparse.csr_matrix((value, (row, column)), shape = (rows, len(columns)))

    return LpProblem(
        np.asarray(objective, dtype = float),
        to_matrix(ineq_entries, len(ineq_labels)),
        ineq_bounds,
        to_matrix(eq_entries, len(eq_labels)),
        eq_values,
        column_labels = columns,
        ineq_labels = ineq_labels,
        eq_labels = eq_labels,
        objective_constant = price * sum(rates.values()) if fixed else 0.0
    )

def _routing_from(problem: LpProblem, solution: LpSolution) -> Routing:
    flows = {}
    served = {}

    for label, value in zip(problem.column_labels, solution.primal):
        if (label[0] == "flow" and value > 1e-12):
            flows[(label[1], label[2])] = float(value)
        elif (label[0] == "rate"):
            served[label[1]] = float(value)

    for label, value in zip(problem.eq_labels, problem.eq_values):
        if (label[0] == "source" and label[1] not in served):
            served[label[1]] = float(value)

    return Routing(flows, served)

def build_coalition_lp(network: Network, coalition: Coalition | int, mode: str = "elastic") -> LpProblem:
    """Builds the payoff linear program of a coalition (see ``CoalitionGame.build_coalition_lp``)."""
    return CoalitionGame(network, mode = mode).build_coalition_lp(coalition)

def coalition_value(network: Network, coalition: Coalition | int, mode: str = "elastic", solver: str = "highs") -> tuple[float, Routing]:
    """Returns v(S) and an optimal routing (see ``CoalitionGame.coalition_value``)."""
    return CoalitionGame(network, mode = mode, solver = solver).coalition_value(coalition)

def session_max_rate(network: Network, coalition: Coalition | int, session: FlowSession | str) -> float:
    """Returns F*(l) (see ``CoalitionGame.session_max_rate``)."""
    return CoalitionGame(network).session_max_rate(coalition, session)

def characteristic_function(network: Network, mode: str = "elastic", solver: str = "highs", workers: int = 1) -> CharacteristicFunction:
    """Evaluates every coalition of a network (see ``CoalitionGame.characteristic_function``)."""
    return CoalitionGame(network, mode = mode, solver = solver).characteristic_function(workers = workers)

def payoff_breakdown(routing: Routing, network: Network, params: Params | None = None) -> PayoffBreakdown:
    """Splits the payoff of a routing into per-provider revenue and routing cost.

    Revenue ``P * served`` goes to the session's owner; the cost ``C * rate`` of every link traversal is charged
    to the owner of the transmitting node.

    Args:
        routing (``Routing``): The routing.
        network (``Network``): The network it was computed on.
        params (``Params | None``, optional): Prices to use. Defaults to the network's parameters.

    Raises:
        ``ValidationError``: Raised if the routing references unknown links or sessions.

    Returns:
        ``PayoffBreakdown``: The per-provider accounting.
    """
    params = params if params is not None else network.params
    offenders = []

    revenue = {provider: 0.0 for provider in range(1, network.providers + 1)}
    routing_cost = {provider: 0.0 for provider in range(1, network.providers + 1)}

    for session_id, rate in routing.served.items():
        try:
            revenue[network.session(session_id).owner] += params.price_per_rate * rate
        except KeyError:
            offenders.append(f"session {session_id}")

    for (session_id, pair), rate in routing.flows.items():
        if (not network.has_link(*pair)):
            offenders.append(f"link {pair}")
            continue
        routing_cost[network.owner_of(pair[0])] += params.cost_per_rate * rate

    if offenders:
        raise ValidationError("Routing references elements missing from the network.", offenders)

    return PayoffBreakdown(revenue, routing_cost)

def check_superadditive(cf: CharacteristicFunction, tolerance: float = GAME_TOLERANCE) -> list[tuple[Coalition, Coalition, float]]:
    """Lists every pair of disjoint coalitions with ``v(S u T) < v(S) + v(T)``.

    Args:
        cf (``CharacteristicFunction``): A complete characteristic function.
        tolerance (``float``, optional): Relative tolerance. Defaults to 1e-6.

    Returns:
        ``list[tuple[Coalition, Coalition, float]]``: (S, T, gap) with ``gap = v(S) + v(T) - v(S u T)``.
    """
    cf.require_complete()

    violations = []
    grand = cf.grand_coalition.mask

    for first in range(1, grand + 1):
        for second in submasks(grand & ~first):
            if (second <= first):
                continue

            combined = cf.value(first | second)
            separate = cf.value(first) + cf.value(second)

            if (combined < separate - tolerance_for(max(abs(combined), abs(separate)), tolerance)):
                violations.append((Coalition(first), Coalition(second), separate - combined))

    return violations

def check_monotone(cf: CharacteristicFunction, tolerance: float = GAME_TOLERANCE) -> list[tuple[Coalition, Coalition, float]]:
    """Lists every coalition S and one-provider extension T of S with ``v(S) > v(T)``."""
    cf.require_complete()

    violations = []
    grand = cf.grand_coalition

    for mask in range(0, grand.mask + 1):
        smaller = Coalition(mask)

        for provider in (grand - smaller).members:
            larger = smaller.with_member(provider)
            gap = cf.value(smaller) - cf.value(larger)

            if (gap > tolerance_for(max(abs(cf.value(smaller)), abs(cf.value(larger))), tolerance)):
                violations.append((smaller, larger, gap))

    return violations
