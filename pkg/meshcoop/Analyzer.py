"""
    Analyzer.py

    Contains the Analyzer class, a wrapper that runs the whole cooperative analysis of a network: coalition values,
    allocations, core checks, coalition structures, plots and per-provider accounting.

    The Analyzer owns a registry of LP backends. Backends can be added and removed by name, and one of them is
    selected to solve every coalition LP of the network.
"""

from __future__ import annotations

import os

import pandas as pd
import networkx as nx
from tqdm import tqdm

from meshcoop.Allocation import Allocation, CoreReport, dual_payoff, shapley, in_core
from meshcoop.Coalition import Coalition, CharacteristicFunction, PayoffBreakdown, Routing
from meshcoop.Game import CoalitionGame, payoff_breakdown, check_superadditive, check_monotone
from meshcoop.Network import Network, NetworkSpec, Params, build_network, generate_random
from meshcoop.Partition import PayoffMatrix, structure_table
from meshcoop.Solver import ISolver, SolverConfiguration, HighsSolver, SimplexSolver
from meshcoop.Utils import log, warn, GAME_TOLERANCE
from meshcoop.Utils.Barycentric import BarycentricPoint, render_barycentric
from meshcoop.Utils.NetworkIO import write_network
from meshcoop.Utils.Topology import render_topology

METHOD_ALIASES = {"dual": "dual_payoff", "dual_payoff": "dual_payoff", "shapley": "shapley"}

class Analyzer():
    """Runs the cooperative analysis of a network with one of its registered LP backends."""

    def __init__(self, network: Network | NetworkSpec, *, mode: str = "elastic", solver: str = "highs", workers: int = 1, show_progress: bool = False):
        """Creates an analyzer with the built-in backends registered.

        Args:
            network (``Network | NetworkSpec``): The network to analyze.
            mode (``str``, optional): ``"elastic"`` or ``"strict"``. Defaults to ``"elastic"``.
            solver (``str``, optional): The name of the backend to use. Defaults to ``"highs"``.
            workers (``int``, optional): Threads used to evaluate coalitions. Defaults to 1.
            show_progress (``bool``, optional): Whether to show a progress bar while evaluating coalitions. Defaults to False.
        """
        if (isinstance(network, NetworkSpec)):
            network = build_network(network)

        if (not isinstance(network, Network)):
            raise TypeError(f"network should be a Network or a NetworkSpec, not {type(network)}")

        self.__network = network
        self.__mode = mode
        self.__workers = workers
        self.__show_progress = show_progress
        self.__solvers: dict[str, ISolver] = {}
        self.__selected = solver
        self.__game: CoalitionGame | None = None
        self.__cf: CharacteristicFunction | None = None
        self.__name = "meshcoop.Analyzer"

        self.add_default()

    def add_solver(self, name: str, solver: ISolver) -> None:
        """Registers an LP backend.

        Args:
            name (``str``): The name that identifies the backend.
            solver (``ISolver``): The backend.

        Raises:
            ``TypeError``: Raised if the backend doesn't inherit from ``ISolver``.
        """
        if (not isinstance(solver, ISolver)):
            raise TypeError("Solver must inherit from ISolver.")

        self.__solvers[name] = solver
        self._reset()

    def remove_solver(self, name: str) -> None:
        self.__solvers.pop(name)
        self._reset()

    def get_solver(self, name: str) -> ISolver | None:
        """Returns the backend registered under a name, if there is one."""
        return self.__solvers.get(name, None)

    def has_solver(self, name: str) -> bool:
        return (name in self.__solvers.keys())

    def add_default(self, configuration: SolverConfiguration | None = None):
        """Registers the built-in backends ``"highs"`` and ``"simplex"``.

        Args:
            configuration (``SolverConfiguration | None``, optional): Configuration shared by both. Defaults to None.
        """
        self.add_solver("highs", HighsSolver(configuration))
        self.add_solver("simplex", SimplexSolver(configuration))

    def use_solver(self, name: str) -> None:
        """Selects the backend used for every following solve."""
        if (not self.has_solver(name)):
            raise KeyError(f"No solver named \"{name}\". Registered: {', '.join(self.__solvers)}.")

        self.__selected = name
        self._reset()

    def _reset(self):
        self.__game = None
        self.__cf = None

    @property
    def game(self) -> CoalitionGame:
        if (self.__game is None):
            solver = self.get_solver(self.__selected)

            if (solver is None):
                raise KeyError(f"No solver named \"{self.__selected}\". Registered: {', '.join(self.__solvers)}.")

            log(f"> [{self.__name}]: Using the \"{self.__selected}\" solver.")
            self.__game = CoalitionGame(self.__network, mode = self.__mode, solver = solver)

        return self.__game

    def characteristic_function(self) -> CharacteristicFunction:
        """Evaluates (once) every coalition of the network."""
        if (self.__cf is None):
            self.__cf = self.game.characteristic_function(workers = self.__workers, show_progress = self.__show_progress)

        return self.__cf

    def value(self, coalition: Coalition | int | list[int] | None = None) -> tuple[float, Routing]:
        """Returns v(S) and its routing. Defaults to the grand coalition."""
        coalition = Coalition.of(coalition) if coalition is not None else Coalition.grand(self.__network.providers)
        return self.game.coalition_value(coalition)

    def allocate(self, method: str = "shapley") -> Allocation:
        """Divides v(M) with the dual payoff (``"dual"``) or the Shapley value (``"shapley"``)."""
        method = METHOD_ALIASES.get(method)

        if (method is None):
            raise ValueError(f"method should be one of {sorted(METHOD_ALIASES)}")

        cf = self.characteristic_function()

        if (method == "shapley"):
            return shapley(cf)

        return dual_payoff(self.__network, cf)

    def core(self, allocation: Allocation | list[float]) -> CoreReport:
        return in_core(self.characteristic_function(), allocation)

    def structures(self) -> PayoffMatrix:
        return structure_table(self.__network, self.characteristic_function())

    def plot(self, file: str | os.PathLike, methods: tuple[str, ...] = ("dual", "shapley"), title: str | None = None) -> list[BarycentricPoint]:
        """Draws the core of a three-provider game with the allocations of the given methods."""
        cf = self.characteristic_function()
        return render_barycentric(cf, [self.allocate(method) for method in methods], file, title)

    def topology(self, file: str | os.PathLike, coalition: Coalition | int | list[int] | None = None, title: str | None = None) -> dict[str, list[tuple[int, int]]]:
        """Draws the node deployment with the links used by a coalition's optimal routing (by default the grand coalition's)."""
        coalition = Coalition.grand(self.__network.providers) if coalition is None else Coalition.of(coalition)
        _, routing = self.value(coalition)
        return render_topology(self.__network, file, routing, coalition, title)

    def breakdown(self, coalition: Coalition | int | list[int] | None = None) -> PayoffBreakdown:
        """Splits the payoff of a coalition's optimal routing into per-provider revenue and cost."""
        _, routing = self.value(coalition)
        return payoff_breakdown(routing, self.__network)

    def session_table(self) -> pd.DataFrame:
        """Lists every session with its requirement, its served rate in the grand coalition and the hop count of
        its longest used path."""
        _, routing = self.value()
        records = []

        for session in self.__network.sessions:
            served = routing.served.get(session.session_id, 0.0)
            records.append({
                "session": session.session_id,
                "owner": session.owner,
                "source": session.source,
                "destination": session.destination,
                "rate_req": session.rate_req,
                "served": served,
                "hops": _longest_used_path(routing, session.session_id, session.source, session.destination)
            })

        return pd.DataFrame.from_records(records, columns = ["session", "owner", "source", "destination", "rate_req", "served", "hops"])

    @staticmethod
    def survey(seeds, *, providers: int = 3, nodes: int = 20, sessions: int = 3, params: Params | None = None, mode: str = "elastic", solver: str = "highs", output_dir: str | os.PathLike | None = None, show_progress: bool = False) -> pd.DataFrame:
        """Runs the full analysis over seeded random networks.

        Args:
            seeds (``Iterable[int]``): The seeds of the generated networks.
            providers (``int``, optional): Providers per network. Defaults to 3.
            nodes (``int``, optional): Nodes per provider. Defaults to 20.
            sessions (``int``, optional): Sessions per provider. Defaults to 3.
            params (``Params | None``, optional): Network parameters. Defaults to ``Params()``.
            mode (``str``, optional): ``"elastic"`` or ``"strict"``. Defaults to ``"elastic"``.
            solver (``str``, optional): The backend name. Defaults to ``"highs"``.
            output_dir (``str | os.PathLike | None``, optional): Where networks whose dual payoff leaves the core are written. Defaults to None.
            show_progress (``bool``, optional): Whether to show a progress bar. Defaults to False.

        Returns:
            ``pd.DataFrame``: One row per seed with columns seed, grand_value, superadditive, monotone,
            dual_in_core, dual_degenerate and shapley_in_core.
        """
        records = []

        for seed in tqdm(list(seeds), disable = not show_progress, unit = "network"):
            spec = generate_random(providers, nodes, sessions, params, seed)
            analyzer = Analyzer(spec, mode = mode, solver = solver)
            cf = analyzer.characteristic_function()

            dual = analyzer.allocate("dual")
            dual_report = in_core(cf, dual)
            shapley_report = in_core(cf, shapley(cf))

            records.append({
                "seed": seed,
                "grand_value": cf.value(cf.grand_coalition),
                "superadditive": not check_superadditive(cf, GAME_TOLERANCE),
                "monotone": not check_monotone(cf, GAME_TOLERANCE),
                "dual_in_core": dual_report.in_core,
                "dual_degenerate": dual.degenerate,
                "shapley_in_core": shapley_report.in_core
            })

            if (not dual_report.in_core):
                warn(f"> [meshcoop.Analyzer]: Dual payoff of seed {seed} is outside the core: {dual_report.violated_coalitions}")

                if (output_dir is not None):
                    os.makedirs(output_dir, exist_ok = True)
                    write_network(spec, os.path.join(output_dir, f"counterexample_seed{seed}.json"))

        return pd.DataFrame.from_records(records, columns = ["seed", "grand_value", "superadditive", "monotone", "dual_in_core", "dual_degenerate", "shapley_in_core"])

    @property
    def network(self) -> Network:
        return self.__network

    @property
    def mode(self) -> str:
        return self.__mode

    @property
    def solver(self) -> str:
        """The name of the selected backend."""
        return self.__selected

    @property
    def solvers(self) -> list[str]:
        return list(self.__solvers)

def _longest_used_path(routing: Routing, session_id: str, source: int, destination: int) -> int:
    used = nx.DiGraph(routing.used_links(session_id))

    if (source not in used or destination not in used):
        return 0

    if (nx.is_directed_acyclic_graph(used)):
        # Only paths from the source to the destination count.
        reachable = nx.descendants(used, source) & nx.ancestors(used, destination)
        dag = used.subgraph(reachable | {source, destination})
        lengths = {source: 0}
        for node in nx.topological_sort(dag):
            if node in lengths:
                for successor in dag.successors(node):
                    lengths[successor] = max(lengths.get(successor, 0), lengths[node] + 1)
        return lengths.get(destination, 0)

    return nx.shortest_path_length(used, source, destination)
