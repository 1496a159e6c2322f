"""
    Coalition.py

    Contains the Coalition class (a set of providers encoded as a bitmask), the Routing produced by a coalition's
    optimal solve, the per-provider PayoffBreakdown accounting view and the CharacteristicFunction that maps every
    coalition to its optimal aggregated payoff.
"""

from __future__ import annotations

from typing import Iterable
from reprlib import Repr

from meshcoop.Errors import IncompleteGameError, ValidationError
from meshcoop.Utils import members_of, mask_of, GAME_TOLERANCE

class Coalition():
    """A subset of the providers {1..M}, stored as a bitmask (provider m is bit m-1)."""

    __slots__ = ("__mask",)

    def __init__(self, mask: int = 0):
        if (type(mask) != int or mask < 0):
            raise TypeError(f"mask should be a non-negative int, not {mask!r}")

        self.__mask = mask

    @staticmethod
    def of(value: Coalition | int | Iterable[int]) -> Coalition:
        """Converts a Coalition, a bitmask or an iterable of provider ids into a Coalition."""
        if (isinstance(value, Coalition)):
            return value

        if (type(value) == int):
            return Coalition(value)

        return Coalition.from_members(value)

    @staticmethod
    def from_members(members: Iterable[int]) -> Coalition:
        members = list(members)

        for member in members:
            if (type(member) != int or member < 1):
                raise TypeError(f"Provider ids should be positive ints, not {member!r}")

        return Coalition(mask_of(members))

    @staticmethod
    def grand(providers: int) -> Coalition:
        return Coalition((1 << providers) - 1)

    @staticmethod
    def singleton(provider: int) -> Coalition:
        return Coalition(1 << (provider - 1))

    def is_empty(self) -> bool:
        return self.__mask == 0

    def isdisjoint(self, other: Coalition) -> bool:
        return (self.__mask & Coalition.of(other).mask) == 0

    def issubset(self, other: Coalition) -> bool:
        return (self.__mask & ~Coalition.of(other).mask) == 0

    def with_member(self, provider: int) -> Coalition:
        return Coalition(self.__mask | (1 << (provider - 1)))

    def without_member(self, provider: int) -> Coalition:
        return Coalition(self.__mask & ~(1 << (provider - 1)))

    def label(self) -> str:
        return "{" + ", ".join(f"SP{member}" for member in self.members) + "}"

    def __contains__(self, provider: int) -> bool:
        return provider >= 1 and bool(self.__mask & (1 << (provider - 1)))

    def __or__(self, other):
        return Coalition(self.__mask | Coalition.of(other).mask)

    def __and__(self, other):
        return Coalition(self.__mask & Coalition.of(other).mask)

    def __sub__(self, other):
        return Coalition(self.__mask & ~Coalition.of(other).mask)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return bin(self.__mask).count("1")

    def __eq__(self, other):
        return isinstance(other, Coalition) and self.__mask == other.mask

    def __lt__(self, other):
        return (len(self), self.members) < (len(other), other.members)

    def __hash__(self):
        return hash(self.__mask)

    def __repr__(self):
        return "{" + ",".join(str(member) for member in self.members) + "}"

    @property
    def mask(self) -> int:
        return self.__mask

    @property
    def members(self) -> list[int]:
        """The provider ids in increasing order."""
        return members_of(self.__mask)

class Routing():
    """Per-session link flows f_(i,j)(l) and served rates r(l) of an optimal solve."""

    def __init__(self, flows: dict[tuple[str, tuple[int, int]], float] | None = None, served: dict[str, float] | None = None):
        """Creates a routing.

        Args:
            flows (``dict[tuple[str, tuple[int, int]], float] | None``, optional): Map (session id, (i, j)) to rate in Kbps. Defaults to None.
            served (``dict[str, float] | None``, optional): Map session id to served rate in Kbps. Defaults to None.
        """
        self.__flows = dict(flows or {})
        self.__served = dict(served or {})

    def flow(self, session_id: str, pair: tuple[int, int]) -> float:
        return self.__flows.get((session_id, pair), 0.0)

    def session_flows(self, session_id: str) -> dict[tuple[int, int], float]:
        return {pair: rate for (sid, pair), rate in self.__flows.items() if sid == session_id}

    def link_load(self, pair: tuple[int, int]) -> float:
        return sum(rate for (_, link), rate in self.__flows.items() if link == pair)

    def used_links(self, session_id: str, tolerance: float = GAME_TOLERANCE) -> list[tuple[int, int]]:
        """Pi(l): the links carrying a positive flow of the session."""
        return sorted(pair for pair, rate in self.session_flows(session_id).items() if rate > tolerance)

    def total_flow(self) -> float:
        return sum(self.__flows.values())

    def check(self, network, tolerance: float = GAME_TOLERANCE) -> list[str]:
        """Returns every violated routing invariant (an empty list for a feasible routing).

        Args:
            network (``Network``): The network the routing was computed on.
            tolerance (``float``, optional): Absolute tolerance. Defaults to 1e-6.

        Returns:
            ``list[str]``: Human readable descriptions of the violations.
        """
        problems = []

        for (session_id, pair), rate in self.__flows.items():
            if (rate < -tolerance):
                problems.append(f"negative flow {rate} of {session_id} on {pair}")
            if (not network.has_link(*pair)):
                problems.append(f"flow of {session_id} on missing link {pair}")

        for link in network.links:
            load = self.link_load(link.pair)
            if (load > link.capacity + tolerance):
                problems.append(f"link {link.pair} overloaded: {load} > {link.capacity}")

        for session_id, served in self.__served.items():
            session = network.session(session_id)

            if (served < -tolerance or served > session.rate_req + tolerance):
                problems.append(f"served rate {served} of {session_id} outside [0, {session.rate_req}]")

            balance = {}
            for (i, j), rate in self.session_flows(session_id).items():
                balance[i] = balance.get(i, 0.0) + rate
                balance[j] = balance.get(j, 0.0) - rate

            if (abs(balance.get(session.source, 0.0) - served) > tolerance):
                problems.append(f"source outflow of {session_id} differs from its served rate")

            for node_id, net in balance.items():
                if (node_id in (session.source, session.destination)):
                    continue
                if (abs(net) > tolerance):
                    problems.append(f"flow of {session_id} not conserved at node {node_id}")

        return problems

    def __repr__(self):
        return f"<Routing(flows={len(self.__flows)}, served={Repr().repr(self.__served)})>"

    @property
    def flows(self) -> dict[tuple[str, tuple[int, int]], float]:
        return self.__flows.copy()

    @property
    def served(self) -> dict[str, float]:
        return self.__served.copy()

class PayoffBreakdown():
    """Per-provider revenue, routing cost and net payoff of a routing.

    This is an accounting view: routing costs are charged to the owner of the transmitting node.
    """

    def __init__(self, revenue: dict[int, float], routing_cost: dict[int, float]):
        self.__revenue = dict(revenue)
        self.__routing_cost = dict(routing_cost)

    def net(self, provider: int) -> float:
        return self.__revenue.get(provider, 0.0) - self.__routing_cost.get(provider, 0.0)

    def total(self) -> float:
        return sum(self.net(provider) for provider in self.providers)

    def rows(self) -> list[tuple[int, float, float, float]]:
        """Returns (provider, revenue, routing cost, net) tuples ordered by provider."""
        return [(provider, self.__revenue.get(provider, 0.0), self.__routing_cost.get(provider, 0.0), self.net(provider)) for provider in self.providers]

    def __repr__(self):
        return f"<PayoffBreakdown({', '.join(f'SP{p}: {net:.4f}' for p, _, _, net in self.rows())})>"

    @property
    def providers(self) -> list[int]:
        return sorted(set(self.__revenue) | set(self.__routing_cost))

    @property
    def revenue(self) -> dict[int, float]:
        return self.__revenue.copy()

    @property
    def routing_cost(self) -> dict[int, float]:
        return self.__routing_cost.copy()

class CharacteristicFunction():
    """The map S -> v(S) over coalitions of M providers, with the routing and LP certificate of each solve."""

    def __init__(self, providers: int, mode: str = "elastic"):
        if (type(providers) != int or providers < 1):
            raise TypeError(f"providers should be a positive int, not {providers!r}")

        self.__providers = providers
        self.__mode = mode
        self.__values: dict[int, float] = {0: 0.0}
        self.__routings: dict[int, Routing] = {0: Routing()}
        self.__problems: dict[int, object] = {}
        self.__solutions: dict[int, object] = {}

    @staticmethod
    def from_values(providers: int, values: dict) -> CharacteristicFunction:
        """Creates a characteristic function from plain values.

        Args:
            providers (``int``): The number of providers M.
            values (``dict``): Map from a coalition (Coalition, bitmask or tuple of provider ids) to its value.

        Returns:
            ``CharacteristicFunction``: A characteristic function without routings or LP certificates.
        """
        cf = CharacteristicFunction(providers, mode = "given")

        for coalition, value in values.items():
            coalition = Coalition.of(coalition)
            if (not coalition.issubset(Coalition.grand(providers))):
                raise ValidationError("Coalition outside the provider set.", [coalition])
            cf._store(coalition.mask, float(value))

        return cf

    def _store(self, mask: int, value: float, routing: Routing | None = None, problem = None, solution = None):
        """(Internal) Records the value of a coalition. Entries are written once."""
        if (mask == 0):
            return

        self.__values.setdefault(mask, value)
        if routing is not None:
            self.__routings.setdefault(mask, routing)
        if problem is not None:
            self.__problems.setdefault(mask, problem)
        if solution is not None:
            self.__solutions.setdefault(mask, solution)

    def value(self, coalition: Coalition | int | Iterable[int]) -> float:
        mask = Coalition.of(coalition).mask

        if (mask not in self.__values):
            raise IncompleteGameError([Coalition(mask)])

        return self.__values[mask]

    def routing(self, coalition) -> Routing | None:
        return self.__routings.get(Coalition.of(coalition).mask)

    def problem(self, coalition):
        """The LpProblem solved for the coalition, if it was computed from a network."""
        return self.__problems.get(Coalition.of(coalition).mask)

    def solution(self, coalition):
        """The LpSolution of the coalition, if it was computed from a network."""
        return self.__solutions.get(Coalition.of(coalition).mask)

    def missing(self, within: Coalition | None = None) -> list[Coalition]:
        """Returns the coalitions (subsets of ``within``, by default of every provider) lacking a value."""
        universe = Coalition.of(within).mask if within is not None else Coalition.grand(self.__providers).mask
        missing = []
        sub = universe

        while sub:
            if (sub not in self.__values):
                missing.append(Coalition(sub))
            sub = (sub - 1) & universe

        return sorted(missing)

    def is_complete(self) -> bool:
        return not self.missing()

    def require_complete(self, within: Coalition | None = None) -> None:
        missing = self.missing(within)
        if missing:
            raise IncompleteGameError(missing)

    def scaled(self, factor: float) -> CharacteristicFunction:
        return CharacteristicFunction.from_values(self.__providers, {mask: value * factor for mask, value in self.__values.items()})

    def __add__(self, other: CharacteristicFunction) -> CharacteristicFunction:
        if (not isinstance(other, CharacteristicFunction) or other.providers != self.__providers):
            raise TypeError("Only characteristic functions over the same providers can be added.")

        masks = set(self.__values) | set(other.values)
        return CharacteristicFunction.from_values(self.__providers, {mask: self.__values.get(mask, 0.0) + other.values.get(mask, 0.0) for mask in masks})

    def __getitem__(self, coalition):
        return self.value(coalition)

    def __contains__(self, coalition):
        return Coalition.of(coalition).mask in self.__values

    def __len__(self):
        return len(self.__values)

    def __iter__(self):
        return iter(Coalition(mask) for mask in sorted(self.__values))

    def __repr__(self):
        pairs = ", ".join(f"{Coalition(mask)!r}: {value:.4f}" for mask, value in sorted(self.__values.items()))
        return f"<CharacteristicFunction(M={self.__providers}, mode={self.__mode}, {pairs})>"

    @property
    def providers(self) -> int:
        return self.__providers

    @property
    def mode(self) -> str:
        return self.__mode

    @property
    def grand_coalition(self) -> Coalition:
        return Coalition.grand(self.__providers)

    @property
    def values(self) -> dict[int, float]:
        """A copy of the raw bitmask -> value table (including the empty coalition)."""
        return self.__values.copy()
