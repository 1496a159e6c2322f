"""
    Network.py

    Contains the classes describing a multi-provider wireless mesh network: the shared Params, the Node, Link
    and FlowSession records, the NetworkSpec (the serializable description of a network) and the Network
    (the ``NetworkSpec`` plus its derived, capacity-labelled directed links).

    Link capacities follow the Shannon formula with a distance-power gain model. Every band is assumed to be
    interference free, so capacities are independent per directed link.

    This script relies on numpy for seeded random generation and on networkx for graph views of a network.
"""

from __future__ import annotations

import json
import math
from reprlib import Repr

import numpy as np
import networkx as nx

from meshcoop.Errors import ValidationError, DomainError
from meshcoop.Coalition import Coalition

class Params():
    """The physical and economic parameters shared by every node of a network."""

    def __init__(self, *, price_per_rate: float = 10.0, cost_per_rate: float = 1.0, bandwidth: float = 200e3, tx_range: float = 150.0, gain_coeff: float = 62.5, gain_exponent: float = 4.0, tx_power: float = 1.0, noise_power: float = 1e-10, area_side: float = 600.0, rate_req_range: tuple[float, float] = (20.0, 80.0)):
        """Creates a new parameter set.

        Args:
            price_per_rate (``float``, optional): Payoff P earned per Kbps served. Defaults to 10.
            cost_per_rate (``float``, optional): Cost C per Kbps transmitted by a node, per hop. Defaults to 1.
            bandwidth (``float``, optional): Bandwidth W of the band assigned to a link, in Hz. Defaults to 200 kHz.
            tx_range (``float``, optional): Transmission range in meters. Defaults to 150.
            gain_coeff (``float``, optional): Coefficient of the propagation gain ``g = k * d^-a``. Defaults to 62.5.
            gain_exponent (``float``, optional): Exponent of the propagation gain. Defaults to 4.
            tx_power (``float``, optional): Transmit power in watts. Defaults to 1.
            noise_power (``float``, optional): Noise power in watts. Defaults to 1e-10.
            area_side (``float``, optional): Side of the square deployment area in meters. Defaults to 600.
            rate_req_range (``tuple[float, float]``, optional): Range of random rate requirements in Kbps. Defaults to (20, 80).

        Raises:
            ``ValidationError``: Raised if any parameter violates its invariant.
        """
        self.__params = {}
        self.__params["price_per_rate"] = float(price_per_rate)
        self.__params["cost_per_rate"] = float(cost_per_rate)
        self.__params["bandwidth"] = float(bandwidth)
        self.__params["tx_range"] = float(tx_range)
        self.__params["gain_coeff"] = float(gain_coeff)
        self.__params["gain_exponent"] = float(gain_exponent)
        self.__params["tx_power"] = float(tx_power)
        self.__params["noise_power"] = float(noise_power)
        self.__params["area_side"] = float(area_side)
        self.__params["rate_req_range"] = (float(rate_req_range[0]), float(rate_req_range[1]))

        self._validate()

    @staticmethod
    def from_dict(data: dict) -> Params:
        values = dict(data)
        if ("rate_req_range" in values):
            values["rate_req_range"] = tuple(values["rate_req_range"])
        return Params(**values)

    def _validate(self):
        problems = []

        if (self.price_per_rate <= 0):
            problems.append("price_per_rate must be positive")
        if (self.cost_per_rate <= 0):
            problems.append("cost_per_rate must be positive")
        if (self.price_per_rate <= self.cost_per_rate):
            problems.append("price_per_rate must exceed cost_per_rate")
        for key in ["bandwidth", "tx_range", "gain_coeff", "gain_exponent", "tx_power", "noise_power", "area_side"]:
            if (self.__params[key] <= 0):
                problems.append(f"{key} must be positive")

        low, high = self.rate_req_range
        if (low <= 0 or high <= 0 or low > high):
            problems.append("rate_req_range must satisfy 0 < min <= max")

        if problems:
            raise ValidationError("Invalid network parameters.", problems)

    def to_dict(self) -> dict:
        data = self.__params.copy()
        data["rate_req_range"] = list(data["rate_req_range"])
        return data

    def replace(self, **changes) -> Params:
        """Returns a copy of the parameters with the given fields changed."""
        values = self.__params.copy()
        values.update(changes)
        return Params(**values)

    def __repr__(self):
        rep = Repr()
        return f"<Params({', '.join(f'{key}={rep.repr(value)}' for key, value in self.__params.items())})>"

    def __eq__(self, other):
        return isinstance(other, Params) and self.__params == other._Params__params

    def __hash__(self):
        return hash(tuple(sorted(self.__params.items())))

    def __getitem__(self, key):
        return self.__params[key]

    @property
    def price_per_rate(self) -> float:
        """P: payoff per Kbps served."""
        return self.__params["price_per_rate"]

    @property
    def cost_per_rate(self) -> float:
        """C: cost per Kbps per transmitting node."""
        return self.__params["cost_per_rate"]

    @property
    def bandwidth(self) -> float:
        return self.__params["bandwidth"]

    @property
    def tx_range(self) -> float:
        return self.__params["tx_range"]

    @property
    def gain_coeff(self) -> float:
        return self.__params["gain_coeff"]

    @property
    def gain_exponent(self) -> float:
        return self.__params["gain_exponent"]

    @property
    def tx_power(self) -> float:
        return self.__params["tx_power"]

    @property
    def noise_power(self) -> float:
        return self.__params["noise_power"]

    @property
    def area_side(self) -> float:
        return self.__params["area_side"]

    @property
    def rate_req_range(self) -> tuple[float, float]:
        return self.__params["rate_req_range"]

class Node():
    """A mesh node owned by a single provider."""

    def __init__(self, *, node_id: int, owner: int, position: tuple[float, float]):
        self.__node_data = {
            "id": int(node_id),
            "owner": int(owner),
            "position": (float(position[0]), float(position[1]))
        }

    def distance_to(self, other: Node) -> float:
        return math.dist(self.position, other.position)

    def to_dict(self) -> dict:
        return {"id": self.node_id, "owner": self.owner, "position": list(self.position)}

    def __repr__(self):
        return f"<Node(id={self.node_id}, owner={self.owner}, position={self.position})>"

    def __eq__(self, other):
        return isinstance(other, Node) and self.__node_data == other._Node__node_data

    def __hash__(self):
        return hash((self.node_id, self.owner, self.position))

    @property
    def node_id(self) -> int:
        return self.__node_data["id"]

    @property
    def owner(self) -> int:
        """The id of the provider owning the node."""
        return self.__node_data["owner"]

    @property
    def position(self) -> tuple[float, float]:
        """The (x, y) position in meters."""
        return self.__node_data["position"]

class Link():
    """A directed, capacity-labelled link between two nodes."""

    def __init__(self, *, source: int, target: int, capacity: float):
        if (source == target):
            raise ValidationError("A link cannot connect a node to itself.", [(source, target)])

        if (capacity <= 0):
            raise ValidationError("Link capacities must be positive.", [(source, target)])

        self.__link_data = (int(source), int(target), float(capacity))

    def __repr__(self):
        return f"<Link({self.source}->{self.target}, capacity={self.capacity:.4f})>"

    def __eq__(self, other):
        return isinstance(other, Link) and self.__link_data == other._Link__link_data

    def __hash__(self):
        return hash(self.__link_data)

    @property
    def source(self) -> int:
        """The transmitting node i."""
        return self.__link_data[0]

    @property
    def target(self) -> int:
        """The receiving node j."""
        return self.__link_data[1]

    @property
    def capacity(self) -> float:
        """The capacity c_ij in Kbps."""
        return self.__link_data[2]

    @property
    def pair(self) -> tuple[int, int]:
        return (self.__link_data[0], self.__link_data[1])

class FlowSession():
    """A splittable source-destination demand owned by a provider."""

    def __init__(self, *, session_id: str, owner: int, source: int, destination: int, rate_req: float):
        """Creates a new flow session.

        Args:
            session_id (``str``): The session label, unique within a network.
            owner (``int``): The id of the provider owning the session.
            source (``int``): The id of the source node.
            destination (``int``): The id of the destination node.
            rate_req (``float``): The rate requirement R(l) in Kbps.
        """
        self.__session_data = {
            "id": str(session_id),
            "owner": int(owner),
            "source": int(source),
            "destination": int(destination),
            "rate_req": float(rate_req)
        }

    def to_dict(self) -> dict:
        return self.__session_data.copy()

    def __repr__(self):
        rep = Repr()
        return f"<FlowSession({', '.join(f'{key}={rep.repr(value)}' for key, value in self.__session_data.items())})>"

    def __str__(self):
        return json.dumps(self.__session_data)

    def __eq__(self, other):
        return isinstance(other, FlowSession) and self.__session_data == other._FlowSession__session_data

    def __hash__(self):
        return hash(tuple(self.__session_data.values()))

    @property
    def session_id(self) -> str:
        return self.__session_data["id"]

    @property
    def owner(self) -> int:
        return self.__session_data["owner"]

    @property
    def source(self) -> int:
        return self.__session_data["source"]

    @property
    def destination(self) -> int:
        return self.__session_data["destination"]

    @property
    def rate_req(self) -> float:
        return self.__session_data["rate_req"]

class NetworkSpec():
    """The serializable description of a network: providers, nodes, sessions, parameters and capacity overrides."""

    def __init__(self, *, providers: int, nodes: list[Node], sessions: list[FlowSession], params: Params | None = None, capacity_overrides: list[tuple[int, int, float]] | None = None):
        """Creates and validates a network description.

        Args:
            providers (``int``): The number of providers M. Providers are numbered 1..M.
            nodes (``list[Node]``): The nodes of every provider.
            sessions (``list[FlowSession]``): The flow sessions of every provider.
            params (``Params | None``, optional): The network parameters. Defaults to ``Params()``.
            capacity_overrides (``list[tuple[int, int, float]] | None``, optional): Directed (i, j, capacity) entries replacing or adding links. Defaults to None.

        Raises:
            ``ValidationError``: Raised if any invariant is violated; the error lists every offender.
        """
        self.__providers = int(providers)
        self.__nodes = tuple(nodes)
        self.__sessions = tuple(sessions)
        self.__params = params if params is not None else Params()
        self.__overrides = tuple((int(i), int(j), float(capacity)) for i, j, capacity in (capacity_overrides or []))

        self.validate()

    def validate(self) -> None:
        """Checks every invariant of the description.

        Raises:
            ``ValidationError``: Raised with the list of offending items if an invariant is violated.
        """
        if (self.__providers < 1):
            raise ValidationError("A network needs at least one provider.", [self.__providers])

        offenders = []
        seen = set()
        side = self.__params.area_side

        for node in self.__nodes:
            if (node.node_id in seen):
                offenders.append(f"duplicate node id {node.node_id}")
            seen.add(node.node_id)

            if (not 1 <= node.owner <= self.__providers):
                offenders.append(f"node {node.node_id} has unknown owner {node.owner}")

            x, y = node.position
            if (not (0 <= x <= side and 0 <= y <= side)):
                offenders.append(f"node {node.node_id} lies outside the deployment area")

        owners = {node.node_id: node.owner for node in self.__nodes}
        session_ids = set()

        for session in self.__sessions:
            if (session.session_id in session_ids):
                offenders.append(f"duplicate session id {session.session_id}")
            session_ids.add(session.session_id)

            missing = [endpoint for endpoint in (session.source, session.destination) if endpoint not in owners]
            if missing:
                offenders.append(f"session {session.session_id} references missing node(s) {missing}")
                continue

            if (session.source == session.destination):
                offenders.append(f"session {session.session_id} has identical source and destination")
            if (owners[session.source] != session.owner or owners[session.destination] != session.owner):
                offenders.append(f"session {session.session_id} crosses providers")
            if (session.rate_req <= 0):
                offenders.append(f"session {session.session_id} has a non-positive rate requirement")

        for i, j, capacity in self.__overrides:
            if (i not in owners or j not in owners):
                offenders.append(f"override ({i}, {j}) references a missing node")
            if (i == j):
                offenders.append(f"override ({i}, {j}) is a self loop")
            if (capacity <= 0):
                offenders.append(f"override ({i}, {j}) has a non-positive capacity")

        if offenders:
            raise ValidationError("Invalid network specification.", offenders)

    def to_dict(self) -> dict:
        return {
            "providers": self.__providers,
            "params": self.__params.to_dict(),
            "nodes": [node.to_dict() for node in self.__nodes],
            "sessions": [session.to_dict() for session in self.__sessions],
            "capacity_overrides": [list(entry) for entry in self.__overrides]
        }

    def __repr__(self):
        return f"<NetworkSpec(providers={self.__providers}, nodes={len(self.__nodes)}, sessions={len(self.__sessions)}, overrides={len(self.__overrides)})>"

    def __eq__(self, other):
        return isinstance(other, NetworkSpec) and self.to_dict() == other.to_dict()

    @property
    def providers(self) -> int:
        return self.__providers

    @property
    def nodes(self) -> tuple[Node, ...]:
        return self.__nodes

    @property
    def sessions(self) -> tuple[FlowSession, ...]:
        return self.__sessions

    @property
    def params(self) -> Params:
        return self.__params

    @property
    def capacity_overrides(self) -> tuple[tuple[int, int, float], ...]:
        return self.__overrides

class Network():
    """A NetworkSpec together with its derived directed links and adjacency."""

    def __init__(self, spec: NetworkSpec, links: list[Link]):
        """(Internal) Use ``build_network`` or ``Network.restrict`` instead."""
        self.__spec = spec
        self.__links = tuple(sorted(links, key = lambda link: link.pair))
        self.__link_map = {link.pair: link for link in self.__links}
        self.__nodes = {node.node_id: node for node in spec.nodes}
        self.__sessions = {session.session_id: session for session in spec.sessions}
        self.__out = {node_id: [] for node_id in self.__nodes}
        self.__in = {node_id: [] for node_id in self.__nodes}

        for link in self.__links:
            if (link.source not in self.__nodes or link.target not in self.__nodes):
                raise ValidationError("Link endpoints must exist in the network.", [link.pair])
            self.__out[link.source].append(link.target)
            self.__in[link.target].append(link.source)

    def restrict(self, coalition: Coalition | int) -> Network:
        """Returns the sub-network owned by the members of a coalition.

        Only nodes owned by members, links between such nodes and sessions owned by members remain.

        Args:
            coalition (``Coalition | int``): The coalition, or its bitmask.

        Raises:
            ``DomainError``: Raised if the coalition is empty; v(empty) is zero and needs no network.

        Returns:
            ``Network``: The restricted network.
        """
        coalition = Coalition.of(coalition)

        if (coalition.is_empty()):
            raise DomainError("Cannot restrict a network to the empty coalition.")

        nodes = [node for node in self.__spec.nodes if node.owner in coalition]
        kept = {node.node_id for node in nodes}

        spec = NetworkSpec(
            providers = self.__spec.providers,
            nodes = nodes,
            sessions = [session for session in self.__spec.sessions if session.owner in coalition],
            params = self.__spec.params,
            capacity_overrides = [entry for entry in self.__spec.capacity_overrides if entry[0] in kept and entry[1] in kept]
        )
        links = [link for link in self.__links if link.source in kept and link.target in kept]

        return Network(spec, links)

    def node(self, node_id: int) -> Node:
        return self.__nodes[node_id]

    def owner_of(self, node_id: int) -> int:
        return self.__nodes[node_id].owner

    def session(self, session_id: str) -> FlowSession:
        return self.__sessions[session_id]

    def link(self, source: int, target: int) -> Link | None:
        return self.__link_map.get((source, target))

    def has_link(self, source: int, target: int) -> bool:
        return (source, target) in self.__link_map

    def out_neighbors(self, node_id: int) -> list[int]:
        """T_i: the nodes node_id can transmit to."""
        return list(self.__out[node_id])

    def in_neighbors(self, node_id: int) -> list[int]:
        return list(self.__in[node_id])

    def sessions_of(self, owner: int) -> list[FlowSession]:
        return [session for session in self.__spec.sessions if session.owner == owner]

    def to_graph(self) -> nx.DiGraph:
        """Returns a networkx view of the network with ``capacity`` edge attributes."""
        graph = nx.DiGraph()

        for node in self.__spec.nodes:
            graph.add_node(node.node_id, owner = node.owner, position = node.position)

        for link in self.__links:
            graph.add_edge(link.source, link.target, capacity = link.capacity)

        return graph

    def __repr__(self):
        return f"<Network(providers={self.providers}, nodes={len(self.__nodes)}, links={len(self.__links)}, sessions={len(self.__sessions)})>"

    def __eq__(self, other):
        return isinstance(other, Network) and self.__spec == other.spec and self.__links == other.links

    @property
    def spec(self) -> NetworkSpec:
        return self.__spec

    @property
    def params(self) -> Params:
        return self.__spec.params

    @property
    def providers(self) -> int:
        return self.__spec.providers

    @property
    def nodes(self) -> tuple[Node, ...]:
        return self.__spec.nodes

    @property
    def sessions(self) -> tuple[FlowSession, ...]:
        return self.__spec.sessions

    @property
    def links(self) -> tuple[Link, ...]:
        return self.__links

def link_capacity(distance: float, params: Params) -> float | None:
    """Returns the Shannon capacity of a link of the given length.

    ``W * log2(1 + tx_power * gain_coeff * d^-gain_exponent / noise_power) / 1000``

    Args:
        distance (``float``): The link length in meters.
        params (``Params``): The network parameters.

    Raises:
        ``DomainError``: Raised if the distance is not positive.

    Returns:
        ``float | None``: The capacity in Kbps, or None if the distance exceeds the transmission range.
    """
    if (distance <= 0):
        raise DomainError(f"Link distance must be positive, not {distance}.")

    if (distance > params.tx_range):
        return None

    gain = params.gain_coeff * distance ** (-params.gain_exponent)
    snr = params.tx_power * gain / params.noise_power

    return params.bandwidth * math.log2(1 + snr) / 1000

def build_network(spec: NetworkSpec) -> Network:
    """Derives the directed links of a network.

    Every ordered pair of nodes within transmission range gets a link with its Shannon capacity. A capacity
    override for a pair replaces that capacity (only in the overridden direction) and adds the link if the
    pair is out of range.

    Args:
        spec (``NetworkSpec``): The network description.

    Raises:
        ``ValidationError``: Raised if the description is invalid.

    Returns:
        ``Network``: The network with its links and adjacency.
    """
    if (not isinstance(spec, NetworkSpec)):
        raise TypeError(f"spec should be a NetworkSpec, not {type(spec)}")

    spec.validate()

    params = spec.params
    capacities = {}

    for first in spec.nodes:
        for second in spec.nodes:
            if (first.node_id == second.node_id):
                continue

            distance = first.distance_to(second)
            # Co-located nodes are treated as out of range.
            if (distance <= 0):
                continue

            capacity = link_capacity(distance, params)
            if (capacity is not None):
                capacities[(first.node_id, second.node_id)] = capacity

    for i, j, capacity in spec.capacity_overrides:
        capacities[(i, j)] = capacity

    links = [Link(source = i, target = j, capacity = capacity) for (i, j), capacity in capacities.items()]

    return Network(spec, links)

def generate_random(providers: int, nodes_per_provider: int, sessions_per_provider: int, params: Params | None = None, seed: int = 0) -> NetworkSpec:
    """Generates a random network description.

    The algorithm is fixed so that fixtures are portable: a ``numpy.random.default_rng(seed)`` generator first
    draws every node position (provider-major, ids 1..M*n) uniformly over the square area, then, provider by
    provider, draws each session's source and destination uniformly among that provider's nodes (redrawing the
    destination while it equals the source) followed by a rate requirement uniform over ``rate_req_range``.

    Args:
        providers (``int``): The number of providers.
        nodes_per_provider (``int``): The number of nodes of each provider.
        sessions_per_provider (``int``): The number of sessions of each provider.
        params (``Params | None``, optional): The network parameters. Defaults to ``Params()``.
        seed (``int``, optional): The random seed. Defaults to 0.

    Raises:
        ``ValidationError``: Raised if the counts are invalid.

    Returns:
        ``NetworkSpec``: The generated description.
    """
    params = params if params is not None else Params()

    if (providers < 1 or nodes_per_provider < 1 or sessions_per_provider < 0):
        raise ValidationError("Provider and node counts must be at least 1.", [providers, nodes_per_provider, sessions_per_provider])

    if (nodes_per_provider < 2 and sessions_per_provider > 0):
        raise ValidationError("Sessions need at least two nodes per provider.", [nodes_per_provider])

    rng = np.random.default_rng(seed)
    positions = rng.uniform(0.0, params.area_side, size = (providers * nodes_per_provider, 2))

    nodes = []
    for index, (x, y) in enumerate(positions):
        nodes.append(Node(node_id = index + 1, owner = index // nodes_per_provider + 1, position = (float(x), float(y))))

    low, high = params.rate_req_range
    sessions = []

    for owner in range(1, providers + 1):
        first_id = (owner - 1) * nodes_per_provider + 1

        for number in range(1, sessions_per_provider + 1):
            source = int(rng.integers(nodes_per_provider))
            destination = int(rng.integers(nodes_per_provider))

            while (destination == source):
                destination = int(rng.integers(nodes_per_provider))

            sessions.append(FlowSession(
                session_id = f"l{owner}_{number}",
                owner = owner,
                source = first_id + source,
                destination = first_id + destination,
                rate_req = float(rng.uniform(low, high))
            ))

    return NetworkSpec(providers = providers, nodes = nodes, sessions = sessions, params = params)
