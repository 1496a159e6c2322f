import pytest

from meshcoop import Params, Node, FlowSession, NetworkSpec, CharacteristicFunction, build_network
from meshcoop.Utils import Utils

# Values of the three-provider example game: singletons, pairs and the grand coalition.
TABLE_VALUES = {
    (1,): 767,
    (2,): 1101,
    (3,): 976,
    (1, 2): 1901,
    (1, 3): 1835,
    (2, 3): 2207,
    (1, 2, 3): 3062
}

@pytest.fixture(autouse = True)
def quiet_logs():
    Utils.should_log = False
    yield
    Utils.should_log = True

@pytest.fixture
def table_cf() -> CharacteristicFunction:
    return CharacteristicFunction.from_values(3, TABLE_VALUES)

def line_spec(rate: float = 50.0) -> NetworkSpec:
    """S -> A -> D, 100 m apart, every link forced to 100 Kbps."""
    nodes = [
        Node(node_id = 1, owner = 1, position = (0.0, 0.0)),
        Node(node_id = 2, owner = 1, position = (100.0, 0.0)),
        Node(node_id = 3, owner = 1, position = (200.0, 0.0))
    ]
    sessions = [FlowSession(session_id = "l1_1", owner = 1, source = 1, destination = 3, rate_req = rate)]
    overrides = [(1, 2, 100.0), (2, 1, 100.0), (2, 3, 100.0), (3, 2, 100.0)]

    return NetworkSpec(providers = 1, nodes = nodes, sessions = sessions, capacity_overrides = overrides)

@pytest.fixture
def line_network():
    return build_network(line_spec())

def diamond_spec(rate: float = 500.0) -> NetworkSpec:
    """Two disjoint S-D paths through A (60 Kbps) and B (40 Kbps)."""
    nodes = [
        Node(node_id = 1, owner = 1, position = (0.0, 100.0)),
        Node(node_id = 2, owner = 1, position = (100.0, 0.0)),
        Node(node_id = 3, owner = 1, position = (100.0, 200.0)),
        Node(node_id = 4, owner = 1, position = (200.0, 100.0))
    ]
    sessions = [FlowSession(session_id = "l1_1", owner = 1, source = 1, destination = 4, rate_req = rate)]
    overrides = [(1, 2, 60.0), (2, 4, 60.0), (1, 3, 40.0), (3, 4, 40.0)]

    return NetworkSpec(providers = 1, nodes = nodes, sessions = sessions, capacity_overrides = overrides)

@pytest.fixture
def diamond_network():
    return build_network(diamond_spec())

COOPERATION_RATES = (30.0, 45.0)

def cooperation_spec() -> NetworkSpec:
    """Two providers whose 3-hop routes shrink to 2 hops through a relay of the other provider.

    SP1 routes S1 -> A1 -> B1 -> D1 alone and S1 -> X -> D1 with SP2's relay X; SP2 mirrors it 300 m higher
    with SP1's relay Y.
    """
    nodes = [
        Node(node_id = 1, owner = 1, position = (0.0, 0.0)),
        Node(node_id = 2, owner = 1, position = (100.0, 60.0)),
        Node(node_id = 3, owner = 1, position = (200.0, 60.0)),
        Node(node_id = 4, owner = 1, position = (300.0, 0.0)),
        Node(node_id = 5, owner = 1, position = (150.0, 300.0)),
        Node(node_id = 6, owner = 2, position = (0.0, 300.0)),
        Node(node_id = 7, owner = 2, position = (100.0, 360.0)),
        Node(node_id = 8, owner = 2, position = (200.0, 360.0)),
        Node(node_id = 9, owner = 2, position = (300.0, 300.0)),
        Node(node_id = 10, owner = 2, position = (150.0, 0.0))
    ]
    sessions = [
        FlowSession(session_id = "l1_1", owner = 1, source = 1, destination = 4, rate_req = COOPERATION_RATES[0]),
        FlowSession(session_id = "l2_1", owner = 2, source = 6, destination = 9, rate_req = COOPERATION_RATES[1])
    ]

    return NetworkSpec(providers = 2, nodes = nodes, sessions = sessions)

@pytest.fixture
def cooperation_network():
    return build_network(cooperation_spec())

CHAIN_RATES = (33.0, 42.0, 55.0)
CHAIN_HOPS = (3, 3, 4)

def chains_spec(extra_provider: bool = False) -> NetworkSpec:
    """SP1 owns three chains of 140 m hops, 300 m apart, carrying sessions of 33, 42 and 55 Kbps over 3, 3 and 4 hops.

    With ``extra_provider`` a second provider owns an unrelated pair of nodes out of everybody's range.
    """
    nodes = []
    sessions = []
    node_id = 1

    for index, (rate, hops) in enumerate(zip(CHAIN_RATES, CHAIN_HOPS)):
        first = node_id
        for step in range(hops + 1):
            nodes.append(Node(node_id = node_id, owner = 1, position = (140.0 * step, 300.0 * index)))
            node_id += 1
        sessions.append(FlowSession(session_id = f"l1_{index + 1}", owner = 1, source = first, destination = node_id - 1, rate_req = rate))

    providers = 1
    if (extra_provider):
        providers = 2
        nodes.append(Node(node_id = node_id, owner = 2, position = (900.0, 900.0)))
        nodes.append(Node(node_id = node_id + 1, owner = 2, position = (900.0, 800.0)))
        sessions.append(FlowSession(session_id = "l2_1", owner = 2, source = node_id, destination = node_id + 1, rate_req = 25.0))

    return NetworkSpec(providers = providers, nodes = nodes, sessions = sessions, params = Params(area_side = 1000.0))

@pytest.fixture
def chains_network():
    return build_network(chains_spec())
