import math

import pytest

from meshcoop import (Params, Node, Link, FlowSession, NetworkSpec, Coalition, ValidationError, DomainError,
                      link_capacity, build_network, generate_random)

from tests.conftest import line_spec, cooperation_spec

def test_link_capacity_at_range_edge():
    params = Params()
    assert link_capacity(150.0, params) == pytest.approx(2054.19, abs = 1.0)
    assert link_capacity(150.0001, params) is None

def test_link_capacity_decreases_with_distance():
    params = Params()
    assert link_capacity(50.0, params) > link_capacity(100.0, params) > link_capacity(150.0, params)

def test_link_capacity_formula():
    params = Params()
    snr = params.tx_power * params.gain_coeff * 80.0 ** -params.gain_exponent / params.noise_power
    assert link_capacity(80.0, params) == pytest.approx(params.bandwidth * math.log2(1 + snr) / 1000)

@pytest.mark.parametrize("distance", [0.0, -5.0])
def test_link_capacity_rejects_non_positive_distance(distance):
    with pytest.raises(DomainError):
        link_capacity(distance, Params())

def test_params_validation():
    with pytest.raises(ValidationError):
        Params(price_per_rate = 1.0, cost_per_rate = 2.0)

    with pytest.raises(ValidationError):
        Params(bandwidth = 0.0)

    with pytest.raises(ValidationError):
        Params(rate_req_range = (50.0, 10.0))

def test_params_replace_and_round_trip():
    params = Params().replace(price_per_rate = 12.0)
    assert params.price_per_rate == 12.0
    assert Params.from_dict(params.to_dict()) == params

def test_build_network_links():
    network = build_network(line_spec())

    assert {link.pair for link in network.links} == {(1, 2), (2, 1), (2, 3), (3, 2)}
    assert network.link(1, 2).capacity == 100.0
    assert not network.has_link(1, 3)
    assert network.out_neighbors(2) == [1, 3]
    assert network.in_neighbors(3) == [2]

def test_override_adds_out_of_range_link():
    spec = line_spec()
    spec = NetworkSpec(providers = 1, nodes = list(spec.nodes), sessions = list(spec.sessions), capacity_overrides = [(1, 3, 25.0)])
    network = build_network(spec)

    assert network.link(1, 3).capacity == 25.0
    assert not network.has_link(3, 1)
    assert network.link(1, 2).capacity == pytest.approx(link_capacity(100.0, Params()))

def test_restrict_keeps_members_only():
    network = build_network(cooperation_spec())
    sub = network.restrict(Coalition.singleton(1))

    assert {node.owner for node in sub.nodes} == {1}
    assert [session.session_id for session in sub.sessions] == ["l1_1"]
    assert all(sub.owner_of(link.source) == 1 and sub.owner_of(link.target) == 1 for link in sub.links)

    # The relay of SP2 only appears with SP2 in the coalition.
    assert network.has_link(1, 10)
    assert not sub.has_link(1, 10)

def test_restrict_empty_coalition():
    with pytest.raises(DomainError):
        build_network(line_spec()).restrict(Coalition())

def test_to_graph_carries_capacities():
    graph = build_network(line_spec()).to_graph()

    assert graph.number_of_nodes() == 3
    assert graph.edges[1, 2]["capacity"] == 100.0
    assert graph.nodes[1]["owner"] == 1

def test_spec_collects_every_offender():
    nodes = [
        Node(node_id = 1, owner = 1, position = (0.0, 0.0)),
        Node(node_id = 1, owner = 1, position = (10.0, 0.0)),
        Node(node_id = 2, owner = 3, position = (5000.0, 0.0))
    ]
    sessions = [FlowSession(session_id = "l1_1", owner = 1, source = 1, destination = 1, rate_req = 10.0)]

    with pytest.raises(ValidationError) as info:
        NetworkSpec(providers = 2, nodes = nodes, sessions = sessions)

    assert len(info.value.offenders) == 4

def test_spec_rejects_cross_provider_session():
    nodes = [Node(node_id = 1, owner = 1, position = (0.0, 0.0)), Node(node_id = 2, owner = 2, position = (10.0, 0.0))]
    sessions = [FlowSession(session_id = "l1_1", owner = 1, source = 1, destination = 2, rate_req = 10.0)]

    with pytest.raises(ValidationError):
        NetworkSpec(providers = 2, nodes = nodes, sessions = sessions)

def test_link_rejects_self_loop():
    with pytest.raises(ValidationError):
        Link(source = 1, target = 1, capacity = 10.0)

def test_generate_random_is_seeded():
    first = generate_random(3, 20, 3, seed = 42)
    second = generate_random(3, 20, 3, seed = 42)
    other = generate_random(3, 20, 3, seed = 43)

    assert first == second
    assert first != other

def test_generate_random_layout():
    spec = generate_random(3, 20, 3, seed = 7)
    low, high = spec.params.rate_req_range

    assert [node.node_id for node in spec.nodes] == list(range(1, 61))
    assert [node.owner for node in spec.nodes] == [owner for owner in (1, 2, 3) for _ in range(20)]
    assert [session.session_id for session in spec.sessions] == [f"l{m}_{k}" for m in (1, 2, 3) for k in (1, 2, 3)]

    for session in spec.sessions:
        assert session.source != session.destination
        assert low <= session.rate_req <= high
        assert (session.source - 1) // 20 + 1 == session.owner

def test_generate_random_rejects_single_node_providers():
    with pytest.raises(ValidationError):
        generate_random(2, 1, 1)
