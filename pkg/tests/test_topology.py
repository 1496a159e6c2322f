from meshcoop import Coalition, CoalitionGame
from meshcoop.Utils.Topology import render_topology, provider_color

def test_routing_of_a_single_provider(tmp_path, cooperation_network):
    path = tmp_path / "sp1.svg"
    _, routing = CoalitionGame(cooperation_network).coalition_value(1)

    drawn = render_topology(cooperation_network, path, routing, Coalition.singleton(1), title = "SP1 alone")
    svg = path.read_text(encoding = "utf-8")

    assert drawn == {"l1_1": [(1, 2), (2, 3), (3, 4)]}
    assert "provider-1" in svg and "provider-2" in svg
    assert "session-l1_1-2" in svg
    assert "session-l2_1" not in svg

def test_routing_of_the_grand_coalition(tmp_path, cooperation_network):
    path = tmp_path / "grand.svg"
    _, routing = CoalitionGame(cooperation_network).coalition_value(3)

    drawn = render_topology(cooperation_network, path, routing)

    # Each provider relays over the other's node.
    assert drawn == {"l1_1": [(1, 10), (10, 4)], "l2_1": [(5, 9), (6, 5)]}
    assert "session-l2_1-1" in path.read_text(encoding = "utf-8")

def test_deployment_without_routing(tmp_path, cooperation_network):
    drawn = render_topology(cooperation_network, tmp_path / "nodes.svg")
    assert drawn == {"l1_1": [], "l2_1": []}

def test_render_is_deterministic(tmp_path, cooperation_network):
    first = tmp_path / "first.svg"
    second = tmp_path / "second.svg"
    _, routing = CoalitionGame(cooperation_network).coalition_value(3)

    render_topology(cooperation_network, first, routing)
    render_topology(cooperation_network, second, routing)

    assert first.read_bytes() == second.read_bytes()

def test_provider_colors_are_distinct():
    assert len({provider_color(m) for m in range(1, 11)}) == 10
    assert provider_color(11) == provider_color(1)
