"""
    Topology.py

    Contains the deployment view of a network: every node at its position, coloured by its provider, with the links
    that carry flow in a coalition's optimal routing drawn per session on top. Nodes of providers outside the
    coalition are drawn hollow, since the coalition cannot relay over them.
"""

from __future__ import annotations

import os
from typing import IO

import networkx as nx
import matplotlib
from matplotlib.colors import to_hex
from matplotlib.figure import Figure

from meshcoop.Coalition import Coalition, Routing
from meshcoop.Network import Network
from meshcoop.Utils.Utils import log

CANVAS_SIZE = (800, 800)
PROVIDER_COLORS = matplotlib.colormaps["tab10"]

def provider_color(provider: int) -> str:
    return to_hex(PROVIDER_COLORS((provider - 1) % PROVIDER_COLORS.N))

def render_topology(network: Network, file: str | os.PathLike | IO, routing: Routing | None = None, coalition: Coalition | int | None = None, title: str | None = None) -> dict[str, list[tuple[int, int]]]:
    """Draws the node deployment of a network and, optionally, the links used by a routing as an SVG image.

    Output is byte-identical for identical inputs.

    Args:
        network (``Network``): The whole network; every node is drawn.
        file (``str | os.PathLike | IO``): Where to write the SVG.
        routing (``Routing | None``, optional): The routing whose used links are drawn. Defaults to None.
        coalition (``Coalition | int | None``, optional): The coalition the routing belongs to. Only its sessions are
            drawn and only its nodes are filled. Defaults to the grand coalition.
        title (``str | None``, optional): A title drawn above the deployment. Defaults to None.

    Returns:
        ``dict[str, list[tuple[int, int]]]``: The links drawn for every session of the coalition.
    """
    coalition = Coalition.of(coalition) if coalition is not None else Coalition.grand(network.providers)
    graph = network.to_graph()
    positions = nx.get_node_attributes(graph, "position")
    drawn = {}

    width, height = CANVAS_SIZE

    with matplotlib.rc_context({"svg.hashsalt": "meshcoop", "svg.fonttype": "path"}):
        figure = Figure(figsize = (width / 72, height / 72), dpi = 72)
        axes = figure.add_subplot()
        axes.set_aspect("equal")
        axes.set_axis_off()

        if (graph.number_of_edges() > 0):
            links = nx.draw_networkx_edges(graph, positions, ax = axes, edge_color = "lightgray", width = 0.5, arrows = False)
            links.set_gid("links")

        for provider in range(1, network.providers + 1):
            owned = [node.node_id for node in network.nodes if node.owner == provider]
            if (not owned):
                continue

            member = provider in coalition
            nodes = nx.draw_networkx_nodes(graph, positions, nodelist = owned, ax = axes, node_size = 60, node_color = provider_color(provider) if member else "white", edgecolors = provider_color(provider), linewidths = 1.2, label = f"SP{provider}")
            nodes.set_gid(f"provider-{provider}")

        for session in network.sessions:
            if (session.owner not in coalition):
                continue

            used = routing.used_links(session.session_id) if routing is not None else []
            drawn[session.session_id] = used

            if used:
                arrows = nx.draw_networkx_edges(graph, positions, edgelist = used, ax = axes, edge_color = provider_color(session.owner), width = 2.0, arrows = True, arrowstyle = "-|>", arrowsize = 12)
                for index, arrow in enumerate(arrows):
                    arrow.set_gid(f"session-{session.session_id}-{index}")

            for node_id, marker in ((session.source, "s"), (session.destination, "d")):
                x, y = positions[node_id]
                axes.annotate(f"{session.session_id}{marker}", (x, y), xytext = (5, 5), textcoords = "offset points", fontsize = 8)

        axes.legend(loc = "upper right", fontsize = 10)

        if title:
            axes.set_title(title, fontsize = 14)

        figure.savefig(file, format = "svg", metadata = {"Date": None})

    log(f"> [meshcoop.Topology]: Rendered {len(network.nodes)} node(s) and the routing of {len(drawn)} session(s) of {coalition!r}.")

    return drawn
