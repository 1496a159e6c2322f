"""
    NetworkIO.py

    Contains the reader and writer of network files.

    A network file is a JSON document:

        {
            "providers": 2,
            "params": {"price_per_rate": 10.0, "cost_per_rate": 1.0, ...},
            "nodes": [{"id": 1, "owner": 1, "position": [0.0, 0.0]}, ...],
            "sessions": [{"id": "l1_1", "owner": 1, "source": 1, "destination": 4, "rate_req": 33.0}, ...],
            "capacity_overrides": [[1, 2, 100.0], ...]
        }

    Rates are in Kbps and distances in meters. ``params`` and ``capacity_overrides`` are optional; omitted
    parameters take their defaults.
"""

from __future__ import annotations

import json
import os
from typing import IO

from meshcoop.Errors import NetworkFormatError
from meshcoop.Network import NetworkSpec, Node, FlowSession, Params

_NUMBER = (int, float)

def _require(data: dict, key: str, kinds, path: str):
    if (not isinstance(data, dict)):
        raise NetworkFormatError(path, f"should be an object, not {type(data).__name__}")

    if (key not in data):
        raise NetworkFormatError(f"{path}.{key}" if path else key, "missing field")

    value = data[key]
    # bool is an int subclass, but never a valid number here.
    if (isinstance(value, bool) or not isinstance(value, kinds)):
        raise NetworkFormatError(f"{path}.{key}" if path else key, f"has the wrong type {type(value).__name__}")

    return value

def _pair(value, path: str) -> tuple[float, float]:
    if (not isinstance(value, list) or len(value) != 2 or not all(isinstance(item, _NUMBER) and not isinstance(item, bool) for item in value)):
        raise NetworkFormatError(path, "should be a list of two numbers")
    return (float(value[0]), float(value[1]))

def _parse_params(data) -> Params:
    if (data is None):
        return Params()

    if (not isinstance(data, dict)):
        raise NetworkFormatError("params", "should be an object")

    values = {}
    known = Params().to_dict()

    for key, value in data.items():
        if (key not in known):
            raise NetworkFormatError(f"params.{key}", "unknown parameter")

        if (key == "rate_req_range"):
            values[key] = _pair(value, f"params.{key}")
        elif (isinstance(value, bool) or not isinstance(value, _NUMBER)):
            raise NetworkFormatError(f"params.{key}", "should be a number")
        else:
            values[key] = value

    return Params.from_dict(values)

def load_network(data: dict) -> NetworkSpec:
    """Builds a NetworkSpec from an already decoded document.

    Raises:
        ``NetworkFormatError``: Raised with the path of the first malformed field.
        ``ValidationError``: Raised if the document is well formed but describes an invalid network.
    """
    if (not isinstance(data, dict)):
        raise NetworkFormatError("$", "the document should be an object")

    providers = _require(data, "providers", int, "")
    params = _parse_params(data.get("params"))

    nodes = []
    for index, entry in enumerate(_require(data, "nodes", list, "")):
        path = f"nodes[{index}]"
        nodes.append(Node(
            node_id = _require(entry, "id", int, path),
            owner = _require(entry, "owner", int, path),
            position = _pair(_require(entry, "position", list, path), f"{path}.position")
        ))

    sessions = []
    for index, entry in enumerate(_require(data, "sessions", list, "")):
        path = f"sessions[{index}]"
        sessions.append(FlowSession(
            session_id = _require(entry, "id", str, path),
            owner = _require(entry, "owner", int, path),
            source = _require(entry, "source", int, path),
            destination = _require(entry, "destination", int, path),
            rate_req = _require(entry, "rate_req", _NUMBER, path)
        ))

    overrides = []
    for index, entry in enumerate(data.get("capacity_overrides") or []):
        path = f"capacity_overrides[{index}]"
        if (not isinstance(entry, list) or len(entry) != 3):
            raise NetworkFormatError(path, "should be a list [source, target, capacity]")
        if (not all(isinstance(item, int) and not isinstance(item, bool) for item in entry[:2])):
            raise NetworkFormatError(path, "endpoints should be node ids")
        if (isinstance(entry[2], bool) or not isinstance(entry[2], _NUMBER)):
            raise NetworkFormatError(f"{path}[2]", "should be a number")
        overrides.append((entry[0], entry[1], float(entry[2])))

    return NetworkSpec(providers = providers, nodes = nodes, sessions = sessions, params = params, capacity_overrides = overrides)

def parse_network(file: str | os.PathLike | IO[str]) -> NetworkSpec:
    """Reads a network file.

    Args:
        file (``str | os.PathLike | IO[str]``): A path, or an open text file.

    Raises:
        ``NetworkFormatError``: Raised if the file is not valid JSON or a field is malformed.
        ``ValidationError``: Raised if the network violates an invariant.

    Returns:
        ``NetworkSpec``: The network description.
    """
    if (isinstance(file, (str, os.PathLike))):
        with open(file, "r", encoding = "utf-8") as handle:
            text = handle.read()
    else:
        text = file.read()

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise NetworkFormatError(f"line {e.lineno}, column {e.colno}", e.msg)

    return load_network(data)

def dump_network(spec: NetworkSpec) -> str:
    """Serializes a network description, with sorted keys and a trailing newline."""
    return json.dumps(spec.to_dict(), indent = 2, sort_keys = True) + "\n"

def write_network(spec: NetworkSpec, file: str | os.PathLike | IO[str]) -> None:
    """Writes a network file that ``parse_network`` reads back into an equal NetworkSpec.

    Args:
        spec (``NetworkSpec``): The network description.
        file (``str | os.PathLike | IO[str]``): A path, or an open text file.
    """
    text = dump_network(spec)

    if (isinstance(file, (str, os.PathLike))):
        with open(file, "w", encoding = "utf-8", newline = "\n") as handle:
            handle.write(text)
    else:
        file.write(text)
