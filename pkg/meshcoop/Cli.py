"""
    Cli.py

    Contains the command-line interface of meshcoop.

    Subcommands:
        gen         generate a random network file
        value       print v(S) of one coalition, or of every coalition
        allocate    divide v(M) with the dual payoff or the Shapley value
        core        check payoff vectors against the core
        structures  print the payoff matrix of every coalition structure
        plot        draw the core of a three-provider game as SVG
        topology    draw the node deployment and a coalition's routing as SVG
        breakdown   per-provider revenue and routing cost of an optimal routing
        sessions    per-session requirement, served rate and hop count
        survey      run the analysis over seeded random networks
"""

from __future__ import annotations

import argparse
import sys

import pandas as pd

from meshcoop.Analyzer import Analyzer
from meshcoop.Allocation import Allocation
from meshcoop.Coalition import Coalition
from meshcoop.Errors import MeshcoopError
from meshcoop.Network import Params, generate_random
from meshcoop.Utils import configure_logging, format_payoff
from meshcoop.Utils.NetworkIO import parse_network, write_network, dump_network

def _provider_list(text: str) -> list[int]:
    try:
        members = [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated provider ids, not {text!r}")

    if (not members or min(members) < 1):
        raise argparse.ArgumentTypeError(f"expected positive provider ids, not {text!r}")

    return members

def _payoff_list(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated payoffs, not {text!r}")

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help = False)
    common.add_argument("--mode", choices = ["elastic", "strict"], default = "elastic", help = "demand model of the coalition LPs")
    common.add_argument("--solver", choices = ["highs", "simplex"], default = "highs", help = "LP backend")
    common.add_argument("--csv", action = "store_true", help = "print machine readable CSV instead of a table")
    common.add_argument("--workers", type = int, default = 1, help = "threads used to evaluate coalitions")
    common.add_argument("--seed", type = int, default = 0, help = "random seed of gen, first seed of survey")
    common.add_argument("-o", "--output", default = None, help = "output file")
    common.add_argument("-v", "--verbose", action = "store_true", help = "print debug messages")

    parser = argparse.ArgumentParser(prog = "meshcoop", description = "Cooperative game analysis of multi-provider wireless mesh networks.")
    commands = parser.add_subparsers(dest = "command", required = True)

    generator = commands.add_parser("gen", parents = [common], help = "generate a random network")
    generator.add_argument("--sps", type = int, default = 3, help = "number of providers")
    generator.add_argument("--nodes", type = int, default = 20, help = "nodes per provider")
    generator.add_argument("--sessions", type = int, default = 3, help = "sessions per provider")
    generator.add_argument("--price", type = float, default = None, help = "payoff P per Kbps")
    generator.add_argument("--cost", type = float, default = None, help = "cost C per Kbps per hop")
    generator.add_argument("--area", type = float, default = None, help = "side of the deployment area in meters")

    value = commands.add_parser("value", parents = [common], help = "coalition values")
    value.add_argument("network")
    value.add_argument("--coalition", type = _provider_list, default = None, help = "e.g. 1,2")

    allocate = commands.add_parser("allocate", parents = [common], help = "divide the grand coalition's value")
    allocate.add_argument("network")
    allocate.add_argument("--method", choices = ["dual", "shapley"], default = "shapley")

    core = commands.add_parser("core", parents = [common], help = "core membership")
    core.add_argument("network")
    core.add_argument("--x", type = _payoff_list, default = None, help = "payoffs of providers 1..M, e.g. 855,1149,1058; write --x=-5,3,2 when the first payoff is negative")

    structures = commands.add_parser("structures", parents = [common], help = "payoff matrix of coalition structures")
    structures.add_argument("network")

    plot = commands.add_parser("plot", parents = [common], help = "barycentric core plot")
    plot.add_argument("network")

    topology = commands.add_parser("topology", parents = [common], help = "node deployment and routing plot")
    topology.add_argument("network")
    topology.add_argument("--coalition", type = _provider_list, default = None, help = "whose routing is drawn, e.g. 1 (defaults to every provider)")

    breakdown = commands.add_parser("breakdown", parents = [common], help = "per-provider revenue and cost")
    breakdown.add_argument("network")
    breakdown.add_argument("--coalition", type = _provider_list, default = None)

    sessions = commands.add_parser("sessions", parents = [common], help = "per-session routing summary")
    sessions.add_argument("network")

    survey = commands.add_parser("survey", parents = [common], help = "analyze seeded random networks")
    survey.add_argument("--seeds", type = int, default = 100, help = "number of networks")
    survey.add_argument("--sps", type = int, default = 3)
    survey.add_argument("--nodes", type = int, default = 20)
    survey.add_argument("--sessions", type = int, default = 3)
    survey.add_argument("--out-dir", default = None, help = "where counterexample networks are written")

    return parser

def _print_frame(frame: pd.DataFrame, as_csv: bool, formatted: list[str]):
    if as_csv:
        print(frame.to_csv(index = False, float_format = "%.4f", lineterminator = "\n"), end = "")
        return

    formatters = {column: format_payoff for column in formatted}
    print(frame.to_string(index = False, formatters = formatters))

def _analyzer(args) -> Analyzer:
    return Analyzer(parse_network(args.network), mode = args.mode, solver = args.solver, workers = args.workers)

def _gen(args) -> int:
    params = Params()
    changes = {key: value for key, value in (("price_per_rate", args.price), ("cost_per_rate", args.cost), ("area_side", args.area)) if value is not None}
    if changes:
        params = params.replace(**changes)

    spec = generate_random(args.sps, args.nodes, args.sessions, params, args.seed)

    if (args.output):
        write_network(spec, args.output)
    else:
        print(dump_network(spec), end = "")

    return 0

def _value(args) -> int:
    analyzer = _analyzer(args)

    if (args.coalition is not None):
        coalition = Coalition.from_members(args.coalition)
        value, _ = analyzer.value(coalition)
        frame = pd.DataFrame({"coalition": [repr(coalition)], "value": [value]})
    else:
        cf = analyzer.characteristic_function()
        coalitions = sorted(cf)
        frame = pd.DataFrame({"coalition": [repr(coalition) for coalition in coalitions], "value": [cf.value(coalition) for coalition in coalitions]})

    _print_frame(frame, args.csv, ["value"])
    return 0

def _allocation_frame(allocation: Allocation) -> pd.DataFrame:
    return pd.DataFrame({"provider": [f"SP{m}" for m in allocation.providers], "payoff": allocation.as_list()})

def _allocate(args) -> int:
    analyzer = _analyzer(args)
    allocation = analyzer.allocate(args.method)
    frame = _allocation_frame(allocation)

    _print_frame(frame, args.csv, ["payoff"])

    if (not args.csv):
        print(f"total {format_payoff(allocation.total())}")
        if (allocation.degenerate):
            print("note: the grand coalition's LP is degenerate; other dual payoffs may exist")

    return 0

def _core(args) -> int:
    analyzer = _analyzer(args)
    candidates = [("given", Allocation.of(args.x))] if args.x is not None else [("dual", analyzer.allocate("dual")), ("shapley", analyzer.allocate("shapley"))]

    records = []
    for name, allocation in candidates:
        report = analyzer.core(allocation)
        records.append({
            "allocation": name,
            "payoffs": ",".join(format_payoff(value) for value in allocation.as_list()),
            "imputation": report.is_imputation,
            "in_core": report.in_core,
            "violated": " ".join(f"{coalition!r}:{format_payoff(deficit)}" for coalition, deficit in report.violated_coalitions) or "-"
        })

    _print_frame(pd.DataFrame.from_records(records), args.csv, [])
    return 0

def _structures(args) -> int:
    matrix = _analyzer(args).structures()

    if (args.csv):
        print(matrix.to_csv(), end = "")
    else:
        print(matrix.to_text())
        stable = matrix.stable_structures("shapley")
        print(f"stable (shapley): {', '.join(structure.label() for structure in stable) or '-'}")

    return 0

def _plot(args) -> int:
    if (not args.output):
        raise MeshcoopError("plot needs an output file (-o FILE).")

    points = _analyzer(args).plot(args.output)
    for point in points:
        print(f"{point.label}: {', '.join(f'{value:.4f}' for value in point.simplex_coords)}")

    return 0

def _topology(args) -> int:
    if (not args.output):
        raise MeshcoopError("topology needs an output file (-o FILE).")

    coalition = Coalition.from_members(args.coalition) if args.coalition else None
    drawn = _analyzer(args).topology(args.output, coalition)
    for session_id, links in drawn.items():
        path = " ".join(f"{i}->{j}" for i, j in links) or "-"
        print(f"{session_id}: {path}")

    return 0

def _breakdown(args) -> int:
    analyzer = _analyzer(args)
    breakdown = analyzer.breakdown(Coalition.from_members(args.coalition) if args.coalition else None)

    frame = pd.DataFrame.from_records(breakdown.rows(), columns = ["provider", "revenue", "routing_cost", "net"])
    frame["provider"] = [f"SP{provider}" for provider in frame["provider"]]

    _print_frame(frame, args.csv, ["revenue", "routing_cost", "net"])
    return 0

def _sessions(args) -> int:
    frame = _analyzer(args).session_table()
    _print_frame(frame, args.csv, ["rate_req", "served"])
    return 0

def _survey(args) -> int:
    seeds = range(args.seed, args.seed + args.seeds)
    frame = Analyzer.survey(seeds, providers = args.sps, nodes = args.nodes, sessions = args.sessions, mode = args.mode, solver = args.solver, output_dir = args.out_dir)

    _print_frame(frame, args.csv, ["grand_value"])

    if (not args.csv):
        print(f"dual payoff in core: {int(frame['dual_in_core'].sum())}/{len(frame)}")
        print(f"shapley in core: {int(frame['shapley_in_core'].sum())}/{len(frame)} ({frame['shapley_in_core'].mean():.4f})")

    return 0

COMMANDS = {
    "gen": _gen,
    "value": _value,
    "allocate": _allocate,
    "core": _core,
    "structures": _structures,
    "plot": _plot,
    "topology": _topology,
    "breakdown": _breakdown,
    "sessions": _sessions,
    "survey": _survey
}

def cli_main(argv: list[str] | None = None) -> int:
    """Runs the command line and returns its exit status: 0 on success, 1 on errors, 2 on usage errors."""
    parser = _build_parser()

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    configure_logging(args.verbose)

    try:
        return COMMANDS[args.command](args)
    except (MeshcoopError, OSError) as e:
        print(f"meshcoop: error: {e}", file = sys.stderr)
        return 1

def main():
    sys.exit(cli_main())
