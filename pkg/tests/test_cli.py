import json

import pytest

from meshcoop.Cli import cli_main
from meshcoop.Utils.NetworkIO import write_network, parse_network

from tests.conftest import chains_spec, cooperation_spec

@pytest.fixture
def chains_file(tmp_path):
    path = tmp_path / "chains.json"
    write_network(chains_spec(), path)
    return str(path)

@pytest.fixture
def cooperation_file(tmp_path):
    path = tmp_path / "cooperation.json"
    write_network(cooperation_spec(), path)
    return str(path)

def test_gen_prints_a_network(capsys):
    assert cli_main(["gen", "--sps", "2", "--nodes", "4", "--sessions", "1", "--seed", "9", "--price", "12"]) == 0

    document = json.loads(capsys.readouterr().out)
    assert document["providers"] == 2
    assert len(document["nodes"]) == 8
    assert document["params"]["price_per_rate"] == 12.0

def test_gen_writes_a_file(tmp_path):
    path = tmp_path / "net.json"

    assert cli_main(["gen", "--sps", "3", "--nodes", "5", "--seed", "4", "-o", str(path)]) == 0
    assert parse_network(path).providers == 3

def test_value(chains_file, capsys):
    assert cli_main(["value", chains_file, "--coalition", "1"]) == 0
    assert "855.0000" in capsys.readouterr().out

def test_value_of_every_coalition_as_csv(cooperation_file, capsys):
    assert cli_main(["value", cooperation_file, "--csv"]) == 0

    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "coalition,value"
    assert len(lines) == 5

@pytest.mark.parametrize("solver", ["highs", "simplex"])
def test_allocate_dual(cooperation_file, capsys, solver):
    assert cli_main(["allocate", cooperation_file, "--method", "dual", "--solver", solver]) == 0

    out = capsys.readouterr().out
    assert "240.0000" in out
    assert "360.0000" in out
    assert "total 600.0000" in out

def test_core_with_given_payoffs(chains_file, capsys):
    assert cli_main(["core", chains_file, "--x", "855", "--csv"]) == 0

    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "allocation,payoffs,imputation,in_core,violated"
    assert lines[1] == "given,855.0000,True,True,-"

def test_core_of_both_methods(cooperation_file, capsys):
    assert cli_main(["core", cooperation_file, "--csv"]) == 0

    lines = capsys.readouterr().out.splitlines()
    assert [line.split(",")[0] for line in lines[1:]] == ["dual", "shapley"]

def test_structures(tmp_path, capsys):
    path = tmp_path / "net.json"
    assert cli_main(["gen", "--sps", "3", "--nodes", "6", "--sessions", "1", "--seed", "3", "-o", str(path)]) == 0

    assert cli_main(["structures", str(path), "--csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "structure,mu_1,mu_2,mu_3,phi_1,phi_2,phi_3,v"
    assert len(lines) == 6

    assert cli_main(["structures", str(path)]) == 0
    out = capsys.readouterr().out
    assert "stable (shapley):" in out

def test_breakdown_and_sessions(chains_file, capsys):
    assert cli_main(["breakdown", chains_file]) == 0
    out = capsys.readouterr().out
    assert "1300.0000" in out
    assert "445.0000" in out

    assert cli_main(["sessions", chains_file, "--csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "session,owner,source,destination,rate_req,served,hops"
    assert [line.split(",")[-1] for line in lines[1:]] == ["3", "3", "4"]

def test_plot(tmp_path, capsys):
    network = tmp_path / "net.json"
    image = tmp_path / "core.svg"
    assert cli_main(["gen", "--sps", "3", "--nodes", "8", "--sessions", "2", "--seed", "2", "-o", str(network)]) == 0

    assert cli_main(["plot", str(network), "-o", str(image)]) == 0
    assert image.exists()
    assert "<svg" in image.read_text(encoding = "utf-8")

def test_plot_needs_an_output(chains_file, capsys):
    assert cli_main(["plot", chains_file]) == 1
    assert "meshcoop: error" in capsys.readouterr().err

def test_survey(tmp_path, capsys):
    assert cli_main(["survey", "--seeds", "2", "--sps", "2", "--nodes", "5", "--sessions", "1", "--csv", "--out-dir", str(tmp_path)]) == 0

    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "seed,grand_value,superadditive,monotone,dual_in_core,dual_degenerate,shapley_in_core"
    assert len(lines) == 3

@pytest.mark.parametrize("argv", [[], ["allocate"], ["allocate", "net.json", "--method", "nucleolus"], ["value", "net.json", "--coalition", "0"]])
def test_usage_errors(argv, capsys):
    assert cli_main(argv) == 2

def test_missing_file(tmp_path, capsys):
    assert cli_main(["value", str(tmp_path / "missing.json")]) == 1
    assert "meshcoop: error" in capsys.readouterr().err

def test_malformed_file(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{\"providers\": 1}", encoding = "utf-8")

    assert cli_main(["value", str(path)]) == 1
    assert "nodes" in capsys.readouterr().err

def test_topology(cooperation_file, tmp_path, capsys):
    alone = tmp_path / "sp1.svg"
    grand = tmp_path / "grand.svg"

    assert cli_main(["topology", cooperation_file, "--coalition", "1", "-o", str(alone)]) == 0
    assert capsys.readouterr().out.splitlines() == ["l1_1: 1->2 2->3 3->4"]

    assert cli_main(["topology", cooperation_file, "-o", str(grand)]) == 0
    assert "l1_1: 1->10 10->4" in capsys.readouterr().out
    assert "<svg" in grand.read_text(encoding = "utf-8")

def test_topology_needs_an_output(cooperation_file, capsys):
    assert cli_main(["topology", cooperation_file]) == 1
    assert "meshcoop: error" in capsys.readouterr().err

def test_negative_payoffs_after_an_equals_sign(chains_file, capsys):
    assert cli_main(["core", chains_file, "--x=-5", "--csv"]) == 0

    fields = capsys.readouterr().out.splitlines()[1].split(",")
    assert fields[:4] == ["given", "-5.0000", "False", "False"]

def test_seed_is_a_common_flag(chains_file, capsys):
    assert cli_main(["value", chains_file, "--coalition", "1", "--seed", "7"]) == 0
    assert "855.0000" in capsys.readouterr().out
