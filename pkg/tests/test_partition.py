import math

import pytest

from meshcoop import (Coalition, CoalitionStructure, CoalitionGame, SizeError, ValidationError, enumerate_partitions,
                      structure_table)

from tests.conftest import COOPERATION_RATES

@pytest.mark.parametrize("providers, count", [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52)])
def test_partition_counts(providers, count):
    structures = enumerate_partitions(providers)

    assert len(structures) == count
    assert len(set(structures)) == count

def test_partition_order():
    labels = [structure.label() for structure in enumerate_partitions(3)]

    assert labels == [
        "{{SP1}, {SP2}, {SP3}}",
        "{{SP1}, {SP2, SP3}}",
        "{{SP1, SP2}, {SP3}}",
        "{{SP1, SP3}, {SP2}}",
        "{{SP1, SP2, SP3}}"
    ]

def test_partitions_are_valid():
    for structure in enumerate_partitions(4):
        members = sorted(member for block in structure for member in block)
        assert members == [1, 2, 3, 4]

def test_partition_size_limit():
    with pytest.raises(SizeError):
        enumerate_partitions(13)

def test_structure_validation():
    with pytest.raises(ValidationError):
        CoalitionStructure([(1, 2), (2, 3)])

    with pytest.raises(ValidationError):
        CoalitionStructure([(1,), (3,)], 3)

    structure = CoalitionStructure([(3,), (1, 2)])
    assert structure.block_of(2) == Coalition.of((1, 2))
    assert structure.providers == 3
    assert not structure.is_grand

def test_table_rows(table_cf):
    matrix = structure_table(None, table_cf)

    assert len(matrix) == 5

    singletons = matrix.row([(1,), (2,), (3,)])
    assert singletons.dual == {1: 767.0, 2: 1101.0, 3: 976.0}
    assert singletons.shapley == {1: 767.0, 2: 1101.0, 3: 976.0}
    assert singletons.value == pytest.approx(2844.0)

    pair = matrix.row([(1, 2), (3,)])
    assert pair.shapley[1] == pytest.approx(783.5)
    assert pair.shapley[2] == pytest.approx(1117.5)
    assert pair.shapley[3] == pytest.approx(976.0)
    # Values alone carry no LP duals.
    assert pair.dual is None
    assert pair.payoff("dual_payoff", 1) is None

def test_grand_coalition_has_the_largest_value(table_cf):
    matrix = structure_table(None, table_cf)
    grand = matrix.row([(1, 2, 3)])

    assert grand.structure.is_grand
    assert all(grand.value >= row.value for row in matrix)

def test_stable_structures(table_cf):
    matrix = structure_table(None, table_cf)
    assert matrix.stable_structures("shapley") == [CoalitionStructure([(1, 2, 3)])]

def test_table_from_a_network(cooperation_network):
    cf = CoalitionGame(cooperation_network).characteristic_function()
    matrix = structure_table(cooperation_network, cf)
    first, second = COOPERATION_RATES

    assert [row.structure.label() for row in matrix] == ["{{SP1}, {SP2}}", "{{SP1, SP2}}"]

    grand = matrix.row([(1, 2)])
    assert grand.dual == {1: pytest.approx(8 * first), 2: pytest.approx(8 * second)}
    assert grand.value == pytest.approx(cf.value(3))
    assert matrix.stable_structures("dual_payoff") == [grand.structure]

def test_matrix_exports(table_cf):
    matrix = structure_table(None, table_cf)
    frame = matrix.to_frame()

    assert list(frame.columns) == ["structure", "mu_1", "mu_2", "mu_3", "phi_1", "phi_2", "phi_3", "v"]
    assert frame["v"].tolist() == pytest.approx([2844.0, 2974.0, 2877.0, 2936.0, 3062.0])
    assert math.isnan(frame.loc[4, "mu_1"])

    lines = matrix.to_csv().splitlines()
    assert lines[0] == "structure,mu_1,mu_2,mu_3,phi_1,phi_2,phi_3,v"
    assert len(lines) == 6

    text = matrix.to_text()
    assert "783.5000" in text
    assert "-" in text
