import numpy as np
import pytest

from meshcoop import CharacteristicFunction, UnsupportedDimensionError, Allocation, shapley
from meshcoop.Utils.Barycentric import VERTICES, to_barycentric, core_polygon, point_in_core, render_barycentric

# Every pair earns exactly its standalone values; only the grand coalition gains.
ADDITIVE_PAIRS = {(1,): 10, (2,): 10, (3,): 10, (1, 2): 20, (1, 3): 20, (2, 3): 20, (1, 2, 3): 60}

def test_point_coordinates(table_cf):
    point = to_barycentric(table_cf, [855, 1149, 1058], "x")

    assert point.label == "x"
    assert point.simplex_coords == pytest.approx((88 / 218, 48 / 218, 82 / 218))
    assert point.is_imputation

def test_vertices_give_the_gain_to_one_provider(table_cf):
    point = to_barycentric(table_cf, [767 + 218, 1101, 976])

    assert point.cartesian == pytest.approx(tuple(VERTICES[0]))
    assert point.is_imputation
    assert not point_in_core(table_cf, point)

def test_table_allocations_lie_in_the_core(table_cf):
    for allocation in ([855, 1149, 1058], shapley(table_cf)):
        assert point_in_core(table_cf, to_barycentric(table_cf, allocation))

def test_non_imputation_is_outside(table_cf):
    point = to_barycentric(table_cf, [700, 1300, 1062])

    assert not point.is_imputation
    assert not point_in_core(table_cf, point)

def test_core_polygon_respects_pair_constraints(table_cf):
    polygon = core_polygon(table_cf)

    assert len(polygon) >= 3
    assert np.allclose(polygon.sum(axis = 1), 1.0)
    assert np.all(polygon[:, 0] <= 88 / 218 + 1e-9)
    assert np.all(polygon[:, 1] <= 1 - 92 / 218 + 1e-9)
    assert np.all(polygon[:, 2] <= 1 - 33 / 218 + 1e-9)

def test_additive_pairs_keep_the_whole_triangle():
    cf = CharacteristicFunction.from_values(3, ADDITIVE_PAIRS)
    assert len(core_polygon(cf)) == 3

@pytest.mark.parametrize("values", [
    {(1,): 1, (2,): 2, (1, 2): 4},
    {(1,): 1, (2,): 1, (3,): 1, (1, 2): 2, (1, 3): 2, (2, 3): 2, (1, 2, 3): 3}
])
def test_unsupported_games(values):
    cf = CharacteristicFunction.from_values(max(max(key) for key in values), values)

    with pytest.raises(UnsupportedDimensionError):
        to_barycentric(cf, [1.0] * cf.providers)

def test_render_shades_the_unstable_region(tmp_path, table_cf):
    path = tmp_path / "core.svg"
    points = render_barycentric(table_cf, [Allocation.of([855, 1149, 1058], "dual_payoff"), shapley(table_cf)], path, "Table game")
    svg = path.read_text(encoding = "utf-8")

    assert [point.label for point in points] == ["dual_payoff", "shapley"]
    assert "unstable-region" in svg
    assert "core-region" in svg
    assert "point-0" in svg and "point-1" in svg

def test_render_without_shading(tmp_path):
    path = tmp_path / "core.svg"
    cf = CharacteristicFunction.from_values(3, ADDITIVE_PAIRS)

    render_barycentric(cf, [[20, 20, 20]], path)
    svg = path.read_text(encoding = "utf-8")

    assert "unstable-region" not in svg
    assert "imputations" in svg

def test_render_is_deterministic(tmp_path, table_cf):
    first = tmp_path / "first.svg"
    second = tmp_path / "second.svg"

    render_barycentric(table_cf, [shapley(table_cf)], first)
    render_barycentric(table_cf, [shapley(table_cf)], second)

    assert first.read_bytes() == second.read_bytes()
