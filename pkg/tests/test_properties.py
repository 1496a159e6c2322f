import numpy as np
import pytest

from meshcoop import (Params, Coalition, CoalitionGame, CharacteristicFunction, build_network, generate_random,
                      shapley, dual_payoff, in_core, check_superadditive, check_monotone, structure_table)
from meshcoop.Solver import LpProblem, LpSolution, LpStatus, HighsSolver, dual_of

def analyze(network, solver: str = "highs"):
    cf = CoalitionGame(network, solver = solver).characteristic_function()
    return cf, dual_payoff(network, cf), shapley(cf)

def check_game_axioms(network, cf, dual, split):
    grand = cf.grand_coalition

    assert check_superadditive(cf) == []
    assert check_monotone(cf) == []
    assert cf.routing(grand).check(network) == []

    assert dual.total() == pytest.approx(cf.value(grand), rel = 1e-6, abs = 1e-6)
    assert split.total() == pytest.approx(cf.value(grand), rel = 1e-6, abs = 1e-6)

    # Resources priced at the grand coalition's duals cover what every coalition earns alone.
    assert in_core(cf, dual).in_core

@pytest.mark.parametrize("seed", range(100))
def test_small_networks(seed):
    network = build_network(generate_random(3, 6, 2, seed = seed))
    check_game_axioms(network, *analyze(network))

@pytest.mark.parametrize("seed", range(20))
def test_backends_agree(seed):
    network = build_network(generate_random(2, 5, 1, seed = seed))

    highs = CoalitionGame(network, solver = "highs").characteristic_function()
    simplex = CoalitionGame(network, solver = "simplex").characteristic_function()

    for coalition in highs:
        assert simplex.value(coalition) == pytest.approx(highs.value(coalition), rel = 1e-6, abs = 1e-6)

@pytest.mark.slow
@pytest.mark.parametrize("seed", range(100))
def test_full_size_networks(seed):
    network = build_network(generate_random(3, 20, 3, seed = seed))
    check_game_axioms(network, *analyze(network))

def random_game(seed: int, providers: int = 4) -> CharacteristicFunction:
    rng = np.random.default_rng(seed)
    values = {mask: float(rng.uniform(0.0, 100.0)) for mask in range(1, 1 << providers)}
    return CharacteristicFunction.from_values(providers, values)

def permuted(cf: CharacteristicFunction, permutation: dict[int, int]) -> CharacteristicFunction:
    values = {}
    for coalition in cf:
        if (not coalition.is_empty()):
            values[Coalition.from_members(permutation[m] for m in coalition).mask] = cf.value(coalition)
    return CharacteristicFunction.from_values(cf.providers, values)

@pytest.mark.parametrize("seed", range(100))
def test_shapley_axioms(seed):
    cf = random_game(seed)
    other = random_game(seed + 1000)
    split = shapley(cf)

    # Efficiency
    assert split.total() == pytest.approx(cf.value(cf.grand_coalition))

    # Additivity
    assert shapley(cf + other).as_list() == pytest.approx([a + b for a, b in zip(split.as_list(), shapley(other).as_list())])

    # Anonymity: relabelling providers relabels their payoffs.
    permutation = {1: 3, 2: 1, 3: 4, 4: 2}
    relabelled = shapley(permuted(cf, permutation))
    for provider in range(1, 5):
        assert relabelled[permutation[provider]] == pytest.approx(split[provider])

@pytest.mark.parametrize("seed", range(20))
def test_shapley_dummy_provider(seed):
    cf = random_game(seed, 3)
    extra = 17.5

    # Provider 4 adds exactly its standalone value to every coalition.
    values = {}
    for coalition in cf:
        values[coalition.mask] = cf.value(coalition)
        values[coalition.with_member(4).mask] = cf.value(coalition) + extra

    split = shapley(CharacteristicFunction.from_values(4, values))

    assert split[4] == pytest.approx(extra)
    assert split.as_list()[:3] == pytest.approx(shapley(cf).as_list())

@pytest.mark.parametrize("seed", range(20))
def test_restrict_composes(seed):
    network = build_network(generate_random(3, 6, 2, seed = seed))

    for outer in range(1, 8):
        restricted = network.restrict(outer)
        for inner in range(1, 8):
            if ((inner & outer) == inner):
                assert restricted.restrict(inner) == network.restrict(inner)

@pytest.mark.parametrize("seed", range(20))
def test_derived_links_are_symmetric(seed):
    graph = build_network(generate_random(3, 6, 2, seed = seed)).to_graph()

    for source, target, capacity in graph.edges(data = "capacity"):
        assert graph.has_edge(target, source)
        assert graph.edges[target, source]["capacity"] == capacity

def grand_lp(seed: int) -> LpProblem:
    network = build_network(generate_random(3, 6, 2, params = Params(area_side = 300.0), seed = seed))
    return CoalitionGame(network).build_coalition_lp(Coalition.grand(3))

@pytest.mark.parametrize("seed", range(20))
def test_dual_of_dual_keeps_the_value(seed):
    lp = grand_lp(seed)
    solver = HighsSolver()

    assert solver.solve(dual_of(dual_of(lp))).value == pytest.approx(solver.solve(lp).value, rel = 1e-6, abs = 1e-6)

@pytest.mark.parametrize("seed", range(20))
def test_weak_duality_on_sampled_points(seed):
    lp = grand_lp(seed)
    solution = HighsSolver().solve(lp)
    rng = np.random.default_rng(seed)
    ineq, eq = lp.dense()

    for _ in range(10):
        # Every row is homogeneous or bounded by a non-negative capacity, so shrinking the optimum stays feasible.
        x = rng.uniform(0.0, 1.0) * solution.primal
        assert np.all(ineq @ x <= lp.ineq_bounds + 1e-6)
        assert np.allclose(eq @ x, lp.eq_values, atol = 1e-6)

        # Inequality rows have non-negative coefficients, so raising their multipliers stays dual feasible.
        shift = rng.uniform(0.0, 5.0, size = lp.ineq_count)
        dual = LpSolution(status = LpStatus.OPTIMAL, value = solution.value, primal = solution.primal, dual_ineq = solution.dual_ineq + shift, dual_eq = solution.dual_eq)

        primal_value = lp.objective_constant + float(lp.objective @ x)
        assert primal_value <= dual.dual_value(lp) + 1e-6

@pytest.mark.parametrize("seed", range(20))
def test_value_scales_with_the_objective(seed):
    lp = grand_lp(seed)
    scaled = LpProblem(3.5 * lp.objective, lp.ineq_matrix, lp.ineq_bounds, lp.eq_matrix, lp.eq_values, objective_constant = 3.5 * lp.objective_constant)
    solver = HighsSolver()

    assert solver.solve(scaled).value == pytest.approx(3.5 * solver.solve(lp).value, rel = 1e-6, abs = 1e-6)

@pytest.mark.parametrize("seed", range(10))
def test_value_scales_with_prices_and_capacities(seed):
    base = Params(area_side = 300.0)
    priced = Params(area_side = 300.0, price_per_rate = 25.0, cost_per_rate = 2.5)
    widened = Params(area_side = 300.0, bandwidth = 400e3, rate_req_range = (40.0, 160.0))

    def value(params):
        network = build_network(generate_random(3, 6, 2, params = params, seed = seed))
        return CoalitionGame(network).coalition_value(Coalition.grand(3))[0]

    expected = value(base)
    assert value(priced) == pytest.approx(2.5 * expected, rel = 1e-6, abs = 1e-6)
    assert value(widened) == pytest.approx(2.0 * expected, rel = 1e-6, abs = 1e-6)

@pytest.mark.parametrize("seed", range(20))
def test_structure_table_of_random_networks(seed):
    network = build_network(generate_random(3, 6, 2, params = Params(area_side = 300.0), seed = seed))
    cf = CoalitionGame(network).characteristic_function()
    matrix = structure_table(network, cf)
    standalone = {m: pytest.approx(cf.value(Coalition.singleton(m))) for m in (1, 2, 3)}

    grand = matrix.row([(1, 2, 3)])
    assert len(matrix) == 5
    assert all(grand.value >= row.value - 1e-6 for row in matrix)

    singletons = matrix.row([(1,), (2,), (3,)])
    assert singletons.dual == standalone
    assert singletons.shapley == standalone
