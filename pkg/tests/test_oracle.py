import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pairnet.approx import approximate, decomposition_report, split_mst
from pairnet.config import SolverCaps
from pairnet.errors import OddSet, TooLarge, UnsupportedExperiment
from pairnet.generators import gen_random_metric, lift_colocated, random_matrix
from pairnet.instance import (
    Coloring,
    MetricInstance,
    Objective,
    StructureKind,
    cost,
    validate_solution,
)
from pairnet.oracle import (
    cross_edge_audit,
    enumerate_colorings,
    exact_opt,
    exact_ratio,
    ratio_experiment,
)
from pairnet.solvers import NodeSet, bottleneck_tsp, exact_tsp, mst_cost

from strategies import metric_instances

APPROX_CASES = [
    (StructureKind.SPANNING_TREE, Objective.MIN_SUM),
    (StructureKind.SPANNING_TREE, Objective.MIN_MAX),
    (StructureKind.TOUR, Objective.MIN_SUM),
    (StructureKind.TOUR, Objective.MIN_MAX),
]


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_enumerate_colorings_fixes_first_pair(n):
    found = list(enumerate_colorings(n))
    assert len(found) == 2 ** (n - 1)
    assert [c.index for c in found] == list(range(0, 2 ** n, 2))
    assert all(not c.bits[0] for c in found)


def test_enumerate_colorings_ranges():
    assert [c.index for c in enumerate_colorings(4, 2, 5)] == [4, 6, 8]
    assert list(enumerate_colorings(4, 8)) == []


@settings(max_examples=40, deadline=None)
@given(metric_instances(1, 5))
def test_oracle_matches_full_enumeration_for_trees(instance):
    result = exact_opt(instance, StructureKind.SPANNING_TREE, Objective.MIN_SUM)
    best = None
    for index in range(2 ** instance.n_pairs):
        coloring = Coloring.from_index(index, instance.n_pairs)
        value = mst_cost(NodeSet.of(instance, coloring.blue_nodes())) + mst_cost(NodeSet.of(instance, coloring.red_nodes()))
        best = value if best is None else min(best, value)
    assert result.best_value == best
    assert validate_solution(instance, result.best_solution) == []
    assert cost(instance, result.best_solution, Objective.MIN_SUM) == best


@settings(max_examples=30, deadline=None)
@given(metric_instances(1, 4), st.sampled_from(APPROX_CASES))
def test_approximation_never_beats_oracle(instance, case):
    kind, objective = case
    alg = cost(instance, approximate(instance, kind), objective)
    opt = exact_opt(instance, kind, objective).best_value
    assert alg >= opt


def test_lifted_triangle_tours(lifted_triangle):
    assert exact_opt(lifted_triangle, "tsp", "min-sum").best_value == 6
    assert exact_opt(lifted_triangle, "tsp", "min-max").best_value == 3
    assert exact_opt(lifted_triangle, "tsp", "bottleneck").best_value == 1


def test_single_pair_is_free():
    inst = MetricInstance.from_matrix([[0, 4], [4, 0]])
    result = exact_opt(inst, StructureKind.SPANNING_TREE, Objective.MIN_SUM)
    assert result.best_value == 0
    assert result.colorings_examined == 1
    assert result.coloring_index == 0
    assert result.values == {"min-sum": 0, "min-max": 0, "bottleneck": 0}


def test_ties_go_to_lowest_index():
    units = MetricInstance.from_matrix([[0 if u == v else 1 for v in range(6)] for u in range(6)])
    result = exact_opt(units, StructureKind.TOUR, Objective.MIN_SUM)
    assert result.coloring_index == 0
    assert result.best_value == 6
    assert result.colorings_examined == 4


def test_matching_oracle():
    inst = gen_random_metric(4, 3, "grid2d")
    result = exact_opt(inst, StructureKind.PERFECT_MATCHING, Objective.MIN_SUM)
    assert validate_solution(inst, result.best_solution) == []
    assert result.values["min-sum"] == result.best_value
    with pytest.raises(OddSet):
        exact_opt(gen_random_metric(3, 3), StructureKind.PERFECT_MATCHING, Objective.MIN_SUM)


def test_caps_are_enforced():
    inst = gen_random_metric(5, 0)
    with pytest.raises(TooLarge):
        exact_opt(inst, StructureKind.SPANNING_TREE, Objective.MIN_SUM, SolverCaps().with_oracle_cap(4))
    with pytest.raises(TooLarge):
        exact_opt(inst, StructureKind.TOUR, Objective.MIN_SUM, SolverCaps(tsp_pairs=4))


@pytest.mark.parametrize("kind, objective", APPROX_CASES + [(StructureKind.PERFECT_MATCHING, Objective.BOTTLENECK)])
def test_sharded_oracle_matches_sequential(kind, objective):
    inst = gen_random_metric(4, 11, "uniform-closure")
    sequential = exact_opt(inst, kind, objective)
    sharded = exact_opt(inst, kind, objective, jobs=3)
    assert sharded == sequential


@pytest.mark.parametrize(
    "alg, opt, expected",
    [
        (6, 3, Fraction(2)),
        (Fraction(7, 2), 2, Fraction(7, 4)),
        (0, 0, Fraction(1)),
        (3, 0, None),
    ],
)
def test_exact_ratio(alg, opt, expected):
    assert exact_ratio(alg, opt) == expected


def test_ratio_experiment_record():
    inst = gen_random_metric(3, 5)
    record = ratio_experiment(inst, StructureKind.SPANNING_TREE, Objective.MIN_SUM)
    assert record.bound == 3
    assert record.within_bound
    assert not record.infinite
    assert record.ratio == exact_ratio(record.alg_value, record.opt_value)


@pytest.mark.parametrize(
    "kind, objective",
    [(StructureKind.SPANNING_TREE, Objective.BOTTLENECK), (StructureKind.PERFECT_MATCHING, Objective.MIN_SUM)],
)
def test_ratio_experiment_rejects_unsupported(kind, objective):
    with pytest.raises(UnsupportedExperiment):
        ratio_experiment(gen_random_metric(2, 0), kind, objective)


@settings(max_examples=40, deadline=None)
@given(metric_instances(2, 5))
def test_cross_edge_claim_holds(instance):
    result = exact_opt(instance, StructureKind.SPANNING_TREE, Objective.MIN_SUM)
    split = split_mst(instance)
    audit = cross_edge_audit(instance, result, split)
    assert audit.holds is not False
    if audit.min_cross_weight is not None:
        assert audit.min_cross_weight >= split.w_cross


def test_cross_edge_audit_rejects_tours(lifted_triangle):
    result = exact_opt(lifted_triangle, StructureKind.TOUR, Objective.MIN_SUM)
    with pytest.raises(UnsupportedExperiment):
        cross_edge_audit(lifted_triangle, result)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 4), st.integers(0, 1000))
def test_lift_doubles_base_tour(cities, seed):
    base, _ = random_matrix(cities, seed, "uniform-closure")
    lifted = lift_colocated(base)
    tour = exact_tsp(NodeSet.of(base)).cost()
    assert exact_opt(lifted, StructureKind.TOUR, Objective.MIN_SUM).best_value == 2 * tour
    assert exact_opt(lifted, StructureKind.TOUR, Objective.MIN_MAX).best_value == tour


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 4), st.integers(0, 1000))
def test_lift_keeps_base_bottleneck_tour(cities, seed):
    base, _ = random_matrix(cities, seed, "weights12")
    lifted = lift_colocated(base)
    expected = bottleneck_tsp(NodeSet.of(base)).bottleneck()
    assert exact_opt(lifted, StructureKind.TOUR, Objective.BOTTLENECK).best_value == expected


def relabel(instance, order, flips):
    """Move pair i to position order[i], swapping its two nodes when flips[i]."""
    new = {}
    for i, j in enumerate(order):
        for b in (0, 1):
            new[2 * i + b] = 2 * j + (b ^ flips[i])
    matrix = [[0] * instance.n_nodes for _ in instance.nodes()]
    for u in instance.nodes():
        for v in instance.nodes():
            matrix[new[u]][new[v]] = instance.w(u, v)
    return MetricInstance.from_matrix(matrix)


@settings(max_examples=20, deadline=None)
@given(metric_instances(2, 4), st.data())
def test_relabeling_pairs_keeps_every_optimum(instance, data):
    order = data.draw(st.permutations(range(instance.n_pairs)))
    flips = data.draw(st.lists(st.booleans(), min_size=instance.n_pairs, max_size=instance.n_pairs))
    moved = relabel(instance, order, flips)
    kinds = [StructureKind.SPANNING_TREE, StructureKind.TOUR]
    if instance.n_pairs % 2 == 0:
        kinds.append(StructureKind.PERFECT_MATCHING)
    for kind in kinds:
        for objective in Objective:
            assert exact_opt(moved, kind, objective).best_value == exact_opt(instance, kind, objective).best_value


@settings(max_examples=30, deadline=None)
@given(
    metric_instances(1, 4),
    st.sampled_from([StructureKind.SPANNING_TREE, StructureKind.TOUR]),
    st.sampled_from(list(Objective)),
)
def test_swapping_colors_of_the_optimum(instance, kind, objective):
    result = exact_opt(instance, kind, objective)
    swapped = result.best_solution.swapped()
    assert swapped.coloring.index % 2 == 1
    assert validate_solution(instance, swapped) == []
    assert {obj.value: cost(instance, swapped, obj) for obj in Objective} == result.values


@settings(max_examples=30, deadline=None)
@given(metric_instances(1, 4), st.sampled_from([StructureKind.SPANNING_TREE, StructureKind.TOUR]))
def test_min_max_and_min_sum_optima_bracket_each_other(instance, kind):
    best_sum = exact_opt(instance, kind, Objective.MIN_SUM).best_value
    best_max = exact_opt(instance, kind, Objective.MIN_MAX).best_value
    assert best_max <= best_sum <= 2 * best_max


# ---------------------------------------------------------------------------
# acceptance sweeps


@pytest.mark.slow
@pytest.mark.parametrize("kind, objective", APPROX_CASES)
def test_ratio_bounds_on_random_instances(kind, objective):
    violations = []
    for k in range(200):
        inst = gen_random_metric(2 + k % 5, 1000 + k, ("weights12", "uniform-closure", "grid2d")[k % 3])
        record = ratio_experiment(inst, kind, objective)
        if not record.within_bound:
            violations.append((k, record.ratio))
    assert violations == []


@pytest.mark.slow
def test_lift_doubles_base_tour_sweep():
    for seed in range(50):
        base, _ = random_matrix(6, seed, "uniform-closure")
        lifted = lift_colocated(base)
        tour = exact_tsp(NodeSet.of(base)).cost()
        assert exact_opt(lifted, StructureKind.TOUR, Objective.MIN_SUM).best_value == 2 * tour
        assert exact_opt(lifted, StructureKind.TOUR, Objective.MIN_MAX).best_value == tour


@pytest.mark.slow
def test_decomposition_sweep():
    rng = random.Random(7)
    for k in range(1000):
        model = ("uniform-closure", "weights12")[k % 2]
        inst = gen_random_metric(1 + k % 7, k, model)
        for _ in range(50):
            coloring = Coloring.from_index(rng.randrange(2 ** inst.n_pairs), inst.n_pairs)
            report = decomposition_report(inst, coloring)
            assert report.slack_a >= 0 and report.slack_b >= 0
            assert report.slack_c is None or report.slack_c >= 0
            assert report.slack_d is None or report.slack_d >= 0


@pytest.mark.slow
def test_lift_keeps_base_bottleneck_tour_sweep():
    for seed in range(50):
        base, _ = random_matrix(6, seed, "weights12")
        expected = bottleneck_tsp(NodeSet.of(base)).bottleneck()
        assert exact_opt(lift_colocated(base), StructureKind.TOUR, Objective.BOTTLENECK).best_value == expected
