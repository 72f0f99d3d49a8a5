from fractions import Fraction

import pytest

from pairnet.errors import BadLambda, PairnetError
from pairnet.generators import (
    RANDOM_MODELS,
    gen_random_metric,
    gen_tight_mst,
    gen_tight_tsp,
    lift_colocated,
    random_matrix,
    tight_mst_plans,
    tight_tsp_plans,
)
from pairnet.instance import validate_metric

EPS = Fraction(1, 1024)


@pytest.mark.parametrize("model", RANDOM_MODELS)
def test_random_metric_is_deterministic_and_metric(model):
    first = gen_random_metric(5, 7, model)
    second = gen_random_metric(5, 7, model)
    assert first == second
    assert first.n_nodes == 10
    assert validate_metric(first) == []
    assert first.meta == {"source": "random", "model": model, "seed": 7}


def test_random_models_differ_by_seed():
    assert gen_random_metric(4, 1) != gen_random_metric(4, 2)


def test_weights12_uses_only_one_and_two():
    assert set(gen_random_metric(6, 3, "weights12").distinct_weights()) <= {1, 2}


def test_grid_model_keeps_points():
    inst = gen_random_metric(3, 0, "grid2d")
    assert len(inst.points) == 6
    (x0, y0), (x1, y1) = inst.points[0], inst.points[1]
    assert inst.w(0, 1) == abs(x0 - x1) + abs(y0 - y1)


def test_random_errors():
    with pytest.raises(PairnetError):
        gen_random_metric(0, 1)
    with pytest.raises(PairnetError):
        random_matrix(4, 0, "euclid")


def test_lift_places_partners_together(unit_triangle):
    inst = lift_colocated(unit_triangle)
    assert inst.n_pairs == 3
    assert all(inst.w(2 * i, 2 * i + 1) == 0 for i in range(3))
    assert inst.w(0, 5) == 1
    assert validate_metric(inst) == []
    assert lift_colocated(inst).n_pairs == 6


@pytest.mark.parametrize("lam, nodes", [(2, 16), (4, 40), (8, 88)])
def test_tight_mst_sizes(lam, nodes):
    inst = gen_tight_mst(lam, EPS)
    assert inst.n_nodes == nodes
    assert inst.meta["lambda"] == lam
    assert inst.meta["eps"] == "1/1024"


def test_tight_mst_geometry():
    inst = gen_tight_mst(4, EPS)
    assert validate_metric(inst) == []
    # every pair has q at its side's root
    for i in range(inst.n_pairs):
        side, _ = inst.points[2 * i]
        assert inst.points[2 * i + 1] == (side, 1)
    # leaf to leaf across the bridge
    assert inst.distinct_weights()[-1] == 2 + 2 + 1 + EPS


@pytest.mark.parametrize("lam", [0, 1, 3, 6, 12])
def test_tight_mst_rejects_bad_lambda(lam):
    with pytest.raises(BadLambda):
        gen_tight_mst(lam, EPS)


def test_tight_families_reject_nonpositive_eps():
    with pytest.raises(BadLambda):
        gen_tight_mst(4, 0)
    with pytest.raises(BadLambda):
        gen_tight_tsp(4, "-1/2")


@pytest.mark.parametrize("lam, nodes", [(2, 24), (4, 48)])
def test_tight_tsp_sizes(lam, nodes):
    inst = gen_tight_tsp(lam, EPS)
    assert inst.n_nodes == nodes
    assert len(set(inst.points)) == 2 * (3 * lam + 1)


def test_tight_tsp_geometry():
    inst = gen_tight_tsp(4, EPS)
    assert validate_metric(inst) == []
    # node 0 sits at the first spine point, node 1 at the left hub
    assert inst.w(0, 1) == 1
    assert inst.w(1, 2 * 3 * 4 * 2 - 1) == 1 + EPS


@pytest.mark.parametrize("lam", [0, 3, 5])
def test_tight_tsp_rejects_bad_lambda(lam):
    with pytest.raises(BadLambda):
        gen_tight_tsp(lam, EPS)


def test_tight_plans_cover_every_pair():
    adversarial, favorable = tight_mst_plans(4)
    assert sorted(adversarial.free_pair_colors) == list(range(20))
    assert sum(favorable.free_pair_colors.values()) == 10

    adversarial, favorable = tight_tsp_plans(4)
    assert adversarial.start_node == favorable.start_node == 1
    assert sorted(adversarial.euler_policy.order) == list(range(48))
    hubs = [v for v in range(1, 48, 2) if v != 25]
    assert adversarial.euler_policy.order[:23] == hubs
    assert adversarial.euler_policy.order[-1] == 25
