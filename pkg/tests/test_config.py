import json

import pytest
from pydantic import ValidationError

from pairnet.config import (
    ExperimentConfig,
    OrderKind,
    OrderPolicy,
    SolverCaps,
    TieBreakPlan,
    load_experiment_config,
    read_plan,
    write_plan,
)
from pairnet.errors import ParseError
from pairnet.instance import StructureKind


def test_caps_per_kind():
    caps = SolverCaps()
    assert caps.oracle_pairs("mst") == 12
    assert caps.oracle_pairs(StructureKind.TOUR) == 10
    assert caps.oracle_pairs("matching") == 12
    raised = caps.with_oracle_cap(14)
    assert (raised.mst_pairs, raised.tsp_pairs, raised.matching_pairs) == (14, 14, 14)
    assert raised.tsp_cap == caps.tsp_cap
    with pytest.raises(ValidationError):
        SolverCaps(tsp_cap=0)


def test_order_policy_keys():
    nodes = [3, 0, 2, 1]
    assert sorted(nodes, key=OrderPolicy().sort_key()) == [0, 1, 2, 3]
    assert sorted(nodes, key=OrderPolicy(kind="index-descending").sort_key()) == [3, 2, 1, 0]
    explicit = OrderPolicy(kind=OrderKind.EXPLICIT_PERMUTATION, order=[2, 0, 3, 1])
    assert sorted(nodes, key=explicit.sort_key()) == [2, 0, 3, 1]
    assert OrderPolicy.from_ranks({0: 1, 1: 0, 2: 1}).order == [1, 0, 2]


@pytest.mark.parametrize("order", [None, [0, 0, 1], [1, 2]])
def test_explicit_order_must_be_a_permutation(order):
    with pytest.raises(ValidationError):
        OrderPolicy(kind="explicit-permutation", order=order)


def test_plan_file_round_trip(tmp_path):
    plan = TieBreakPlan(free_pair_colors={1: True, 3: False}, euler_policy=OrderPolicy(kind="index-descending"), start_node=2)
    write_plan(plan, tmp_path / "plan.json")
    assert read_plan(tmp_path / "plan.json") == plan


def test_experiment_config_defaults_and_errors(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text(json.dumps({"objective": "min-max", "source": {"family": "tight-tsp", "lambdas": [4, 8]}}))
    config = load_experiment_config(path)
    assert config.kind is StructureKind.SPANNING_TREE
    assert config.source.lambdas == [4, 8]
    assert config.source.eps == "1/1024"
    assert ExperimentConfig().jobs == 1

    path.write_text(json.dumps({"source": {"family": "grid"}}))
    with pytest.raises(ParseError) as info:
        load_experiment_config(path)
    assert info.value.field == "source.family"

    path.write_text("{\n  \"kind\": \n")
    with pytest.raises(ParseError) as info:
        load_experiment_config(path)
    assert info.value.line is not None
