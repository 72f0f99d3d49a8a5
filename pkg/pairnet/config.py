"""
Typed configuration: solver caps, tie-break plans and experiment configs.

Everything here is a pydantic model so it can be loaded from (and written
back to) the JSON files under data_demo/configs/.
"""

from __future__ import annotations

import json
from enum import Enum
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveInt, ValidationError, model_validator

from pairnet.errors import ParseError
from pairnet.instance import Objective, StructureKind

# ---------------------------------------------------------------------------
# defaults

DEFAULT_CAPS = {
    "tsp_cap": 18,
    "matching_cap": 20,
    "mst_pairs": 12,
    "tsp_pairs": 10,
    "matching_pairs": 12,
    "c6_real_nodes": 48,
}

DEFAULT_EPS = "1/1024"


class SolverCaps(BaseModel):
    """Size limits for exact solvers; exceeding one raises TooLarge."""

    model_config = ConfigDict(frozen=True)

    tsp_cap: PositiveInt = DEFAULT_CAPS["tsp_cap"]
    matching_cap: PositiveInt = DEFAULT_CAPS["matching_cap"]
    mst_pairs: PositiveInt = DEFAULT_CAPS["mst_pairs"]
    tsp_pairs: PositiveInt = DEFAULT_CAPS["tsp_pairs"]
    matching_pairs: PositiveInt = DEFAULT_CAPS["matching_pairs"]
    c6_real_nodes: PositiveInt = DEFAULT_CAPS["c6_real_nodes"]

    def oracle_pairs(self, kind: StructureKind) -> int:
        kind = StructureKind(kind)
        if kind is StructureKind.SPANNING_TREE:
            return self.mst_pairs
        if kind is StructureKind.TOUR:
            return self.tsp_pairs
        return self.matching_pairs

    def with_oracle_cap(self, pairs: int) -> "SolverCaps":
        return self.model_copy(update={"mst_pairs": pairs, "tsp_pairs": pairs, "matching_pairs": pairs})


class OrderKind(str, Enum):
    INDEX_ASCENDING = "index-ascending"
    INDEX_DESCENDING = "index-descending"
    EXPLICIT_PERMUTATION = "explicit-permutation"


class OrderPolicy(BaseModel):
    """Child order for Euler walks. An explicit order lists every node once."""

    model_config = ConfigDict(frozen=True)

    kind: OrderKind = OrderKind.INDEX_ASCENDING
    order: Optional[List[NonNegativeInt]] = None

    @model_validator(mode="after")
    def _check_order(self):
        if self.kind is OrderKind.EXPLICIT_PERMUTATION:
            if self.order is None:
                raise ValueError("explicit-permutation needs an order list")
            if sorted(self.order) != list(range(len(self.order))):
                raise ValueError("order must be a permutation of 0..n-1")
        return self

    def sort_key(self):
        if self.kind is OrderKind.INDEX_DESCENDING:
            return lambda node: -node
        if self.kind is OrderKind.EXPLICIT_PERMUTATION:
            rank = {node: position for position, node in enumerate(self.order)}
            return lambda node: rank[node]
        return lambda node: node

    @classmethod
    def from_ranks(cls, ranks: Dict[int, int]) -> "OrderPolicy":
        """Explicit order sorting nodes by (rank, node)."""
        return cls(kind=OrderKind.EXPLICIT_PERMUTATION, order=sorted(ranks, key=lambda v: (ranks[v], v)))


class TieBreakPlan(BaseModel):
    """Choices the approximation algorithms leave open.

    free_pair_colors maps a pair index to True when p_i should be red.
    """

    free_pair_colors: Dict[int, bool] = Field(default_factory=dict)
    euler_policy: OrderPolicy = Field(default_factory=OrderPolicy)
    start_node: Optional[NonNegativeInt] = None


class SourceConfig(BaseModel):
    family: Literal["random", "tight-mst", "tight-tsp", "lift"] = "random"
    count: PositiveInt = 10
    pairs: List[PositiveInt] = Field(default_factory=lambda: [4])
    seed: int = 0
    model: Literal["weights12", "uniform-closure", "grid2d"] = "weights12"
    lambdas: List[PositiveInt] = Field(default_factory=lambda: [4])
    eps: str = DEFAULT_EPS
    plan: Literal["adversarial", "favorable"] = "favorable"
    cities: Optional[List[List[Union[int, str]]]] = None


class ExperimentConfig(BaseModel):
    kind: StructureKind = StructureKind.SPANNING_TREE
    objective: Objective = Objective.MIN_SUM
    source: SourceConfig = Field(default_factory=SourceConfig)
    plan: Optional[TieBreakPlan] = None
    caps: SolverCaps = Field(default_factory=SolverCaps)
    jobs: PositiveInt = 1
    csv: Optional[str] = None
    jsonl: Optional[str] = None
    db: Optional[str] = None


def _load_model(model, path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError(path, e.msg, line=e.lineno) from e
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise ParseError(path, first["msg"], field=".".join(str(p) for p in first["loc"])) from e


def read_plan(path) -> TieBreakPlan:
    return _load_model(TieBreakPlan, path)


def write_plan(plan: TieBreakPlan, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(plan.model_dump_json(indent=2))


def load_experiment_config(path) -> ExperimentConfig:
    return _load_model(ExperimentConfig, path)
