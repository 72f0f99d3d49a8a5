"""
Brute-force exact optimum over all colorings, ratio experiments and the
cross-edge audit.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

from pairnet import weights as W
from pairnet.approx import approximate, split_mst, theorem_bound, SplitReport
from pairnet.config import SolverCaps, TieBreakPlan
from pairnet.errors import OddSet, TooLarge, UnsupportedExperiment
from pairnet.instance import (
    Coloring,
    Edge,
    MetricInstance,
    Objective,
    StructureKind,
    StructurePair,
    combine,
    cost,
)
from pairnet.solvers import (
    NodeSet,
    bottleneck_perfect_matching,
    bottleneck_tsp,
    exact_tsp,
    min_perfect_matching,
    mst,
)
from pairnet.weights import Weight

logger = logging.getLogger(__name__)


def enumerate_colorings(n_pairs: int, lo: int = 0, hi: Optional[int] = None) -> Iterator[Coloring]:
    """Colorings with p_0 blue, by increasing index; lo/hi are ranks in 0..2^(n-1)."""
    total = 1 << (n_pairs - 1)
    hi = total if hi is None else min(hi, total)
    for rank in range(lo, hi):
        yield Coloring.from_index(2 * rank, n_pairs)


class ClassSolution(NamedTuple):
    edges: Tuple[Edge, ...]
    total: Weight
    bottleneck: Weight


class ClassSolver:
    """Memoized exact per-class structures keyed by the sorted node tuple."""

    def __init__(self, instance: MetricInstance, kind: StructureKind, objective: Objective, caps: SolverCaps):
        self.instance = instance
        self.kind = StructureKind(kind)
        self.objective = Objective(objective)
        self.caps = caps
        self.cache: Dict[Tuple[int, ...], ClassSolution] = {}
        self.hits = 0

    def solve(self, nodes: Tuple[int, ...]) -> ClassSolution:
        found = self.cache.get(nodes)
        if found is not None:
            self.hits += 1
            return found
        ns = NodeSet.of(self.instance, nodes)
        bottleneck_mode = self.objective is Objective.BOTTLENECK
        if self.kind is StructureKind.SPANNING_TREE:
            edges = mst(ns).edges
        elif self.kind is StructureKind.TOUR:
            tour = bottleneck_tsp(ns, self.caps.tsp_cap) if bottleneck_mode else exact_tsp(ns, self.caps.tsp_cap)
            edges = tour.edges()
        else:
            solver = bottleneck_perfect_matching if bottleneck_mode else min_perfect_matching
            edges = tuple(solver(ns, self.caps.matching_cap))
        weights = [self.instance.w(u, v) for u, v in edges]
        result = ClassSolution(tuple(edges), W.normalize(sum(weights, W.ZERO)), max(weights, default=W.ZERO))
        self.cache[nodes] = result
        return result

    def class_value(self, solution: ClassSolution) -> Weight:
        return solution.bottleneck if self.objective is Objective.BOTTLENECK else solution.total


class _Partial(NamedTuple):
    value: Optional[Weight]
    index: int
    blue: Tuple[Edge, ...]
    red: Tuple[Edge, ...]
    examined: int


def _search_range(instance: MetricInstance, kind, objective, caps: SolverCaps, lo: int, hi: int) -> _Partial:
    solver = ClassSolver(instance, kind, objective, caps)
    best = _Partial(None, -1, (), (), 0)
    examined = 0
    for coloring in enumerate_colorings(instance.n_pairs, lo, hi):
        examined += 1
        blue = solver.solve(coloring.blue_nodes())
        red = solver.solve(coloring.red_nodes())
        value = combine(solver.objective, solver.class_value(blue), solver.class_value(red))
        if best.value is None or value < best.value:
            best = _Partial(value, coloring.index, blue.edges, red.edges, 0)
    logger.debug("range %d..%d: %d colorings, %d cache hits", lo, hi, examined, solver.hits)
    return best._replace(examined=examined)


@dataclass(frozen=True)
class OracleResult:
    kind: StructureKind
    objective: Objective
    best_value: Weight
    best_solution: StructurePair
    colorings_examined: int
    coloring_index: int
    values: Dict[str, Weight] = field(default_factory=dict)


def _check_caps(instance: MetricInstance, kind: StructureKind, caps: SolverCaps) -> None:
    limit = caps.oracle_pairs(kind)
    if instance.n_pairs > limit:
        raise TooLarge(f"exact_opt[{kind.value}]", instance.n_pairs, limit)
    if kind is StructureKind.PERFECT_MATCHING and instance.n_pairs % 2:
        raise OddSet(f"classes of {instance.n_pairs} nodes have no perfect matching")


def exact_opt(
    instance: MetricInstance,
    kind: StructureKind,
    objective: Objective,
    caps: Optional[SolverCaps] = None,
    jobs: int = 1,
) -> OracleResult:
    """Optimum over every coloring; ties go to the lowest coloring index.

    With jobs > 1 the rank range is split into contiguous shards solved in a
    process pool and merged by (value, index).
    """
    kind, objective = StructureKind(kind), Objective(objective)
    caps = caps or SolverCaps()
    _check_caps(instance, kind, caps)
    total = 1 << (instance.n_pairs - 1)

    if jobs <= 1 or total < 2:
        partials = [_search_range(instance, kind, objective, caps, 0, total)]
    else:
        shards = min(jobs, total)
        bounds = [total * s // shards for s in range(shards + 1)]
        with ProcessPoolExecutor(max_workers=shards) as pool:
            futures = [
                pool.submit(_search_range, instance, kind, objective, caps, bounds[s], bounds[s + 1])
                for s in range(shards)
            ]
            partials = [f.result() for f in futures]

    best = min((p for p in partials if p.value is not None), key=lambda p: (p.value, p.index))
    examined = sum(p.examined for p in partials)
    coloring = Coloring.from_index(best.index, instance.n_pairs)
    solution = StructurePair(coloring, best.blue, best.red, kind)
    values = {obj.value: cost(instance, solution, obj) for obj in Objective}
    logger.info(
        "exact %s/%s on %d pairs: %s after %d colorings",
        kind.value, objective.value, instance.n_pairs, W.to_text(best.value), examined,
    )
    return OracleResult(kind, objective, best.value, solution, examined, best.index, values)


@dataclass(frozen=True)
class RatioRecord:
    kind: StructureKind
    objective: Objective
    n_pairs: int
    alg_value: Weight
    opt_value: Weight
    ratio: Optional[Fraction]
    bound: Optional[int]

    @property
    def infinite(self) -> bool:
        return self.ratio is None

    @property
    def within_bound(self) -> bool:
        if self.bound is None:
            return True
        return self.ratio is not None and self.ratio <= self.bound


def exact_ratio(alg: Weight, opt: Weight) -> Optional[Fraction]:
    """alg/opt as a Fraction; 0/0 is 1 and x/0 is None (infinite)."""
    if opt == 0:
        return Fraction(1) if alg == 0 else None
    return Fraction(alg) / Fraction(opt)


def ratio_experiment(
    instance: MetricInstance,
    kind: StructureKind,
    objective: Objective,
    plan: Optional[TieBreakPlan] = None,
    caps: Optional[SolverCaps] = None,
    jobs: int = 1,
) -> RatioRecord:
    kind, objective = StructureKind(kind), Objective(objective)
    if objective is Objective.BOTTLENECK:
        raise UnsupportedExperiment("no approximation algorithm for bottleneck objectives")
    if kind is StructureKind.PERFECT_MATCHING:
        raise UnsupportedExperiment("no approximation algorithm for perfect matchings")
    alg = cost(instance, approximate(instance, kind, plan), objective)
    opt = exact_opt(instance, kind, objective, caps, jobs).best_value
    ratio = exact_ratio(alg, opt)
    if ratio is None:
        logger.warning("optimum 0 but algorithm paid %s", W.to_text(alg))
    return RatioRecord(kind, objective, instance.n_pairs, alg, opt, ratio, theorem_bound(kind, objective))


@dataclass(frozen=True)
class CrossEdgeAudit:
    pairs_in_L: bool
    pairs_in_R: bool
    cross_edges_blue: int
    cross_edges_red: int
    qualifying_blue: int
    qualifying_red: int
    min_cross_weight: Optional[Weight]
    holds: Optional[bool]


def cross_edge_audit(instance: MetricInstance, result: OracleResult, split: Optional[SplitReport] = None) -> CrossEdgeAudit:
    """Count optimal-tree edges crossing the MST split.

    holds is None when neither side contains a whole pair (no claim).
    """
    if result.kind is not StructureKind.SPANNING_TREE:
        raise UnsupportedExperiment("the cross-edge audit applies to spanning trees")
    split = split or split_mst(instance)
    left = set(split.left)

    def crossing(edges):
        return [(u, v) for u, v in edges if (u in left) != (v in left)]

    blue = crossing(result.best_solution.blue_edges)
    red = crossing(result.best_solution.red_edges)
    q_blue = sum(1 for e in blue if instance.w(*e) >= split.w_cross)
    q_red = sum(1 for e in red if instance.w(*e) >= split.w_cross)
    weights = [instance.w(*e) for e in blue + red]

    if split.pair_in_L and split.pair_in_R:
        holds = q_blue >= 1 and q_red >= 1
    elif split.pair_in_L or split.pair_in_R:
        holds = q_blue + q_red >= 1
    else:
        holds = None
    return CrossEdgeAudit(
        split.pair_in_L, split.pair_in_R, len(blue), len(red), q_blue, q_red,
        min(weights) if weights else None, holds,
    )
