"""
Split-based approximation algorithms for 2-MST and 2-TSP.

Both algorithms take an MST T of all nodes, delete its heaviest edge and color
every pair that straddles the two components so that its left member is blue.
Remaining pairs follow a TieBreakPlan (default: p_i red iff i is odd).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from pairnet import weights as W
from pairnet.config import TieBreakPlan
from pairnet.errors import InvalidPlan, UnsupportedExperiment
from pairnet.instance import Coloring, Edge, MetricInstance, Objective, StructureKind, StructurePair
from pairnet.solvers import NodeSet, Tour, Tree, euler_shortcut, mst, mst_cost, shortcut
from pairnet.weights import Weight

logger = logging.getLogger(__name__)

# proven approximation factors per (structure, objective)
THEOREM_BOUNDS: Dict[Tuple[StructureKind, Objective], int] = {
    (StructureKind.SPANNING_TREE, Objective.MIN_SUM): 3,
    (StructureKind.SPANNING_TREE, Objective.MIN_MAX): 4,
    (StructureKind.TOUR, Objective.MIN_SUM): 4,
    (StructureKind.TOUR, Objective.MIN_MAX): 4,
}


@dataclass(frozen=True)
class SplitReport:
    tree: Tree
    cross: Edge
    c_T: Weight
    w_cross: Weight
    w_L: Weight
    w_R: Weight
    c_TL: Weight
    c_TR: Weight
    left: Tuple[int, ...]
    right: Tuple[int, ...]
    lone_pairs: Tuple[int, ...]
    free_pairs: Tuple[int, ...]
    pair_in_L: bool
    pair_in_R: bool


def _heaviest(tree: Tree) -> Weight:
    e = tree.max_edge()
    return W.ZERO if e is None else tree.nodes.w(*e)


def split_mst(instance: MetricInstance) -> SplitReport:
    tree = mst(NodeSet.of(instance))
    parts = tree.split()
    left = set(parts.left.nodes)
    lone, free = [], []
    in_l = in_r = False
    for i in range(instance.n_pairs):
        p_left, q_left = 2 * i in left, 2 * i + 1 in left
        if p_left != q_left:
            lone.append(i)
            continue
        free.append(i)
        in_l |= p_left
        in_r |= not p_left
    report = SplitReport(
        tree=tree,
        cross=parts.cross,
        c_T=tree.cost(),
        w_cross=parts.cross_weight,
        w_L=_heaviest(parts.left),
        w_R=_heaviest(parts.right),
        c_TL=parts.left.cost(),
        c_TR=parts.right.cost(),
        left=parts.left.nodes.nodes,
        right=parts.right.nodes.nodes,
        lone_pairs=tuple(lone),
        free_pairs=tuple(free),
        pair_in_L=in_l,
        pair_in_R=in_r,
    )
    logger.debug(
        "split: c(T)=%s w_x=%s |V_L|=%d |V_R|=%d lone=%d",
        W.to_text(report.c_T), W.to_text(report.w_cross), len(report.left), len(report.right), len(lone),
    )
    return report


def color_pairs(instance: MetricInstance, split: SplitReport, plan: Optional[TieBreakPlan] = None) -> Coloring:
    """Lone pairs: left member blue. Free pairs: plan, else p_i red iff i odd."""
    plan = plan or TieBreakPlan()
    lone = set(split.lone_pairs)
    for i in plan.free_pair_colors:
        if not 0 <= i < instance.n_pairs:
            raise InvalidPlan(f"plan colors unknown pair {i}")
        if i in lone:
            raise InvalidPlan(f"pair {i} straddles the split and cannot be colored by the plan")
    left = set(split.left)
    bits = []
    for i in range(instance.n_pairs):
        if i in lone:
            bits.append(2 * i not in left)
        else:
            bits.append(plan.free_pair_colors.get(i, i % 2 == 1))
    return Coloring(tuple(bits))


def approx_2mst(instance: MetricInstance, plan: Optional[TieBreakPlan] = None) -> StructurePair:
    split = split_mst(instance)
    coloring = color_pairs(instance, split, plan)
    blue = mst(NodeSet.of(instance, coloring.blue_nodes()))
    red = mst(NodeSet.of(instance, coloring.red_nodes()))
    return StructurePair(coloring, blue.edges, red.edges, StructureKind.SPANNING_TREE)


class TourPlan(NamedTuple):
    split: SplitReport
    coloring: Coloring
    circuit: Tour
    blue: Tour
    red: Tour


def plan_tours(instance: MetricInstance, plan: Optional[TieBreakPlan] = None) -> TourPlan:
    """Full trace of the tour algorithm: split, coloring, C, C_b and C_r."""
    plan = plan or TieBreakPlan()
    start = plan.start_node if plan.start_node is not None else 0
    if start >= instance.n_nodes:
        raise InvalidPlan(f"start node {start} outside 0..{instance.n_nodes - 1}")
    split = split_mst(instance)
    coloring = color_pairs(instance, split, plan)
    circuit = euler_shortcut(split.tree, start, None, plan.euler_policy)
    blue = shortcut(circuit, coloring.blue_nodes())
    red = shortcut(circuit, coloring.red_nodes())
    return TourPlan(split, coloring, circuit, blue, red)


def approx_2tsp(instance: MetricInstance, plan: Optional[TieBreakPlan] = None) -> StructurePair:
    trace = plan_tours(instance, plan)
    return StructurePair(trace.coloring, trace.blue.edges(), trace.red.edges(), StructureKind.TOUR)


def approximate(instance: MetricInstance, kind: StructureKind, plan: Optional[TieBreakPlan] = None) -> StructurePair:
    kind = StructureKind(kind)
    if kind is StructureKind.SPANNING_TREE:
        return approx_2mst(instance, plan)
    if kind is StructureKind.TOUR:
        return approx_2tsp(instance, plan)
    raise UnsupportedExperiment("no approximation algorithm for perfect matchings")


def theorem_bound(kind: StructureKind, objective: Objective) -> Optional[int]:
    return THEOREM_BOUNDS.get((StructureKind(kind), Objective(objective)))


@dataclass(frozen=True)
class DecompositionReport:
    c_T: Weight
    c_Tb: Weight
    c_Tr: Weight
    slack_a: Weight
    slack_b: Weight
    slack_c: Optional[Weight]
    slack_d: Optional[Weight]


def _node_colors(instance: MetricInstance, coloring: Union[Coloring, Sequence[bool]]) -> List[bool]:
    if isinstance(coloring, Coloring):
        return [coloring.is_red(v) for v in instance.nodes()]
    colors = [bool(c) for c in coloring]
    if len(colors) != instance.n_nodes:
        raise ValueError(f"need {instance.n_nodes} node colors, got {len(colors)}")
    return colors


def decomposition_report(instance: MetricInstance, coloring: Union[Coloring, Sequence[bool]]) -> DecompositionReport:
    """Exact slack of each split inequality for an arbitrary 2-coloring.

    `coloring` is a Coloring or a per-node sequence (True = red) that need not
    separate partners. slack_c / slack_d are None unless a split side is
    monochromatic; when both sides are, the smaller slack is reported.
    """
    split = split_mst(instance)
    red = _node_colors(instance, coloring)
    c_tr = mst_cost(NodeSet.of(instance, [v for v in instance.nodes() if red[v]]))
    c_tb = mst_cost(NodeSet.of(instance, [v for v in instance.nodes() if not red[v]]))
    total = W.normalize(c_tb + c_tr)
    worst = max(c_tb, c_tr)
    heavy = split.w_L + split.w_cross + split.w_R
    slack_a = W.normalize(3 * split.c_T - heavy - total)
    slack_b = W.normalize(2 * split.c_T - heavy - worst)

    sum_bounds, max_bounds = [], []
    if len({red[v] for v in split.left}) == 1:
        sum_bounds.append(split.c_TL + split.w_cross + 3 * split.c_TR - split.w_R)
        max_bounds.append(split.c_TL + split.w_cross + 2 * split.c_TR - split.w_R)
    if len({red[v] for v in split.right}) == 1:
        sum_bounds.append(split.c_TR + split.w_cross + 3 * split.c_TL - split.w_L)
        max_bounds.append(split.c_TR + split.w_cross + 2 * split.c_TL - split.w_L)
    slack_c = W.normalize(min(sum_bounds) - total) if sum_bounds else None
    slack_d = W.normalize(min(max_bounds) - worst) if max_bounds else None
    return DecompositionReport(split.c_T, c_tb, c_tr, slack_a, slack_b, slack_c, slack_d)
