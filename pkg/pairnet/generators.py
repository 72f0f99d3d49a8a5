"""
Instance generators: random metrics, the co-located lift and the two tight
families that show the approximation bounds cannot be improved.
"""

from __future__ import annotations

import logging
import random
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx

from pairnet import weights as W
from pairnet.config import OrderPolicy, TieBreakPlan
from pairnet.errors import BadLambda, PairnetError
from pairnet.instance import MetricInstance, check_structure
from pairnet.weights import Weight

logger = logging.getLogger(__name__)

RANDOM_MODELS = ("weights12", "uniform-closure", "grid2d")


def _shortest_paths(matrix: Sequence[Sequence[Weight]]) -> List[List[Weight]]:
    size = len(matrix)
    graph = nx.complete_graph(size)
    for u, v in graph.edges():
        graph[u][v]["weight"] = matrix[u][v]
    dist = dict(nx.all_pairs_dijkstra_path_length(graph))
    return [[W.normalize(dist[u][v]) if u != v else 0 for v in range(size)] for u in range(size)]


def random_matrix(size: int, seed: int, model: str = "weights12"):
    """Seeded (matrix, points) over `size` nodes; points is None except for grid2d."""
    rng = random.Random(seed)
    matrix: List[List[Weight]] = [[0] * size for _ in range(size)]
    points = None

    if model == "weights12":
        for u in range(size):
            for v in range(u + 1, size):
                matrix[u][v] = matrix[v][u] = rng.randint(1, 2)
    elif model == "uniform-closure":
        for u in range(size):
            for v in range(u + 1, size):
                matrix[u][v] = matrix[v][u] = W.normalize(Fraction(rng.randint(4, 40), 4))
        matrix = _shortest_paths(matrix)
    elif model == "grid2d":
        span = 4 * size
        points = tuple((rng.randint(0, span), rng.randint(0, span)) for _ in range(size))
        for u in range(size):
            for v in range(u + 1, size):
                d = abs(points[u][0] - points[v][0]) + abs(points[u][1] - points[v][1])
                matrix[u][v] = matrix[v][u] = d
    else:
        raise PairnetError(f"unknown random model {model!r}; choose from {', '.join(RANDOM_MODELS)}")
    return matrix, points


def gen_random_metric(n_pairs: int, seed: int, model: str = "weights12") -> MetricInstance:
    """Deterministic in (n_pairs, seed, model)."""
    if n_pairs < 1:
        raise PairnetError("n_pairs must be at least 1")
    matrix, points = random_matrix(2 * n_pairs, seed, model)
    logger.debug("random %s instance: %d pairs, seed %d", model, n_pairs, seed)
    return MetricInstance.from_matrix(matrix, points=points, meta={"source": "random", "model": model, "seed": seed})


def lift_colocated(base: Sequence[Sequence]) -> MetricInstance:
    """One co-located pair per base city."""
    if isinstance(base, MetricInstance):
        base = base.weights
    cities = check_structure(base)
    m = len(cities)
    matrix = [[cities[u // 2][v // 2] for v in range(2 * m)] for u in range(2 * m)]
    return MetricInstance.from_matrix(matrix, meta={"source": "lift", "cities": m})


class TightCase(NamedTuple):
    instance: MetricInstance
    adversarial: TieBreakPlan
    favorable: TieBreakPlan


def _is_power_of_two(value: int) -> bool:
    return value >= 1 and value & (value - 1) == 0


def _point_metric(graph: nx.Graph, locations: List[Tuple]) -> List[List[Weight]]:
    dist = {p: nx.single_source_dijkstra_path_length(graph, p) for p in set(locations)}
    size = len(locations)
    return [
        [0 if u == v else W.normalize(dist[locations[u]][locations[v]]) for v in range(size)]
        for u in range(size)
    ]


# ---------------------------------------------------------------------------
# tight spanning-tree family


def gen_tight_mst(lam: int, eps: Weight) -> MetricInstance:
    """Two full binary trees with lam leaves each, roots joined by 1+eps.

    Points are heap-indexed per side (root 1). Each leaf point holds two
    nodes, each other non-root point one node, each root 3*lam-2 nodes.
    Pair i has p_i at a descendant point and q_i at its side's root.
    """
    if lam < 2 or not _is_power_of_two(lam):
        raise BadLambda(f"lambda must be a power of two >= 2, got {lam}")
    eps = W.as_weight(eps)
    if eps <= 0:
        raise BadLambda("eps must be positive")

    graph = nx.Graph()
    for side in "LR":
        for k in range(2, 2 * lam):
            graph.add_edge((side, k), (side, k // 2), weight=1)
    graph.add_edge(("L", 1), ("R", 1), weight=W.normalize(1 + eps))

    locations: List[Tuple] = []
    for side in "LR":
        for k in range(2, 2 * lam):
            for _ in range(2 if k >= lam else 1):
                locations.append((side, k))
                locations.append((side, 1))
    matrix = _point_metric(graph, locations)
    points = tuple((0 if side == "L" else 1, k) for side, k in locations)
    meta = {"source": "tight-mst", "lambda": lam, "eps": W.to_json(eps)}
    return MetricInstance.from_matrix(matrix, points=points, meta=meta)


def tight_mst_plans(lam: int) -> Tuple[TieBreakPlan, TieBreakPlan]:
    """(adversarial, favorable) colorings for gen_tight_mst(lam).

    Adversarial: every non-leaf descendant node blue, and at each leaf point
    the first pair has p red, the second p blue. Favorable: left
    descendants blue, right descendants red.
    """
    adversarial: Dict[int, bool] = {}
    favorable: Dict[int, bool] = {}
    pair = 0
    for side in "LR":
        for k in range(2, 2 * lam):
            copies = 2 if k >= lam else 1
            for copy in range(copies):
                adversarial[pair] = copies == 2 and copy == 0
                favorable[pair] = side == "R"
                pair += 1
    return TieBreakPlan(free_pair_colors=adversarial), TieBreakPlan(free_pair_colors=favorable)


def tight_mst_case(lam: int, eps: Weight) -> TightCase:
    adversarial, favorable = tight_mst_plans(lam)
    return TightCase(gen_tight_mst(lam, eps), adversarial, favorable)


def tight_mst_expected(lam: int, eps: Weight) -> Dict[str, Weight]:
    """Closed forms for gen_tight_mst; d = log2(lam)."""
    eps = W.as_weight(eps)
    d = lam.bit_length() - 1
    return {
        "c_T": W.normalize(4 * lam - 3 + eps),
        "adversarial_blue": W.normalize(4 * lam - 3 + eps),
        "adversarial_red": W.normalize(8 * lam - 4 * d - 7 + eps),
        "favorable_class": W.normalize(2 * lam + eps),
        "slack_a": 4 * d - 2,
    }


# ---------------------------------------------------------------------------
# tight tour family


def _tsp_column(k: int) -> Tuple[str, int]:
    """k-th descendant point of a side: l_1, a_1, b_1, l_2, ..."""
    j, slot = divmod(k, 3)
    return ("lab"[slot], j + 1)


def gen_tight_tsp(lam: int, eps: Weight) -> MetricInstance:
    """Two caterpillars joined at their l_0 points by a 1+eps bridge.

    Spine l_0..l_lam has unit edges, l_j carries leaves a_j, b_j at eps and
    l_lam - l_0 closes at 1+eps. 3*lam nodes sit at each l_0 and one node at
    every other point.
    """
    if lam < 2 or lam % 2:
        raise BadLambda(f"lambda must be even and >= 2, got {lam}")
    eps = W.as_weight(eps)
    if eps <= 0:
        raise BadLambda("eps must be positive")
    heavy = W.normalize(1 + eps)

    graph = nx.Graph()
    for side in "LR":
        for j in range(1, lam + 1):
            graph.add_edge((side, "l", j - 1), (side, "l", j), weight=1)
            graph.add_edge((side, "l", j), (side, "a", j), weight=eps)
            graph.add_edge((side, "l", j), (side, "b", j), weight=eps)
        graph.add_edge((side, "l", lam), (side, "l", 0), weight=heavy)
    graph.add_edge(("L", "l", 0), ("R", "l", 0), weight=heavy)

    locations: List[Tuple] = []
    for side in "LR":
        for k in range(3 * lam):
            kind, j = _tsp_column(k)
            locations.append((side, kind, j))
            locations.append((side, "l", 0))
    matrix = _point_metric(graph, locations)
    points = tuple((0 if side == "L" else 1, "lab".index(kind), j) for side, kind, j in locations)
    meta = {"source": "tight-tsp", "lambda": lam, "eps": W.to_json(eps)}
    return MetricInstance.from_matrix(matrix, points=points, meta=meta)


def tight_tsp_plans(lam: int) -> Tuple[TieBreakPlan, TieBreakPlan]:
    """(adversarial, favorable) plans for gen_tight_tsp(lam), both starting at node 1.

    Adversarial: column j descendants blue for odd j, red for even j, and
    the Euler walk defers b_j until after l_(j+1). Favorable: left
    descendants blue, right descendants red, leaves visited first.
    """
    n_side = 3 * lam
    right_hub = 2 * n_side + 1
    deferring: Dict[int, int] = {}
    leaf_first: Dict[int, int] = {}
    adversarial: Dict[int, bool] = {}
    favorable: Dict[int, bool] = {}
    for pair in range(2 * n_side):
        side_right = pair >= n_side
        kind, j = _tsp_column(pair % n_side)
        p, q = 2 * pair, 2 * pair + 1
        adversarial[pair] = j % 2 == 0
        favorable[pair] = side_right
        rank_adv = {"a": 1, "l": 2, "b": 3}[kind]
        rank_fav = {"a": 1, "b": 2, "l": 3}[kind]
        deferring[p], leaf_first[p] = rank_adv, rank_fav
        deferring[q] = leaf_first[q] = 0
    deferring[right_hub] = leaf_first[right_hub] = 4
    plans = []
    for colors, ranks in ((adversarial, deferring), (favorable, leaf_first)):
        plans.append(TieBreakPlan(free_pair_colors=colors, euler_policy=OrderPolicy.from_ranks(ranks), start_node=1))
    return plans[0], plans[1]


def tight_tsp_case(lam: int, eps: Weight) -> TightCase:
    adversarial, favorable = tight_tsp_plans(lam)
    return TightCase(gen_tight_tsp(lam, eps), adversarial, favorable)


def tight_tsp_expected(lam: int, eps: Weight) -> Dict[str, Weight]:
    """Closed forms for gen_tight_tsp, valid for even lam >= 4."""
    eps = W.as_weight(eps)
    return {
        "c_T": W.normalize(2 * lam + 1 + (4 * lam + 1) * eps),
        "adversarial_blue": W.normalize(4 * lam - 2 + (4 * lam + 2) * eps),
        "adversarial_red": W.normalize(4 * lam + 2 + (4 * lam + 2) * eps),
        "favorable_class": W.normalize(lam + 3 + (4 * lam + 3) * eps),
    }
