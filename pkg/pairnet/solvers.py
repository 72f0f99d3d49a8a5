"""
Exact single-class solvers: spanning trees, forests, tours and matchings.

All solvers work on a NodeSet (a weight matrix plus a sorted subset of its
nodes) and break ties on (weight, min endpoint, max endpoint).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from networkx.utils import UnionFind

from pairnet import weights as W
from pairnet.config import DEFAULT_CAPS, OrderPolicy
from pairnet.errors import BadK, EmptyNodeSet, OddSet, StartNotInTree, TooLarge
from pairnet.instance import Edge, MetricInstance, edge
from pairnet.weights import Weight

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NodeSet:
    weights: Sequence[Sequence[Weight]]
    nodes: Tuple[int, ...]

    def __post_init__(self):
        nodes = tuple(sorted(self.nodes))
        if len(set(nodes)) != len(nodes):
            raise ValueError("node indices must be distinct")
        if nodes and (nodes[0] < 0 or nodes[-1] >= len(self.weights)):
            raise ValueError(f"node index out of range 0..{len(self.weights) - 1}")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def of(cls, source: Union[MetricInstance, Sequence[Sequence[Weight]]], nodes: Optional[Iterable[int]] = None) -> "NodeSet":
        matrix = source.weights if isinstance(source, MetricInstance) else source
        return cls(matrix, tuple(range(len(matrix)) if nodes is None else nodes))

    def subset(self, nodes: Iterable[int]) -> "NodeSet":
        return NodeSet(self.weights, tuple(nodes))

    def w(self, u: int, v: int) -> Weight:
        return self.weights[u][v]

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    def __contains__(self, node) -> bool:
        return node in self.nodes

    def sorted_edges(self) -> List[Edge]:
        ns = self.nodes
        pairs = [(ns[i], ns[j]) for i in range(len(ns)) for j in range(i + 1, len(ns))]
        return sorted(pairs, key=lambda e: (self.w(*e), e[0], e[1]))


def edges_weight(ns: NodeSet, edges: Iterable[Edge]) -> Weight:
    return W.normalize(sum((ns.w(u, v) for u, v in edges), W.ZERO))


class TreeSplit(NamedTuple):
    cross: Edge
    cross_weight: Weight
    left: "Tree"
    right: "Tree"


@dataclass(frozen=True)
class Tree:
    nodes: NodeSet
    edges: Tuple[Edge, ...]
    root: Optional[int] = None

    def cost(self) -> Weight:
        return edges_weight(self.nodes, self.edges)

    def adjacency(self) -> Dict[int, List[int]]:
        adj: Dict[int, List[int]] = {v: [] for v in self.nodes}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def max_edge(self) -> Optional[Edge]:
        """Heaviest edge; among equal weights the lexicographically smallest."""
        if not self.edges:
            return None
        return min(self.edges, key=lambda e: (-self.nodes.w(*e), e[0], e[1]))

    def split(self) -> TreeSplit:
        """Delete the max edge; the left side holds its smaller endpoint."""
        cross = self.max_edge()
        if cross is None:
            raise EmptyNodeSet("a tree without edges cannot be split")
        adj = self.adjacency()
        adj[cross[0]].remove(cross[1])
        adj[cross[1]].remove(cross[0])
        seen = {cross[0]}
        stack = [cross[0]]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        left_nodes = self.nodes.subset(seen)
        right_nodes = self.nodes.subset(v for v in self.nodes if v not in seen)
        left = Tree(left_nodes, tuple(e for e in self.edges if e[0] in seen and e[1] in seen))
        right = Tree(right_nodes, tuple(e for e in self.edges if e != cross and e[0] not in seen))
        return TreeSplit(cross, self.nodes.w(*cross), left, right)


@dataclass(frozen=True)
class Tour:
    nodes: NodeSet
    order: Tuple[int, ...]

    def edges(self) -> Tuple[Edge, ...]:
        """Cycle edges: none for k <= 1, a doubled edge for k = 2."""
        k = len(self.order)
        if k <= 1:
            return ()
        if k == 2:
            e = edge(*self.order)
            return (e, e)
        return tuple(edge(self.order[i], self.order[(i + 1) % k]) for i in range(k))

    def cost(self) -> Weight:
        return edges_weight(self.nodes, self.edges())

    def bottleneck(self) -> Weight:
        return max((self.nodes.w(u, v) for u, v in self.edges()), default=W.ZERO)


def min_forest(nodes: NodeSet, k: int) -> List[Edge]:
    """Kruskal stopped after |nodes| - k edges."""
    if not len(nodes):
        raise EmptyNodeSet("min_forest on an empty node set")
    if not 1 <= k <= len(nodes):
        raise BadK(f"k={k} outside 1..{len(nodes)}")
    target = len(nodes) - k
    uf = UnionFind(nodes)
    chosen: List[Edge] = []
    if target == 0:
        return chosen
    for u, v in nodes.sorted_edges():
        if uf[u] != uf[v]:
            uf.union(u, v)
            chosen.append((u, v))
            if len(chosen) == target:
                break
    return chosen


def mst(nodes: NodeSet) -> Tree:
    return Tree(nodes, tuple(min_forest(nodes, 1)))


def mst_cost(nodes: NodeSet) -> Weight:
    if not len(nodes):
        return W.ZERO
    return mst(nodes).cost()


# ---------------------------------------------------------------------------
# tours


def _held_karp(nodes: NodeSet, allowed: Optional[Callable[[int, int], bool]] = None) -> Optional[Tour]:
    """Min-cost Hamiltonian cycle using only allowed edges, or None."""
    ns = nodes.nodes
    k = len(ns)
    ok = allowed or (lambda u, v: True)
    if k <= 1:
        return Tour(nodes, ns)
    if k == 2:
        return Tour(nodes, ns) if ok(ns[0], ns[1]) else None

    # ns[0] is the fixed start; bit j stands for ns[j + 1]
    m = k - 1
    w = [[nodes.w(a, b) if ok(a, b) else None for b in ns] for a in ns]
    full = (1 << m) - 1
    best: List[List[Optional[Weight]]] = [[None] * m for _ in range(1 << m)]
    parent: List[List[int]] = [[-1] * m for _ in range(1 << m)]
    for j in range(m):
        if w[0][j + 1] is not None:
            best[1 << j][j] = w[0][j + 1]
    for mask in range(1, full + 1):
        row = best[mask]
        for j in range(m):
            here = row[j]
            if here is None:
                continue
            for nxt in range(m):
                bit = 1 << nxt
                if mask & bit or w[j + 1][nxt + 1] is None:
                    continue
                value = here + w[j + 1][nxt + 1]
                slot = best[mask | bit]
                if slot[nxt] is None or value < slot[nxt]:
                    slot[nxt] = value
                    parent[mask | bit][nxt] = j
    last, total = -1, None
    for j in range(m):
        if best[full][j] is None or w[j + 1][0] is None:
            continue
        value = best[full][j] + w[j + 1][0]
        if total is None or value < total:
            last, total = j, value
    if total is None:
        return None
    order = []
    mask, j = full, last
    while j != -1:
        order.append(ns[j + 1])
        mask, j = mask ^ (1 << j), parent[mask][j]
    order.append(ns[0])
    return Tour(nodes, tuple(reversed(order)))


def exact_tsp(nodes: NodeSet, cap: int = DEFAULT_CAPS["tsp_cap"]) -> Tour:
    """Held-Karp over subsets of the non-start nodes."""
    if not len(nodes):
        raise EmptyNodeSet("exact_tsp on an empty node set")
    if len(nodes) > cap:
        raise TooLarge("exact_tsp", len(nodes), cap)
    logger.debug("held-karp on %d nodes", len(nodes))
    return _held_karp(nodes)


def _thresholds(nodes: NodeSet) -> List[Weight]:
    ns = nodes.nodes
    return sorted({nodes.w(ns[i], ns[j]) for i in range(len(ns)) for j in range(i + 1, len(ns))})


def _threshold_search(nodes: NodeSet, solve):
    """Smallest distinct weight t for which solve(t) succeeds."""
    candidates = _thresholds(nodes)
    lo, hi = 0, len(candidates) - 1
    found = solve(candidates[hi])
    while lo < hi:
        mid = (lo + hi) // 2
        attempt = solve(candidates[mid])
        if attempt is not None:
            hi, found = mid, attempt
        else:
            lo = mid + 1
    logger.debug("threshold search settled on %s", W.to_text(candidates[hi]))
    return found


def bottleneck_tsp(nodes: NodeSet, cap: int = DEFAULT_CAPS["tsp_cap"]) -> Tour:
    """Tour minimizing the heaviest edge; cheapest such tour on ties."""
    if not len(nodes):
        raise EmptyNodeSet("bottleneck_tsp on an empty node set")
    if len(nodes) > cap:
        raise TooLarge("bottleneck_tsp", len(nodes), cap)
    if len(nodes) <= 2:
        return Tour(nodes, nodes.nodes)
    return _threshold_search(nodes, lambda t: _held_karp(nodes, lambda u, v: nodes.w(u, v) <= t))


def euler_shortcut(
    tree: Tree,
    start: int,
    subset: Optional[Iterable[int]] = None,
    policy: Optional[OrderPolicy] = None,
) -> Tour:
    """Walk the doubled tree from start and keep first visits within subset."""
    if start not in tree.nodes:
        raise StartNotInTree(f"start node {start} is not in the tree")
    key = (policy or OrderPolicy()).sort_key()
    adj = tree.adjacency()
    keep = set(tree.nodes) if subset is None else set(subset)

    visited = {start}
    order = [start]
    stack = [iter(sorted(adj[start], key=key))]
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            continue
        if nxt in visited:
            continue
        visited.add(nxt)
        order.append(nxt)
        stack.append(iter(sorted(adj[nxt], key=key)))
    return Tour(tree.nodes.subset(keep) if subset is not None else tree.nodes, tuple(v for v in order if v in keep))


def shortcut(tour: Tour, subset: Iterable[int]) -> Tour:
    keep = set(subset)
    return Tour(tour.nodes.subset(keep), tuple(v for v in tour.order if v in keep))


# ---------------------------------------------------------------------------
# matchings


def _matching_dp(nodes: NodeSet, allowed: Optional[Callable[[int, int], bool]] = None) -> Optional[List[Edge]]:
    ns = nodes.nodes
    k = len(ns)
    ok = allowed or (lambda u, v: True)
    full = (1 << k) - 1

    @lru_cache(maxsize=None)
    def solve(mask: int):
        # match the lowest unmatched node; returns (cost, partner choices) or None
        if mask == full:
            return (W.ZERO, ())
        low = (~mask & (mask + 1)).bit_length() - 1
        best = None
        for j in range(low + 1, k):
            if mask & (1 << j) or not ok(ns[low], ns[j]):
                continue
            rest = solve(mask | (1 << low) | (1 << j))
            if rest is None:
                continue
            value = rest[0] + nodes.w(ns[low], ns[j])
            if best is None or value < best[0]:
                best = (value, ((ns[low], ns[j]),) + rest[1])
        return best

    result = solve(0)
    solve.cache_clear()
    return None if result is None else list(result[1])


def min_perfect_matching(nodes: NodeSet, cap: int = DEFAULT_CAPS["matching_cap"]) -> List[Edge]:
    if len(nodes) % 2:
        raise OddSet(f"{len(nodes)} nodes have no perfect matching")
    if len(nodes) > cap:
        raise TooLarge("min_perfect_matching", len(nodes), cap)
    return _matching_dp(nodes) or []


def bottleneck_perfect_matching(nodes: NodeSet, cap: int = DEFAULT_CAPS["matching_cap"]) -> List[Edge]:
    """Perfect matching minimizing the heaviest edge; cheapest on ties."""
    if len(nodes) % 2:
        raise OddSet(f"{len(nodes)} nodes have no perfect matching")
    if len(nodes) > cap:
        raise TooLarge("bottleneck_perfect_matching", len(nodes), cap)
    if not len(nodes):
        return []
    return _threshold_search(nodes, lambda t: _matching_dp(nodes, lambda u, v: nodes.w(u, v) <= t))
