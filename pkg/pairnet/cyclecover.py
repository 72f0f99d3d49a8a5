"""
Dummy-graph view of perfect 2-matchings and the C6-cover search.

Each pair (p_i, q_i) becomes a triple p_i - d_i - q_i joined by unit dummy
edges. A perfect 2-matching that uses only unit real edges is then the same
thing as a cycle cover of the dummy graph whose cycles all have length a
multiple of 6, i.e. an even number of real edges per cycle.

Real nodes keep their instance numbering; dummy d_i is node 2n + i.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from pairnet import weights as W
from pairnet.config import DEFAULT_CAPS
from pairnet.errors import BadCover, OddSet, TooLarge
from pairnet.instance import (
    Coloring,
    Edge,
    MetricInstance,
    StructureKind,
    StructurePair,
    Violation,
    edge,
)
from pairnet.weights import Weight

logger = logging.getLogger(__name__)

OPEN = -1


# ---------------------------------------------------------------------------
# search engine


class CoverSearch:
    """Backtracking over one real edge per real node.

    `edges` may contain parallel edges; each carries a hashable label.
    `stubs` are labelled edges from a real node to the outside of the graph:
    a chain that leaves through a stub is never closed, so parity is only
    enforced on cycles that close inside the graph.
    """

    def __init__(
        self,
        n_pairs: int,
        edges: Sequence[Tuple[int, int, Hashable]],
        stubs: Sequence[Tuple[int, Hashable]] = (),
    ):
        self.n_pairs = n_pairs
        self.edges = list(edges)
        self.stubs = list(stubs)
        size = 2 * n_pairs
        self.options: List[List[Tuple[int, Hashable]]] = [[] for _ in range(size)]
        for u, v, label in self.edges:
            if u // 2 == v // 2:
                raise BadCover(f"edge {label!r} joins partners {u} and {v}")
            self.options[u].append((v, label))
            self.options[v].append((u, label))
        for node, label in self.stubs:
            self.options[node].append((OPEN, label))
        for opts in self.options:
            opts.sort(key=lambda o: (o[0] == OPEN, o[0], str(o[1])))

    def solutions(self) -> Iterator[Dict[int, Tuple[int, Hashable]]]:
        """Yield {node: (mate or OPEN, label)} for every admissible choice."""
        size = 2 * self.n_pairs
        end = [v ^ 1 for v in range(size)]
        count = [1] * size
        chosen: Dict[int, Tuple[int, Hashable]] = {}

        def admissible(x: int, y: int) -> bool:
            if y == OPEN:
                return True
            if y in chosen:
                return False
            if end[x] == y:
                return count[x] % 2 == 0
            return True

        def pick() -> Optional[int]:
            best, best_key = None, None
            for x in range(size):
                if x in chosen:
                    continue
                n_opts = sum(1 for y, _ in self.options[x] if admissible(x, y))
                key = (n_opts, x)
                if best_key is None or key < best_key:
                    best, best_key = x, key
                    if n_opts == 0:
                        break
            return best

        def search() -> Iterator[Dict[int, Tuple[int, Hashable]]]:
            x = pick()
            if x is None:
                yield dict(chosen)
                return
            for y, label in self.options[x]:
                if not admissible(x, y):
                    continue
                a = end[x]
                saved = []
                if y == OPEN:
                    chosen[x] = (OPEN, label)
                    if a != OPEN:
                        saved.append((a, end[a], count[a]))
                        end[a] = OPEN
                elif a == y:
                    chosen[x] = (y, label)
                    chosen[y] = (x, label)
                else:
                    b = end[y]
                    total = count[x] + count[y]
                    chosen[x] = (y, label)
                    chosen[y] = (x, label)
                    for node in (a, b):
                        if node != OPEN:
                            saved.append((node, end[node], count[node]))
                    if a != OPEN:
                        end[a], count[a] = b, total
                    if b != OPEN:
                        end[b], count[b] = a, total
                yield from search()
                for node, old_end, old_count in reversed(saved):
                    end[node], count[node] = old_end, old_count
                chosen.pop(x, None)
                if y != OPEN:
                    chosen.pop(y, None)

        yield from search()


# ---------------------------------------------------------------------------
# dummy graph


@dataclass(frozen=True)
class DummyGraph:
    n_pairs: int
    unit_edges: Tuple[Edge, ...]
    threshold: Weight = 1
    weights: Optional[Tuple[Tuple[Weight, ...], ...]] = field(default=None, compare=False)
    labels: Optional[Dict[int, str]] = field(default=None, compare=False)

    @property
    def n_real(self) -> int:
        return 2 * self.n_pairs

    @property
    def n_nodes(self) -> int:
        return 3 * self.n_pairs

    def dummy(self, pair: int) -> int:
        return 2 * self.n_pairs + pair

    def dummy_edges(self) -> List[Edge]:
        found = []
        for i in range(self.n_pairs):
            found.append((2 * i, self.dummy(i)))
            found.append((2 * i + 1, self.dummy(i)))
        return found

    def real_weight(self, u: int, v: int) -> Weight:
        if self.weights is not None:
            return self.weights[u][v]
        return 1 if edge(u, v) in set(self.unit_edges) else 2

    def node_label(self, node: int) -> str:
        if self.labels and node in self.labels:
            return self.labels[node]
        if node >= self.n_real:
            return f"d{node - self.n_real}"
        return f"{'p' if node % 2 == 0 else 'q'}{node // 2}"

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        for v in range(self.n_nodes):
            role = "dummy" if v >= self.n_real else "real"
            graph.add_node(v, role=role, label=self.node_label(v))
        for u, v in self.dummy_edges():
            graph.add_edge(u, v, weight=1, kind="dummy")
        for u, v in self.unit_edges:
            graph.add_edge(u, v, weight=W.to_text(self.real_weight(u, v)), kind="real")
        return graph

    def structural_violations(self) -> List[Violation]:
        graph = self.to_networkx()
        found = []
        for v in range(self.n_real, self.n_nodes):
            nbrs = list(graph.neighbors(v))
            if len(nbrs) != 2 or any(graph.nodes[x]["role"] != "real" for x in nbrs):
                found.append(Violation("dummy-degree", f"{self.node_label(v)} neighbors {nbrs}"))
        for v in range(self.n_real):
            dummies = [x for x in graph.neighbors(v) if graph.nodes[x]["role"] == "dummy"]
            if len(dummies) != 1:
                found.append(Violation("real-dummy", f"{self.node_label(v)} has {len(dummies)} dummy neighbors"))
        for u, v in self.unit_edges:
            if u // 2 == v // 2:
                found.append(Violation("partner-edge", f"unit edge ({u},{v}) joins partners"))
        return found

    def to_instance(self) -> MetricInstance:
        """{1,2} instance: 1 on unit edges, 2 elsewhere."""
        unit = set(self.unit_edges)
        matrix = [
            [0 if u == v else (1 if edge(u, v) in unit else 2) for v in range(self.n_real)]
            for u in range(self.n_real)
        ]
        return MetricInstance.from_matrix(matrix)

    def search(self) -> CoverSearch:
        return CoverSearch(self.n_pairs, [(u, v, (u, v)) for u, v in self.unit_edges])

    def to_json(self) -> dict:
        return {
            "triples": self.n_pairs,
            "real_edges": [[u, v, W.to_json(self.real_weight(u, v))] for u, v in self.unit_edges],
            "threshold": W.to_json(self.threshold),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "DummyGraph":
        threshold = W.as_weight(doc.get("threshold", 1))
        edges = tuple(edge(u, v) for u, v, w in doc["real_edges"] if W.as_weight(w) <= threshold)
        return cls(int(doc["triples"]), edges, threshold)

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json(), f, indent=2)

    def write_dot(self, path) -> None:
        nx.nx_pydot.write_dot(self.to_networkx(), str(path))


def to_dummy_graph(instance: MetricInstance, unit_threshold: Weight = 1, labels: Optional[Dict[int, str]] = None) -> DummyGraph:
    """Real edges of weight <= unit_threshold become unit edges; partner edges are dropped."""
    unit_threshold = W.as_weight(unit_threshold)
    unit = tuple(
        (u, v)
        for u in instance.nodes()
        for v in range(u + 1, instance.n_nodes)
        if u // 2 != v // 2 and instance.w(u, v) <= unit_threshold
    )
    graph = DummyGraph(instance.n_pairs, unit, unit_threshold, instance.weights, labels)
    logger.debug("dummy graph: %d triples, %d unit edges at threshold %s", instance.n_pairs, len(unit), W.to_text(unit_threshold))
    return graph


# ---------------------------------------------------------------------------
# covers


@dataclass(frozen=True)
class CycleCover:
    cycles: Tuple[Tuple[int, ...], ...]

    def lengths(self) -> List[int]:
        return [len(c) for c in self.cycles]


def cycles_from_mates(g: DummyGraph, mate: Dict[int, int]) -> CycleCover:
    seen = set()
    cycles = []
    for start in range(g.n_real):
        if start in seen:
            continue
        cycle = []
        x = start
        while True:
            partner = x ^ 1
            cycle.extend([x, g.dummy(x // 2), partner])
            seen.update((x, partner))
            x = mate[partner]
            if x == start:
                break
            if x in seen:
                raise BadCover(f"real edges do not form cycles through node {x}")
        cycles.append(tuple(cycle))
    return CycleCover(tuple(cycles))


def cover_real_edges(g: DummyGraph, cover: CycleCover) -> List[Edge]:
    found = []
    for cycle in cover.cycles:
        k = len(cycle)
        for i in range(k):
            u, v = cycle[i], cycle[(i + 1) % k]
            if u < g.n_real and v < g.n_real:
                found.append(edge(u, v))
    return sorted(found)


def iter_c6_covers(g: DummyGraph, cap: int = DEFAULT_CAPS["c6_real_nodes"]) -> Iterator[CycleCover]:
    if g.n_real > cap:
        raise TooLarge("c6 cover search", g.n_real, cap)
    for solution in g.search().solutions():
        yield cycles_from_mates(g, {x: mate for x, (mate, _) in solution.items()})


def find_c6_cover(g: DummyGraph, cap: int = DEFAULT_CAPS["c6_real_nodes"]) -> Optional[CycleCover]:
    cover = next(iter_c6_covers(g, cap), None)
    logger.debug("c6 cover on %d triples: %s", g.n_pairs, "found" if cover else "none")
    return cover


def cover_violations(g: DummyGraph, cover: CycleCover) -> List[Violation]:
    found = []
    unit = set(g.unit_edges)
    dummies = set(g.dummy_edges())
    counts: Dict[int, int] = {}
    for cycle in cover.cycles:
        for v in cycle:
            counts[v] = counts.get(v, 0) + 1
        if len(cycle) % 6:
            found.append(Violation("c6", f"cycle of length {len(cycle)}"))
        k = len(cycle)
        for i in range(k):
            u, v = cycle[i], cycle[(i + 1) % k]
            if edge(u, v) not in unit and edge(u, v) not in dummies:
                found.append(Violation("unit-edge", f"({u},{v}) is not a unit or dummy edge"))
    missing = [v for v in range(g.n_nodes) if counts.get(v, 0) != 1]
    if missing:
        found.append(Violation("cover", f"nodes not covered exactly once: {missing}"))
    return found


def decode_cover(g: DummyGraph, cover: CycleCover) -> Tuple[Coloring, StructurePair]:
    """Color each cycle from its smallest real node (red), flipping per triple."""
    problems = cover_violations(g, cover)
    if problems:
        raise BadCover("; ".join(f"{p.rule}: {p.detail}" for p in problems))
    red: Dict[int, bool] = {}
    for cycle in cover.cycles:
        reals = [v for v in cycle if v < g.n_real]
        first = min(reals)
        pos = cycle.index(first)
        k = len(cycle)
        # walk toward the dummy of the first node
        step = 1 if cycle[(pos + 1) % k] >= g.n_real else -1
        color = True
        for offset in range(k):
            v = cycle[(pos + step * offset) % k]
            if v >= g.n_real:
                color = not color
                continue
            if v in red and red[v] != color:
                raise BadCover(f"node {v} colored inconsistently")
            red[v] = color
            if red.get(v ^ 1) is not None and red[v ^ 1] == color:
                raise BadCover(f"pair {v // 2} colored the same on both nodes")
    coloring = Coloring.from_red_nodes(g.n_pairs, [v for v, is_red in red.items() if is_red])
    real = cover_real_edges(g, cover)
    blue = tuple(e for e in real if not red[e[0]])
    red_edges = tuple(e for e in real if red[e[0]])
    return coloring, StructurePair(coloring, blue, red_edges, StructureKind.PERFECT_MATCHING)


def encode_matching(g: DummyGraph, pair: StructurePair) -> CycleCover:
    """Forward map: a 2-matching plus the dummy paths gives a 2-factor."""
    mate: Dict[int, int] = {}
    for u, v in pair.all_edges():
        if u in mate or v in mate:
            raise BadCover(f"node matched twice near edge ({u},{v})")
        mate[u], mate[v] = v, u
    if len(mate) != g.n_real:
        raise BadCover("matching is not perfect")
    return cycles_from_mates(g, mate)


def matching_cost(g: DummyGraph, cover: CycleCover) -> Weight:
    return W.normalize(sum((g.real_weight(u, v) for u, v in cover_real_edges(g, cover)), W.ZERO))


def cover_cost(g: DummyGraph, cover: CycleCover) -> Weight:
    """Cycle-cover cost: real edges plus the 2n unit dummy edges."""
    return W.normalize(matching_cost(g, cover) + 2 * g.n_pairs)


def exact_bottleneck_2matching(instance: MetricInstance, cap: int = DEFAULT_CAPS["c6_real_nodes"]) -> Weight:
    """Smallest distinct weight t whose unit graph admits a C6 cover."""
    if instance.n_pairs % 2:
        raise OddSet(f"classes of {instance.n_pairs} nodes have no perfect matching")
    if instance.n_nodes > cap:
        raise TooLarge("exact_bottleneck_2matching", instance.n_nodes, cap)
    candidates = sorted(
        {instance.w(u, v) for u in instance.nodes() for v in range(u + 1, instance.n_nodes) if u // 2 != v // 2}
    )
    lo, hi = 0, len(candidates) - 1
    if find_c6_cover(to_dummy_graph(instance, candidates[hi]), cap) is None:
        raise BadCover("no cover even with every real edge allowed")
    while lo < hi:
        mid = (lo + hi) // 2
        if find_c6_cover(to_dummy_graph(instance, candidates[mid]), cap) is not None:
            hi = mid
        else:
            lo = mid + 1
    logger.info("bottleneck 2-matching on %d pairs: %s", instance.n_pairs, W.to_text(candidates[hi]))
    return candidates[hi]
