"""
Partitioned-pairs instances: data model, cost functions, validation and files.

Node 2i is p_i and node 2i+1 is q_i. A Coloring stores one bit per pair
(bit i true means p_i is red, so q_i is blue).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Iterator, List, Literal, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import networkx as nx
from pydantic import BaseModel, PositiveInt, StrictInt, ValidationError

from pairnet import weights as W
from pairnet.errors import (
    Asymmetric,
    InconsistentEntry,
    NegativeWeight,
    NonSquare,
    NonZeroDiagonal,
    OddNodeCount,
    ParseError,
)
from pairnet.weights import Weight

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
Matrix = Tuple[Tuple[Weight, ...], ...]


def edge(u: int, v: int) -> Edge:
    return (u, v) if u <= v else (v, u)


class StructureKind(str, Enum):
    SPANNING_TREE = "mst"
    TOUR = "tsp"
    PERFECT_MATCHING = "matching"


class Objective(str, Enum):
    MIN_SUM = "min-sum"
    MIN_MAX = "min-max"
    BOTTLENECK = "bottleneck"


def check_structure(matrix: Sequence[Sequence]) -> Matrix:
    """Return the matrix as exact weights, raising on structural problems."""
    size = len(matrix)
    if any(len(row) != size for row in matrix):
        raise NonSquare(f"matrix has {size} rows but a row of a different length")
    rows = [[W.as_weight(x) for x in row] for row in matrix]
    for u in range(size):
        if rows[u][u] != 0:
            raise NonZeroDiagonal(u)
        for v in range(u + 1, size):
            if rows[u][v] < 0:
                raise NegativeWeight(u, v)
            if rows[u][v] != rows[v][u]:
                raise Asymmetric(u, v)
    return tuple(tuple(row) for row in rows)


@dataclass(frozen=True)
class MetricInstance:
    n_pairs: int
    weights: Matrix
    points: Optional[Tuple[Tuple[Weight, ...], ...]] = field(default=None, compare=False)
    meta: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        matrix = check_structure(self.weights)
        if len(matrix) % 2:
            raise OddNodeCount(f"{len(matrix)} nodes cannot form pairs")
        if len(matrix) != 2 * self.n_pairs:
            raise NonSquare(f"n_pairs={self.n_pairs} but matrix has {len(matrix)} rows")
        object.__setattr__(self, "weights", matrix)

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence], points=None, meta=None) -> "MetricInstance":
        if len(matrix) % 2:
            raise OddNodeCount(f"{len(matrix)} nodes cannot form pairs")
        return cls(len(matrix) // 2, tuple(tuple(row) for row in matrix), points, meta)

    @property
    def n_nodes(self) -> int:
        return 2 * self.n_pairs

    def w(self, u: int, v: int) -> Weight:
        return self.weights[u][v]

    @staticmethod
    def partner(node: int) -> int:
        return node ^ 1

    @staticmethod
    def pair_of(node: int) -> int:
        return node // 2

    def nodes(self) -> range:
        return range(self.n_nodes)

    def distinct_weights(self) -> List[Weight]:
        found = {self.weights[u][v] for u in self.nodes() for v in range(u + 1, self.n_nodes)}
        return sorted(found)


class TriangleViolation(NamedTuple):
    u: int
    v: int
    w: int


def validate_metric(instance: Union[MetricInstance, Sequence[Sequence]]) -> List[TriangleViolation]:
    """Every ordered triple (u, v, w) with d(u,w) > d(u,v) + d(v,w)."""
    matrix = instance.weights if isinstance(instance, MetricInstance) else check_structure(instance)
    size = len(matrix)
    found = []
    for u in range(size):
        row_u = matrix[u]
        for v in range(size):
            if v == u:
                continue
            d_uv = row_u[v]
            row_v = matrix[v]
            for x in range(size):
                if x == u or x == v:
                    continue
                if row_u[x] > d_uv + row_v[x]:
                    found.append(TriangleViolation(u, v, x))
    return found


def metric_closure(
    partial: Sequence[Sequence[Optional[Weight]]],
    default: Weight,
    points=None,
    meta=None,
) -> MetricInstance:
    """Fill undefined entries with `default`, then take shortest-path distances.

    Defined entries must already be shortest paths through the defined entries.
    """
    size = len(partial)
    if any(len(row) != size for row in partial):
        raise NonSquare("partial matrix is not square")
    default = W.as_weight(default)
    if default < 0:
        raise NegativeWeight(-1, -1)

    defined = nx.Graph()
    defined.add_nodes_from(range(size))
    for u in range(size):
        for v in range(u + 1, size):
            a, b = partial[u][v], partial[v][u]
            if a is None and b is None:
                continue
            if a is not None and b is not None and W.as_weight(a) != W.as_weight(b):
                raise Asymmetric(u, v)
            value = W.as_weight(a if a is not None else b)
            if value < 0:
                raise NegativeWeight(u, v)
            defined.add_edge(u, v, weight=value)

    shortest = dict(nx.all_pairs_dijkstra_path_length(defined))
    for u, v, data in defined.edges(data=True):
        if data["weight"] > shortest[u][v]:
            raise InconsistentEntry(u, v, data["weight"], shortest[u][v])

    complete = nx.complete_graph(size)
    for u, v in complete.edges():
        complete[u][v]["weight"] = defined[u][v]["weight"] if defined.has_edge(u, v) else default
    dist = dict(nx.all_pairs_dijkstra_path_length(complete))
    matrix = [[W.normalize(dist[u][v]) if u != v else 0 for v in range(size)] for u in range(size)]
    logger.debug("metric closure over %d nodes, %d defined entries", size, defined.number_of_edges())
    return MetricInstance.from_matrix(matrix, points=points, meta=meta)


def closure_from_edges(
    n_nodes: int,
    defined: Mapping[Edge, Weight],
    default: Weight,
    points=None,
    meta=None,
) -> MetricInstance:
    partial: List[List[Optional[Weight]]] = [[None] * n_nodes for _ in range(n_nodes)]
    for u in range(n_nodes):
        partial[u][u] = 0
    for (u, v), value in defined.items():
        partial[u][v] = value
        partial[v][u] = value
    return metric_closure(partial, default, points=points, meta=meta)


@dataclass(frozen=True)
class Coloring:
    bits: Tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(bool(b) for b in self.bits))

    @property
    def n_pairs(self) -> int:
        return len(self.bits)

    @property
    def index(self) -> int:
        return sum(1 << i for i, bit in enumerate(self.bits) if bit)

    @classmethod
    def from_index(cls, index: int, n_pairs: int) -> "Coloring":
        return cls(tuple(bool((index >> i) & 1) for i in range(n_pairs)))

    @classmethod
    def from_string(cls, text: str) -> "Coloring":
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"coloring string must be non-empty 0/1 text, got {text!r}")
        return cls(tuple(ch == "1" for ch in text))

    def to_string(self) -> str:
        return "".join("1" if bit else "0" for bit in self.bits)

    def is_red(self, node: int) -> bool:
        bit = self.bits[node // 2]
        return bit if node % 2 == 0 else not bit

    def red_nodes(self) -> Tuple[int, ...]:
        return tuple(v for v in range(2 * self.n_pairs) if self.is_red(v))

    def blue_nodes(self) -> Tuple[int, ...]:
        return tuple(v for v in range(2 * self.n_pairs) if not self.is_red(v))

    def flipped(self) -> "Coloring":
        return Coloring(tuple(not bit for bit in self.bits))

    @classmethod
    def from_red_nodes(cls, n_pairs: int, red: Iterable[int]) -> "Coloring":
        red = set(red)
        bits = []
        for i in range(n_pairs):
            if (2 * i in red) == (2 * i + 1 in red):
                raise ValueError(f"pair {i} must have exactly one red node")
            bits.append(2 * i in red)
        return cls(tuple(bits))


def _normalize_edges(edges: Iterable[Sequence[int]]) -> Tuple[Edge, ...]:
    return tuple(edge(int(u), int(v)) for u, v in edges)


@dataclass(frozen=True)
class StructurePair:
    coloring: Coloring
    blue_edges: Tuple[Edge, ...]
    red_edges: Tuple[Edge, ...]
    kind: StructureKind

    def __post_init__(self):
        object.__setattr__(self, "blue_edges", _normalize_edges(self.blue_edges))
        object.__setattr__(self, "red_edges", _normalize_edges(self.red_edges))
        object.__setattr__(self, "kind", StructureKind(self.kind))

    def swapped(self) -> "StructurePair":
        return StructurePair(self.coloring.flipped(), self.red_edges, self.blue_edges, self.kind)

    def all_edges(self) -> Tuple[Edge, ...]:
        return self.blue_edges + self.red_edges


def edges_cost(instance: MetricInstance, edges: Iterable[Edge]) -> Weight:
    return W.normalize(sum((instance.w(u, v) for u, v in edges), W.ZERO))


def edges_bottleneck(instance: MetricInstance, edges: Iterable[Edge]) -> Weight:
    return max((instance.w(u, v) for u, v in edges), default=W.ZERO)


def combine(objective: Objective, blue: Weight, red: Weight) -> Weight:
    """Combine per-class values (sums, or bottlenecks for BOTTLENECK)."""
    if objective is Objective.MIN_SUM:
        return W.normalize(blue + red)
    return max(blue, red)


def cost(instance: MetricInstance, pair: StructurePair, objective: Objective) -> Weight:
    objective = Objective(objective)
    if objective is Objective.BOTTLENECK:
        return edges_bottleneck(instance, pair.all_edges())
    blue = edges_cost(instance, pair.blue_edges)
    red = edges_cost(instance, pair.red_edges)
    return combine(objective, blue, red)


class Violation(NamedTuple):
    rule: str
    detail: str


def _class_violations(kind: StructureKind, color: str, nodes: Sequence[int], edges: Sequence[Edge]) -> List[Violation]:
    found = []
    graph = nx.MultiGraph()
    graph.add_nodes_from(nodes)
    graph.add_edges_from(edges)
    k = len(nodes)

    if kind is StructureKind.SPANNING_TREE:
        components = nx.number_connected_components(graph) if k else 0
        if len(edges) - k + components > 0:
            found.append(Violation("acyclic", f"{color} edges contain a cycle"))
        if components > 1:
            found.append(Violation("connected", f"{color} tree has {components} components"))
        return found

    if kind is StructureKind.PERFECT_MATCHING:
        if k % 2:
            found.append(Violation("perfect", f"{color} class has odd size {k}"))
        bad = sorted(v for v in nodes if graph.degree(v) != 1)
        if bad:
            found.append(Violation("perfect", f"{color} nodes not matched exactly once: {bad}"))
        return found

    # tours: empty for one node, a doubled edge for two, a simple cycle otherwise
    if k <= 1:
        if edges:
            found.append(Violation("hamiltonian", f"{color} single-node tour must be empty"))
        return found
    if k == 2:
        if sorted(edges) != [edge(*nodes)] * 2:
            found.append(Violation("hamiltonian", f"{color} two-node tour must be a doubled edge"))
        return found
    bad = sorted(v for v in nodes if graph.degree(v) != 2)
    if bad:
        found.append(Violation("hamiltonian", f"{color} nodes without degree 2: {bad}"))
    if any(graph.number_of_edges(u, v) > 1 for u, v in set(edges)):
        found.append(Violation("hamiltonian", f"{color} tour repeats an edge"))
    if len(edges) != k or not nx.is_connected(graph):
        found.append(Violation("hamiltonian", f"{color} edges are not a single cycle"))
    return found


def validate_solution(instance: MetricInstance, pair: StructurePair) -> List[Violation]:
    """Empty list when the pair is a valid solution of its kind."""
    found: List[Violation] = []
    coloring = pair.coloring
    if coloring.n_pairs != instance.n_pairs:
        return [Violation("coloring", f"coloring has {coloring.n_pairs} bits for {instance.n_pairs} pairs")]

    classes = {"blue": (coloring.blue_nodes(), pair.blue_edges), "red": (coloring.red_nodes(), pair.red_edges)}
    for color, (nodes, edges) in classes.items():
        members = set(nodes)
        clean = []
        for u, v in edges:
            if not (0 <= u < instance.n_nodes and 0 <= v < instance.n_nodes):
                found.append(Violation("node-range", f"{color} edge ({u},{v}) out of range"))
            elif u == v:
                found.append(Violation("self-loop", f"{color} edge ({u},{v})"))
            elif u not in members or v not in members:
                found.append(Violation("color-purity", f"{color} edge ({u},{v}) touches the other class"))
            else:
                clean.append((u, v))
        found.extend(_class_violations(pair.kind, color, nodes, clean))
    return found


# ---------------------------------------------------------------------------
# files

class InstanceFile(BaseModel):
    n_pairs: PositiveInt
    weights: List[List[Union[StrictInt, str]]]
    pairs: Literal["canonical"] = "canonical"
    points: Optional[List[List[Union[StrictInt, str]]]] = None
    meta: Optional[dict] = None


class ColoringFile(BaseModel):
    bits: str


class SolutionFile(BaseModel):
    coloring: str
    blue: List[Tuple[int, int]]
    red: List[Tuple[int, int]]
    kind: StructureKind


def _load_json(path) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError(path, e.msg, line=e.lineno) from e


def _validated(model, data, path):
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        loc = ".".join(str(part) for part in first["loc"])
        raise ParseError(path, first["msg"], field=loc) from e


def read_instance(path) -> MetricInstance:
    doc = _validated(InstanceFile, _load_json(path), path)
    size = len(doc.weights)
    if size != 2 * doc.n_pairs:
        raise ParseError(path, f"expected {2 * doc.n_pairs} rows, found {size}", field="weights")
    matrix = []
    for i, row in enumerate(doc.weights):
        if len(row) != size:
            raise ParseError(path, f"row has {len(row)} entries, expected {size}", field=f"weights[{i}]")
        parsed = []
        for j, raw in enumerate(row):
            try:
                parsed.append(W.as_weight(raw))
            except (TypeError, ValueError, ZeroDivisionError) as e:
                raise ParseError(path, f"bad weight {raw!r}: {e}", field=f"weights[{i}][{j}]") from e
        matrix.append(parsed)
    points = None
    if doc.points is not None:
        try:
            points = tuple(tuple(W.as_weight(x) for x in point) for point in doc.points)
        except (TypeError, ValueError, ZeroDivisionError) as e:
            raise ParseError(path, str(e), field="points") from e
    try:
        return MetricInstance(doc.n_pairs, tuple(tuple(r) for r in matrix), points, doc.meta)
    except (Asymmetric, NegativeWeight, NonZeroDiagonal) as e:
        raise ParseError(path, str(e), field=f"weights[{e.u}][{e.v}]") from e
    except (NonSquare, OddNodeCount) as e:
        raise ParseError(path, str(e), field="weights") from e


def instance_to_dict(instance: MetricInstance) -> dict:
    doc: dict = {
        "n_pairs": instance.n_pairs,
        "weights": [[W.to_json(x) for x in row] for row in instance.weights],
        "pairs": "canonical",
    }
    if instance.points is not None:
        doc["points"] = [[W.to_json(x) for x in point] for point in instance.points]
    if instance.meta is not None:
        doc["meta"] = instance.meta
    return doc


def write_instance(instance: MetricInstance, path) -> None:
    """Write JSON with one matrix row per line."""
    doc = instance_to_dict(instance)
    rows = ",\n".join(f"    {json.dumps(row)}" for row in doc.pop("weights"))
    fields = [f'  "n_pairs": {doc.pop("n_pairs")}', f'  "weights": [\n{rows}\n  ]']
    fields += [f"  {json.dumps(key)}: {json.dumps(value)}" for key, value in doc.items()]
    Path(path).write_text("{\n" + ",\n".join(fields) + "\n}\n", encoding="utf-8")


def read_coloring(path) -> Coloring:
    doc = _validated(ColoringFile, _load_json(path), path)
    try:
        return Coloring.from_string(doc.bits)
    except ValueError as e:
        raise ParseError(path, str(e), field="bits") from e


def write_coloring(coloring: Coloring, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump({"bits": coloring.to_string()}, f, indent=2)


def solution_to_dict(pair: StructurePair) -> dict:
    return {
        "coloring": pair.coloring.to_string(),
        "blue": [list(e) for e in pair.blue_edges],
        "red": [list(e) for e in pair.red_edges],
        "kind": pair.kind.value,
    }


def read_solution(path) -> StructurePair:
    doc = _validated(SolutionFile, _load_json(path), path)
    try:
        coloring = Coloring.from_string(doc.coloring)
    except ValueError as e:
        raise ParseError(path, str(e), field="coloring") from e
    return StructurePair(coloring, tuple(doc.blue), tuple(doc.red), doc.kind)


def write_solution(pair: StructurePair, path, extra: Optional[dict] = None) -> None:
    doc = solution_to_dict(pair)
    if extra:
        doc.update(extra)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2)


def instance_summary(instance: MetricInstance) -> dict:
    distinct = instance.distinct_weights()
    return {
        "n_pairs": instance.n_pairs,
        "n_nodes": instance.n_nodes,
        "distinct_weights": len(distinct),
        "max_weight": W.to_text(distinct[-1]) if distinct else "0",
        "integral": all(isinstance(x, int) for x in distinct),
    }
