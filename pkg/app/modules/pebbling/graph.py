from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from .errors import GraphError

logger = logging.getLogger(__name__)

Vertex = str
Edge = Tuple[Vertex, Vertex]
Arc = Tuple[Vertex, Vertex]


@dataclass(frozen=True)
class ProductVertex:
    """
    Vertex of a Cartesian product, rendered canonically as "(left,right)".

    Factors may themselves be products, so parsing splits on the comma at
    nesting depth one.
    """

    left: Vertex
    right: Vertex

    def __str__(self) -> str:
        return f"({self.left},{self.right})"

    @property
    def label(self) -> Vertex:
        return str(self)

    @classmethod
    def parse(cls, label: Vertex) -> "ProductVertex":
        if len(label) < 5 or label[0] != "(" or label[-1] != ")":
            raise GraphError(f"not a product vertex: {label!r}")
        depth = 0
        for pos, ch in enumerate(label):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 1:
                left, right = label[1:pos], label[pos + 1 : -1]
                if left and right:
                    return cls(left, right)
                break
        raise GraphError(f"not a product vertex: {label!r}")

    @staticmethod
    def is_product_label(label: Vertex) -> bool:
        try:
            ProductVertex.parse(label)
        except GraphError:
            return False
        return True


@dataclass(frozen=True)
class Graph:
    """
    Immutable labeled undirected simple graph.

    Vertex order is construction order and drives every iteration in the
    toolkit. Edges are stored with endpoints ordered by vertex index, in
    first-seen order. Disconnected graphs can be built; metric queries
    reject them.
    """

    name: str
    vertices: Tuple[Vertex, ...]
    edges: Tuple[Edge, ...]

    # ------------------------------------------------------------------ #
    # Basic queries
    # ------------------------------------------------------------------ #

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        """Number of undirected edges."""
        return len(self.edges)

    @cached_property
    def _index(self) -> Dict[Vertex, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def _adjacency(self) -> Dict[Vertex, Tuple[Vertex, ...]]:
        adj: Dict[Vertex, List[Vertex]] = {v: [] for v in self.vertices}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return {v: tuple(sorted(ns, key=self._index.__getitem__)) for v, ns in adj.items()}

    @cached_property
    def _edge_set(self) -> frozenset:
        return frozenset(frozenset(e) for e in self.edges)

    @cached_property
    def nx_graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    @cached_property
    def is_connected(self) -> bool:
        return self.n > 0 and nx.is_connected(self.nx_graph)

    @cached_property
    def _bfs_cache(self) -> Dict[Vertex, Dict[Vertex, int]]:
        return {}

    def has_vertex(self, v: Vertex) -> bool:
        return v in self._index

    def index(self, v: Vertex) -> int:
        self.require_vertex(v)
        return self._index[v]

    def require_vertex(self, v: Vertex) -> None:
        if v not in self._index:
            raise GraphError(f"unknown vertex {v!r} in graph {self.name!r}")

    def require_connected(self) -> None:
        if not self.is_connected:
            raise GraphError(f"graph {self.name!r} is disconnected")

    def neighbors(self, v: Vertex) -> Tuple[Vertex, ...]:
        self.require_vertex(v)
        return self._adjacency[v]

    def degree(self, v: Vertex) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return frozenset((u, v)) in self._edge_set

    # ------------------------------------------------------------------ #
    # Metric queries
    # ------------------------------------------------------------------ #

    def distances_from(self, u: Vertex) -> Dict[Vertex, int]:
        """BFS distances from u to every vertex. Requires a connected graph."""
        self.require_vertex(u)
        self.require_connected()
        cached = self._bfs_cache.get(u)
        if cached is None:
            cached = dict(nx.single_source_shortest_path_length(self.nx_graph, u))
            self._bfs_cache[u] = cached
        return cached

    def dist(self, u: Vertex, v: Vertex) -> int:
        self.require_vertex(v)
        return self.distances_from(u)[v]

    def eccentricity(self, u: Vertex) -> int:
        return max(self.distances_from(u).values())

    def diameter(self) -> int:
        self.require_connected()
        return max(self.eccentricity(u) for u in self.vertices)

    # ------------------------------------------------------------------ #
    # Product structure
    # ------------------------------------------------------------------ #

    @cached_property
    def is_self_product(self) -> bool:
        """
        True when every label is a product vertex and coordinate swapping
        maps vertices to vertices and edges to edges (a G□G shape).
        """
        if not self.vertices or not all(ProductVertex.is_product_label(v) for v in self.vertices):
            return False
        for v in self.vertices:
            if mirror_label(v) not in self._index:
                return False
        return all(self.has_edge(mirror_label(a), mirror_label(b)) for a, b in self.edges)

    # ------------------------------------------------------------------ #
    # Text format
    # ------------------------------------------------------------------ #

    def to_text(self) -> str:
        lines = [f"graph {self.name}"]
        lines.extend(f"v {v}" for v in self.vertices)
        lines.extend(f"e {a} {b}" for a, b in self.edges)
        lines.append("end")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ArcGraph:
    """Bidirected view of a graph: both orientations of every edge."""

    base: Graph
    arcs: Tuple[Arc, ...] = field(default=())

    @property
    def arc_count(self) -> int:
        return len(self.arcs)

    def in_arcs(self, v: Vertex) -> List[Arc]:
        return [a for a in self.arcs if a[1] == v]

    def out_arcs(self, v: Vertex) -> List[Arc]:
        return [a for a in self.arcs if a[0] == v]

    def undirected_edges(self) -> frozenset:
        return frozenset(frozenset(a) for a in self.arcs)


# ---------------------------------------------------------------------- #
# Construction
# ---------------------------------------------------------------------- #


def build_graph(name: str, vertex_labels: Sequence[Vertex], edge_list: Iterable[Edge]) -> Graph:
    index: Dict[Vertex, int] = {}
    for label in vertex_labels:
        if not label or any(ch.isspace() for ch in label) or "#" in label:
            raise GraphError(f"invalid vertex label {label!r}")
        if label in index:
            raise GraphError(f"duplicate vertex label {label!r}")
        index[label] = len(index)

    seen = set()
    edges: List[Edge] = []
    for a, b in edge_list:
        for end in (a, b):
            if end not in index:
                raise GraphError(f"edge ({a},{b}) has unknown endpoint {end!r}")
        if a == b:
            raise GraphError(f"self-loop at {a!r}")
        edge = (a, b) if index[a] < index[b] else (b, a)
        if edge in seen:
            continue
        seen.add(edge)
        edges.append(edge)

    graph = Graph(name=name, vertices=tuple(index), edges=tuple(edges))
    if not graph.is_connected:
        logger.warning("[Graph] %s is disconnected; metric and pebbling queries will refuse it", name)
    return graph


def dist(g: Graph, u: Vertex, v: Vertex) -> int:
    return g.dist(u, v)


def eccentricity(g: Graph, u: Vertex) -> int:
    return g.eccentricity(u)


def diameter(g: Graph) -> int:
    return g.diameter()


def cartesian_product(g: Graph, h: Graph, name: Optional[str] = None) -> Graph:
    """
    G□H with vertices in row-major order of (g-index, h-index). Each edge is
    listed once, from its lower-indexed endpoint, in vertex order.
    """
    labels = [ProductVertex(a, b).label for a in g.vertices for b in h.vertices]
    width = h.n

    def idx(i: int, j: int) -> int:
        return i * width + j

    edges: List[Edge] = []
    for i, a in enumerate(g.vertices):
        for j, b in enumerate(h.vertices):
            here = idx(i, j)
            forward = [idx(g.index(a2), j) for a2 in g.neighbors(a)]
            forward += [idx(i, h.index(b2)) for b2 in h.neighbors(b)]
            for there in sorted(q for q in forward if q > here):
                edges.append((labels[here], labels[there]))

    return Graph(name=name or f"{g.name}*{h.name}", vertices=tuple(labels), edges=tuple(edges))


def bidirect(g: Graph) -> ArcGraph:
    arcs: List[Arc] = []
    for a, b in g.edges:
        arcs.append((a, b))
        arcs.append((b, a))
    return ArcGraph(base=g, arcs=tuple(arcs))


def mirror_vertex(pv: ProductVertex) -> ProductVertex:
    if not isinstance(pv, ProductVertex):
        raise GraphError(f"not a product vertex: {pv!r}")
    return ProductVertex(pv.right, pv.left)


def mirror_label(label: Vertex) -> Vertex:
    return mirror_vertex(ProductVertex.parse(label)).label


# ---------------------------------------------------------------------- #
# Text format
# ---------------------------------------------------------------------- #


def parse_graph_text(text: str) -> Graph:
    name: Optional[str] = None
    vertices: List[Vertex] = []
    edges: List[Edge] = []
    ended = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ended:
            raise GraphError(f"line {lineno}: content after 'end'")
        parts = line.split()
        head = parts[0]
        if head == "graph" and len(parts) == 2 and name is None:
            name = parts[1]
        elif name is None:
            raise GraphError(f"line {lineno}: expected 'graph <name>' header")
        elif head == "v" and len(parts) == 2:
            vertices.append(parts[1])
        elif head == "e" and len(parts) == 3:
            edges.append((parts[1], parts[2]))
        elif head == "end" and len(parts) == 1:
            ended = True
        else:
            raise GraphError(f"line {lineno}: cannot parse {raw.strip()!r}")

    if name is None or not ended:
        raise GraphError("graph text must start with 'graph <name>' and finish with 'end'")
    return build_graph(name, vertices, edges)


def load_graph_file(path: Union[str, Path]) -> Graph:
    path = Path(path)
    if not path.exists():
        raise GraphError(f"graph file not found: {path}")
    return parse_graph_text(path.read_text(encoding="utf-8"))
