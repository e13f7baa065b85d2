from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from .dyadic import ZERO, DyadicRational
from .errors import CertificateError, GraphError
from .graph import Graph, ProductVertex, Vertex, mirror_label
from .oracle import Configuration

logger = logging.getLogger(__name__)

TreeEdge = Tuple[Vertex, Vertex, DyadicRational]  # (parent, child, weight of child)


@dataclass(frozen=True)
class TreeStrategy:
    """
    Rooted subtree of `graph` with a dyadic weight on every non-root tree
    vertex. Stored as the edge list it was read from; `parent` and `weight`
    are derived views. Vertices outside the tree weigh zero.
    """

    graph: Graph
    root: Vertex
    edges: Tuple[TreeEdge, ...]

    @classmethod
    def from_edges(cls, graph: Graph, root: Vertex, edges: Iterable[Tuple[Vertex, Vertex, Any]]) -> "TreeStrategy":
        normalized = []
        for parent, child, w in edges:
            if not isinstance(w, DyadicRational):
                w = DyadicRational.parse(str(w))
            normalized.append((parent, child, w))
        return cls(graph=graph, root=root, edges=tuple(normalized))

    @classmethod
    def from_weights(cls, graph: Graph, root: Vertex, weights: Mapping[Vertex, DyadicRational]) -> "TreeStrategy":
        """
        Rebuild parent arcs from a weight table alone.

        Neighbors of the root hang off the root. Any other vertex takes its
        first neighbor (vertex order) whose weight is at least twice its
        own; weights strictly grow toward the root, so the result is a tree.
        """
        graph.require_vertex(root)
        tree = {v: w for v, w in weights.items() if w}
        for v in tree:
            graph.require_vertex(v)
        if root in tree:
            raise CertificateError(f"root {root} must carry weight 0")

        parent: Dict[Vertex, Vertex] = {}
        orphans: List[str] = []
        for v in graph.vertices:
            if v not in tree:
                continue
            if graph.has_edge(v, root):
                parent[v] = root
                continue
            for u in graph.neighbors(v):
                if u in tree and tree[u] >= tree[v].double():
                    parent[v] = u
                    break
            else:
                orphans.append(f"{v} (weight {tree[v].to_decimal_string()})")
        if orphans:
            raise CertificateError(
                "no neighbor with at least twice the weight, cannot place in a tree: " + ", ".join(orphans)
            )

        children: Dict[Vertex, List[Vertex]] = {}
        for child, p in parent.items():
            children.setdefault(p, []).append(child)

        edges: List[TreeEdge] = []
        queue = [root]
        while queue:
            here = queue.pop(0)
            for child in sorted(children.get(here, []), key=graph.index):
                edges.append((here, child, tree[child]))
                queue.append(child)
        return cls(graph=graph, root=root, edges=tuple(edges))

    # ---------------------- Views ---------------------- #

    @cached_property
    def parent(self) -> Dict[Vertex, Vertex]:
        return {child: p for p, child, _ in self.edges}

    @cached_property
    def weight(self) -> Dict[Vertex, DyadicRational]:
        return {child: w for _, child, w in self.edges}

    def weight_of(self, v: Vertex) -> DyadicRational:
        return self.weight.get(v, ZERO)

    @property
    def tree_vertices(self) -> List[Vertex]:
        return [self.root, *self.parent]

    def children(self, v: Vertex) -> List[Vertex]:
        return [child for p, child, _ in self.edges if p == v]

    def total_weight(self) -> DyadicRational:
        return sum(self.weight.values(), ZERO)

    def depth(self) -> int:
        """Longest root-to-leaf edge count (valid strategies only)."""
        best = 0
        for v in self.parent:
            d, here = 0, v
            while here != self.root and d <= len(self.edges):
                here = self.parent.get(here, self.root)
                d += 1
            best = max(best, d)
        return best


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass
class ValidationVerdict:
    """Outcome of validate_strategy; violations are data, never raised."""

    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def kinds(self) -> List[str]:
        return [v.kind for v in self.violations]

    def to_human_summary(self) -> str:
        if self.ok:
            return "valid tree strategy"
        return "invalid tree strategy:\n" + "\n".join(f"  - {v}" for v in self.violations)


def validate_strategy(s: TreeStrategy) -> ValidationVerdict:
    """
    Checks in order: edges exist in the graph; the parent map is a tree
    rooted at the root (no vertex with two parents, acyclic, connected);
    the root has a child; w(parent) >= 2 w(child) below the root's
    children; tree weights are positive.
    """
    g = s.graph
    out: List[Violation] = []

    if not g.has_vertex(s.root):
        out.append(Violation("edge", f"root {s.root} is not a vertex of {g.name}"))
        return ValidationVerdict(out)

    for p, child, _ in s.edges:
        if not (g.has_vertex(p) and g.has_vertex(child) and g.has_edge(p, child)):
            out.append(Violation("edge", f"({p},{child}) is not an edge of {g.name}"))

    seen: Dict[Vertex, Vertex] = {}
    for p, child, _ in s.edges:
        if child == s.root:
            out.append(Violation("acyclic", f"root {s.root} has a parent ({p})"))
        elif child in seen:
            out.append(Violation("tree", f"{child} has two parents ({seen[child]} and {p})"))
        else:
            seen[child] = p

    parent = s.parent
    reported = set()
    for v in parent:
        path = [v]
        here = v
        while here != s.root:
            nxt = parent.get(here)
            if nxt is None:
                if here not in reported:
                    out.append(Violation("connected", f"{here} is a parent but not attached to the tree"))
                    reported.add(here)
                break
            if nxt in path:
                cycle = frozenset(path[path.index(nxt):])
                if cycle not in reported:
                    out.append(Violation("acyclic", "cycle through " + ", ".join(sorted(cycle, key=_index_of(g)))))
                    reported.add(cycle)
                break
            path.append(nxt)
            here = nxt

    if not any(p == s.root for p, _, _ in s.edges):
        out.append(Violation("root-child", f"root {s.root} has no child"))

    weight = s.weight
    for p, child, w in s.edges:
        if p == s.root or p not in weight:
            continue
        if weight[p] < w.double():
            out.append(
                Violation(
                    "doubling",
                    f"w({p})={weight[p]} < 2*w({child})={w.double()}",
                )
            )

    for _, child, w in s.edges:
        if w.is_zero():
            out.append(Violation("positive", f"w({child}) must be positive"))

    return ValidationVerdict(out)


def _index_of(g: Graph):
    return lambda v: g.index(v) if g.has_vertex(v) else -1


@dataclass(frozen=True)
class CertificateBundle:
    graph: Graph
    root: Vertex
    strategies: Tuple[TreeStrategy, ...] = ()
    # bound recorded in the certificate file; never trusted, only compared
    claimed_bound: Optional[int] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "strategies", tuple(self.strategies))
        for t, s in enumerate(self.strategies, start=1):
            if s.root != self.root:
                raise CertificateError(f"strategy {t} is rooted at {s.root}, bundle root is {self.root}")
            if s.graph != self.graph:
                raise CertificateError(f"strategy {t} lives on graph {s.graph.name}, bundle graph is {self.graph.name}")

    def __len__(self) -> int:
        return len(self.strategies)

    def verdicts(self) -> List[ValidationVerdict]:
        return [validate_strategy(s) for s in self.strategies]

    def require_valid(self) -> None:
        problems = [
            f"strategy {t}: {v}"
            for t, verdict in enumerate(self.verdicts(), start=1)
            for v in verdict.violations
        ]
        if problems:
            raise CertificateError("invalid certificate:\n  " + "\n  ".join(problems))


@dataclass
class CertificateReport:
    """Exact covering-bound summary of a bundle."""

    graph_name: str
    root: Vertex
    strategy_count: int
    K: DyadicRational
    total_weight: DyadicRational
    bound: int
    per_vertex_sums: Dict[Vertex, DyadicRational]

    @property
    def attaining(self) -> List[Vertex]:
        """Non-root vertices whose weight sum equals K."""
        return [v for v, w in self.per_vertex_sums.items() if w == self.K]

    def to_human_summary(self) -> str:
        return (
            f"{self.graph_name} root {self.root}: {self.strategy_count} strategies, "
            f"K={self.K.to_decimal_string()}, total weight={self.total_weight.to_decimal_string()}, "
            f"bound pi <= {self.bound}"
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "graph": self.graph_name,
            "root": self.root,
            "strategies": self.strategy_count,
            "K": str(self.K),
            "total_weight": str(self.total_weight),
            "bound": self.bound,
            "attaining": self.attaining,
        }


def covering_bound(bundle: CertificateBundle) -> CertificateReport:
    bundle.require_valid()
    g, r = bundle.graph, bundle.root
    non_root = [v for v in g.vertices if v != r]
    if not non_root:
        raise CertificateError(f"{g.name} has no vertex besides the root")

    sums: Dict[Vertex, DyadicRational] = {v: ZERO for v in non_root}
    for s in bundle.strategies:
        for v, w in s.weight.items():
            sums[v] = sums[v] + w

    uncovered = [v for v in non_root if sums[v].is_zero()]
    if uncovered:
        raise CertificateError("uncovered vertices (zero total weight): " + ", ".join(uncovered))

    K = min(sums.values())
    total = sum(sums.values(), ZERO)
    bound = int(total.to_fraction() // K.to_fraction()) + 1
    logger.debug("[covering_bound] %s root %s: K=%s total=%s bound=%d", g.name, r, K, total, bound)
    return CertificateReport(
        graph_name=g.name,
        root=r,
        strategy_count=len(bundle),
        K=K,
        total_weight=total,
        bound=bound,
        per_vertex_sums=sums,
    )


def wfl_holds(s: TreeStrategy, c: Configuration) -> bool:
    """w . C <= w . 1, exactly."""
    c.validate_for(s.graph)
    lhs = sum((s.weight_of(v) * k for v, k in c.entries), ZERO)
    return lhs <= s.total_weight()


# ---------------------------------------------------------------------- #
# Symmetry on self-products
# ---------------------------------------------------------------------- #


def symmetric_mirror(s: TreeStrategy) -> TreeStrategy:
    """Swap coordinates of every vertex; root (a,b) becomes (b,a)."""
    if not s.graph.is_self_product:
        raise CertificateError(f"{s.graph.name} is not a product of a graph with itself")
    try:
        edges = tuple((mirror_label(p), mirror_label(c), w) for p, c, w in s.edges)
        root = mirror_label(s.root)
    except GraphError as exc:
        raise CertificateError(str(exc)) from exc
    return TreeStrategy(graph=s.graph, root=root, edges=edges)


def expand_symmetric(bundle: CertificateBundle) -> CertificateBundle:
    """Append the mirror of every strategy (diagonal roots only)."""
    if not bundle.graph.is_self_product:
        raise CertificateError(f"{bundle.graph.name} is not a product of a graph with itself")
    pv = ProductVertex.parse(bundle.root)
    if pv.left != pv.right:
        raise CertificateError(f"symmetric expansion needs a diagonal root, got {bundle.root}")
    bundle.require_valid()
    mirrors = tuple(symmetric_mirror(s) for s in bundle.strategies)
    return CertificateBundle(graph=bundle.graph, root=bundle.root, strategies=bundle.strategies + mirrors)
