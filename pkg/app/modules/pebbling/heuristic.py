from __future__ import annotations

import logging
import random
from typing import Dict, List

from .dyadic import DyadicRational
from .errors import CertificateError
from .graph import Graph, Vertex
from .milp_model import ModelParams, Variant
from .strategy import CertificateBundle, TreeStrategy, expand_symmetric, validate_strategy

logger = logging.getLogger(__name__)


def _random_bfs_tree(graph: Graph, root: Vertex, rng: random.Random, depth: int) -> Dict[Vertex, Vertex]:
    """Shortest-path tree with a uniformly drawn parent per vertex, cut at `depth`."""
    dist = graph.distances_from(root)
    parent: Dict[Vertex, Vertex] = {}
    for v in graph.vertices:
        d = dist[v]
        if v == root or d > depth:
            continue
        closer = [u for u in graph.neighbors(v) if dist[u] == d - 1]
        parent[v] = rng.choice(closer)
    return parent


def _strategy(graph: Graph, root: Vertex, parent: Dict[Vertex, Vertex], top: int) -> TreeStrategy:
    """Weights 2^(top-1) on the root's children, halving per level."""
    dist = graph.distances_from(root)
    edges = [
        (p, v, DyadicRational(2 ** (top - dist[v])))
        for v, p in sorted(parent.items(), key=lambda kv: (dist[kv[0]], graph.index(kv[0])))
    ]
    return TreeStrategy(graph=graph, root=root, edges=tuple(edges))


def heuristic_generate(graph: Graph, root: Vertex, params: ModelParams, seed: int = 0) -> CertificateBundle:
    """
    Solver-free bundle: `blocks` random BFS trees truncated at depth ell
    (STS models get their mirrors appended). When ell is shorter than the
    root's eccentricity, one untruncated tree is appended to cover the
    remaining vertices. No optimality claim; always valid.
    """
    graph.require_vertex(root)
    graph.require_connected()
    rng = random.Random(seed)
    ecc = graph.eccentricity(root)

    strategies: List[TreeStrategy] = []
    for _ in range(params.blocks):
        parent = _random_bfs_tree(graph, root, rng, params.ell)
        if parent:
            strategies.append(_strategy(graph, root, parent, params.ell))

    bundle = CertificateBundle(graph=graph, root=root, strategies=tuple(strategies))
    if params.variant is Variant.STS:
        bundle = expand_symmetric(bundle)

    covered = {v for s in bundle.strategies for v in s.weight}
    uncovered = [v for v in graph.vertices if v != root and v not in covered]
    if uncovered:
        logger.debug("[heuristic_generate] repairing coverage of %d vertices", len(uncovered))
        repair = _strategy(graph, root, _random_bfs_tree(graph, root, rng, ecc), ecc)
        bundle = CertificateBundle(graph=graph, root=root, strategies=bundle.strategies + (repair,))

    for t, s in enumerate(bundle.strategies, start=1):
        verdict = validate_strategy(s)
        if not verdict.ok:
            raise CertificateError(f"heuristic strategy {t} is invalid: {verdict.to_human_summary()}")
    covered = {v for s in bundle.strategies for v in s.weight}
    if any(v != root and v not in covered for v in graph.vertices):
        raise CertificateError(f"coverage of {graph.name} from root {root} could not be repaired")
    return bundle
