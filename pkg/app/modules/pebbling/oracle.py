from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from math import comb
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from joblib import Parallel, delayed

from .errors import BudgetExceededError, ConfigurationError
from .graph import Graph, Vertex

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10_000_000

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class Configuration:
    """
    Pebble placement: vertex -> nonnegative count. Only nonzero entries are
    stored; omitted vertices hold no pebbles.
    """

    entries: Tuple[Tuple[Vertex, int], ...] = ()

    @classmethod
    def from_counts(cls, counts: Mapping[Vertex, int]) -> "Configuration":
        for v, c in counts.items():
            if int(c) != c or c < 0:
                raise ConfigurationError(f"pebble count for {v!r} must be a nonnegative integer, got {c!r}")
        return cls(tuple((v, int(c)) for v, c in counts.items() if c))

    @classmethod
    def from_vector(cls, graph: Graph, vector: Sequence[int]) -> "Configuration":
        return cls(tuple((v, c) for v, c in zip(graph.vertices, vector) if c))

    @property
    def counts(self) -> Dict[Vertex, int]:
        return dict(self.entries)

    @property
    def size(self) -> int:
        return sum(c for _, c in self.entries)

    def get(self, v: Vertex) -> int:
        return self.counts.get(v, 0)

    def validate_for(self, graph: Graph) -> None:
        for v, _ in self.entries:
            if not graph.has_vertex(v):
                raise ConfigurationError(f"configuration references unknown vertex {v!r}")

    def as_vector(self, graph: Graph) -> Vector:
        self.validate_for(graph)
        counts = self.counts
        return tuple(counts.get(v, 0) for v in graph.vertices)

    def to_text(self, graph: Optional[Graph] = None) -> str:
        entries = self.entries
        if graph is not None:
            entries = tuple(sorted(entries, key=lambda e: graph.index(e[0])))
        lines = ["config", *(f"p {v} {c}" for v, c in entries), "end"]
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        inner = ", ".join(f"{v}:{c}" for v, c in self.entries)
        return "{" + inner + "}"


def parse_configuration_text(text: str) -> Configuration:
    counts: Dict[Vertex, int] = {}
    started = ended = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if not started:
            if parts != ["config"]:
                raise ConfigurationError(f"line {lineno}: expected 'config' header")
            started = True
        elif ended:
            raise ConfigurationError(f"line {lineno}: content after 'end'")
        elif parts == ["end"]:
            ended = True
        elif parts[0] == "p" and len(parts) == 3 and parts[2].isdigit():
            counts[parts[1]] = counts.get(parts[1], 0) + int(parts[2])
        else:
            raise ConfigurationError(f"line {lineno}: cannot parse {raw.strip()!r}")
    if not ended:
        raise ConfigurationError("configuration text must be enclosed in 'config' ... 'end'")
    return Configuration.from_counts(counts)


@dataclass
class OracleReport:
    root: Vertex
    max_unsolvable_size: int
    witness: Configuration
    rooted_pebbling_number: int
    visited_states: int = 0

    def to_human_summary(self, graph_name: str = "G") -> str:
        return (
            f"pi({graph_name},{self.root})={self.rooted_pebbling_number} "
            f"witness={self.witness} (size {self.max_unsolvable_size})"
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "root": self.root,
            "max_unsolvable_size": self.max_unsolvable_size,
            "witness": self.witness.counts,
            "rooted_pebbling_number": self.rooted_pebbling_number,
            "visited_states": self.visited_states,
        }


class _RootedSearch:
    """
    Solvability search toward one root. Holds the memo table for a single
    top-level query; the state budget counts memo entries.
    """

    def __init__(self, graph: Graph, root: Vertex, budget: int) -> None:
        graph.require_vertex(root)
        graph.require_connected()
        self.graph = graph
        self.root = root
        self.budget = budget
        self.root_index = graph.index(root)

        dists = graph.distances_from(root)
        self.dist: Vector = tuple(dists[v] for v in graph.vertices)
        self.ecc = max(self.dist)
        # 2^(ecc - d(v)): a move never increases sum(c(v) * scale(v)); reaching
        # the root needs at least 2^ecc.
        self.scale: Vector = tuple(1 << (self.ecc - d) for d in self.dist)
        self.threshold = 1 << self.ecc
        self.direct: Vector = tuple(1 << d for d in self.dist)

        index = {v: i for i, v in enumerate(graph.vertices)}
        moves: List[Tuple[int, ...]] = []
        for i, v in enumerate(graph.vertices):
            targets = [index[w] for w in graph.neighbors(v)]
            # root-directed first, then lateral, then away; vertex order within a class
            targets.sort(key=lambda j: (self.dist[j] - self.dist[i], j))
            moves.append(tuple(targets))
        self.moves: Tuple[Tuple[int, ...], ...] = tuple(moves)

        self.memo: Dict[Vector, bool] = {}

    @property
    def visited(self) -> int:
        return len(self.memo)

    def solvable(self, state: Vector) -> bool:
        for c, need in zip(state, self.direct):
            if c >= need:
                return True
        if sum(c * s for c, s in zip(state, self.scale)) < self.threshold:
            return False
        cached = self.memo.get(state)
        if cached is not None:
            return cached
        if len(self.memo) >= self.budget:
            raise BudgetExceededError(
                f"visited-state budget {self.budget} exhausted at root {self.root}; bound search inconclusive"
            )

        result = False
        for i, c in enumerate(state):
            if c < 2:
                continue
            for j in self.moves[i]:
                nxt = list(state)
                nxt[i] -= 2
                nxt[j] += 1
                if self.solvable(tuple(nxt)):
                    result = True
                    break
            if result:
                break
        self.memo[state] = result
        return result


def _default_cap(graph: Graph, root: Vertex) -> int:
    return 2 ** graph.eccentricity(root) + graph.n


class PebblingOracle:
    """
    Brute-force ground truth for pebbling numbers on small graphs.

    max_unsolvable walks sizes 0, 1, 2, ... keeping every r-unsolvable
    configuration of the current size (root count zero). A configuration of
    the next size is tested only if all of its one-pebble-smaller
    predecessors are unsolvable; otherwise monotonicity already makes it
    solvable.
    """

    def __init__(self, budget: int = DEFAULT_BUDGET, n_jobs: int = 1) -> None:
        if budget < 1:
            raise ValueError("budget must be positive")
        self.budget = budget
        self.n_jobs = n_jobs

    # ------------------------------------------------------------------ #
    # Public API
    # ------------------------------------------------------------------ #

    def is_solvable(self, graph: Graph, root: Vertex, config: Configuration) -> bool:
        search = _RootedSearch(graph, root, self.budget)
        return search.solvable(config.as_vector(graph))

    def max_unsolvable(self, graph: Graph, root: Vertex, size_cap: Optional[int] = None) -> OracleReport:
        search = _RootedSearch(graph, root, self.budget)
        cap = _default_cap(graph, root) if size_cap is None else size_cap
        if cap < 1:
            raise ValueError("size_cap must be at least 1")

        free = graph.n - 1
        space = comb(cap + free, free)
        if space > self.budget:
            raise BudgetExceededError(
                f"{graph.name} root {root}: {space} configurations up to size {cap} exceed "
                f"budget {self.budget}; bound search inconclusive"
            )

        limit = sys.getrecursionlimit()
        if limit < cap + 100:
            sys.setrecursionlimit(cap + 100)

        zero: Vector = tuple([0] * graph.n)
        level: Set[Vector] = {zero}
        size = 0
        while True:
            if size == cap:
                raise BudgetExceededError(
                    f"{graph.name} root {root}: unsolvable configurations of size {cap} exist; "
                    "size cap too small, bound search inconclusive"
                )
            nxt = self._next_level(search, level)
            logger.debug(
                "[PebblingOracle] %s root %s: %d unsolvable configurations of size %d",
                graph.name, root, len(nxt), size + 1,
            )
            if not nxt:
                break
            level = nxt
            size += 1

        witness = Configuration.from_vector(graph, max(level))
        return OracleReport(
            root=root,
            max_unsolvable_size=size,
            witness=witness,
            rooted_pebbling_number=size + 1,
            visited_states=search.visited,
        )

    def rooted_pebbling_number(self, graph: Graph, root: Vertex) -> int:
        return self.max_unsolvable(graph, root).rooted_pebbling_number

    def reports(self, graph: Graph, roots: Optional[Iterable[Vertex]] = None) -> List[OracleReport]:
        """One report per root, in the order given (vertex order by default)."""
        graph.require_connected()
        roots = list(graph.vertices if roots is None else roots)
        for r in roots:
            graph.require_vertex(r)
        if self.n_jobs == 1 or len(roots) == 1:
            return [self.max_unsolvable(graph, r) for r in roots]
        return Parallel(n_jobs=self.n_jobs, prefer="processes")(
            delayed(_report_for_root)(graph, r, self.budget) for r in roots
        )

    def pebbling_number(self, graph: Graph) -> int:
        return max(rep.rooted_pebbling_number for rep in self.reports(graph))

    # ---------------------- Internals ---------------------- #

    def _next_level(self, search: _RootedSearch, level: Set[Vector]) -> Set[Vector]:
        r = search.root_index
        n = len(search.dist)
        nxt: Set[Vector] = set()
        checked: Set[Vector] = set()
        for parent in level:
            for v in range(n):
                if v == r:
                    continue
                child = list(parent)
                child[v] += 1
                cand = tuple(child)
                if cand in checked:
                    continue
                checked.add(cand)
                if not self._predecessors_unsolvable(cand, level, r):
                    continue
                if not search.solvable(cand):
                    nxt.add(cand)
        return nxt

    @staticmethod
    def _predecessors_unsolvable(cand: Vector, level: Set[Vector], root_index: int) -> bool:
        for u, c in enumerate(cand):
            if c and u != root_index:
                pred = list(cand)
                pred[u] -= 1
                if tuple(pred) not in level:
                    return False
        return True


def _report_for_root(graph: Graph, root: Vertex, budget: int) -> OracleReport:
    return PebblingOracle(budget=budget).max_unsolvable(graph, root)


# ---------------------------------------------------------------------- #
# Module-level helpers
# ---------------------------------------------------------------------- #


def is_solvable(graph: Graph, root: Vertex, config: Configuration) -> bool:
    return PebblingOracle().is_solvable(graph, root, config)


def max_unsolvable(graph: Graph, root: Vertex, size_cap: Optional[int] = None) -> OracleReport:
    return PebblingOracle().max_unsolvable(graph, root, size_cap)


def rooted_pebbling_number(graph: Graph, root: Vertex) -> int:
    return PebblingOracle().rooted_pebbling_number(graph, root)


def pebbling_number(graph: Graph) -> int:
    return PebblingOracle().pebbling_number(graph)


def unsolvable_configurations(graph: Graph, root: Vertex, max_size: int) -> List[Configuration]:
    """
    Every r-unsolvable configuration with size <= max_size, smallest first.
    Used by the weight-function property checks.
    """
    oracle = PebblingOracle()
    search = _RootedSearch(graph, root, oracle.budget)
    level: Set[Vector] = {tuple([0] * graph.n)}
    found: List[Configuration] = []
    for _ in range(max_size + 1):
        if not level:
            break
        found.extend(Configuration.from_vector(graph, v) for v in sorted(level, reverse=True))
        level = oracle._next_level(search, level)
    return found
