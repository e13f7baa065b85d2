from __future__ import annotations

import itertools
import re
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from .errors import GraphError
from .graph import Graph, build_graph, cartesian_product, load_graph_file, parse_graph_text

CATALOG_FILE = Path(__file__).with_name("data") / "catalog.graph"

_PARAMETRIC = re.compile(r"^(path|cycle|complete|hypercube)_(\d+)$")


@lru_cache(maxsize=1)
def _named_graphs() -> Dict[str, Graph]:
    """Parse every `graph ... end` block of the shipped catalog file."""
    graphs: Dict[str, Graph] = {}
    block: List[str] = []
    for line in CATALOG_FILE.read_text(encoding="utf-8").splitlines():
        block.append(line)
        if line.split("#", 1)[0].strip() == "end":
            g = parse_graph_text("\n".join(block))
            graphs[g.name] = g
            block = []
    return graphs


def named_keys() -> List[str]:
    return list(_named_graphs())


def path_graph(k: int, name: Optional[str] = None) -> Graph:
    labels = [f"v{i}" for i in range(1, k + 1)]
    return build_graph(name or f"path_{k}", labels, zip(labels, labels[1:]))


def cycle_graph(k: int, name: Optional[str] = None) -> Graph:
    if k < 3:
        raise GraphError(f"cycle_{k}: a simple cycle needs k >= 3")
    labels = [f"v{i}" for i in range(1, k + 1)]
    return build_graph(name or f"cycle_{k}", labels, zip(labels, labels[1:] + labels[:1]))


def complete_graph(k: int, name: Optional[str] = None) -> Graph:
    labels = [f"v{i}" for i in range(1, k + 1)]
    return build_graph(name or f"complete_{k}", labels, itertools.combinations(labels, 2))


def hypercube_graph(d: int, name: Optional[str] = None) -> Graph:
    """Q_d with vertices q<bits> in binary counting order; Q_0 is the single vertex q."""
    labels = ["q" + format(i, f"0{d}b") if d else "q" for i in range(2**d)]
    edges = [
        (labels[i], labels[i ^ (1 << bit)])
        for i in range(2**d)
        for bit in reversed(range(d))
        if i < i ^ (1 << bit)
    ]
    return build_graph(name or f"hypercube_{d}", labels, edges)


_FAMILIES: Dict[str, Tuple[Callable[..., Graph], int]] = {
    "path": (path_graph, 1),
    "cycle": (cycle_graph, 3),
    "complete": (complete_graph, 1),
    "hypercube": (hypercube_graph, 0),
}


def catalog(key: str) -> Graph:
    """
    Resolve a catalog key.

    Accepted forms: a named graph (lemke, lemke2, lemke3, lemke4, bruhat4),
    a parametric family (path_k, cycle_k, complete_k, hypercube_d),
    `<key>-square` for key □ key, and `<a>*<b>` for a □ b.
    """
    key = key.strip()
    if "*" in key:
        left, _, right = key.partition("*")
        return cartesian_product(catalog(left), catalog(right), name=key)
    if key.endswith("-square"):
        base = catalog(key[: -len("-square")])
        return cartesian_product(base, base, name=key)

    named = _named_graphs()
    if key in named:
        return named[key]

    match = _PARAMETRIC.match(key)
    if match:
        family, size = match.group(1), int(match.group(2))
        factory, minimum = _FAMILIES[family]
        if size < minimum:
            raise GraphError(f"{key}: size must be at least {minimum}")
        return factory(size)

    raise GraphError(
        f"unknown catalog key {key!r}; known: {', '.join(named)}, "
        "path_k, cycle_k, complete_k, hypercube_d, <key>-square, <a>*<b>"
    )


def product_factors(key: str) -> Optional[Tuple[str, str]]:
    """Factor keys of a product catalog key, or None for a non-product key."""
    key = key.strip()
    if "*" in key:
        left, _, right = key.partition("*")
        return left, right
    if key.endswith("-square"):
        base = key[: -len("-square")]
        return base, base
    return None


def resolve_graph(source: str) -> Graph:
    """A catalog key, or a path to a graph text file."""
    path = Path(source)
    if path.is_file():
        return load_graph_file(path)
    return catalog(source)
