from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .catalog import resolve_graph
from .dyadic import DEFAULT_MAX_EXPONENT, DyadicRational, rationalize
from .errors import CertificateError, PebblingError
from .graph import Graph, Vertex
from .strategy import CertificateBundle, TreeStrategy, covering_bound, expand_symmetric, validate_strategy

logger = logging.getLogger(__name__)

EXACT_HEADER = "certificate v1"
DECIMAL_HEADER = "certificate decimal"


@dataclass
class _RawTree:
    index: int
    edges: List[Tuple[Vertex, Vertex, str]] = field(default_factory=list)
    weights: List[Tuple[Vertex, str]] = field(default_factory=list)


@dataclass
class _RawCertificate:
    header: str
    graph_source: str
    root: Vertex
    declared_trees: int
    trees: List[_RawTree]
    expand_symmetric: bool = False
    claimed_bound: Optional[int] = None


@dataclass
class ConversionResult:
    bundle: CertificateBundle
    graph_source: str
    # printed value -> exact value, for every entry the rounding changed
    adjustments: List[str] = field(default_factory=list)


# ---------------------------------------------------------------------- #
# Reading
# ---------------------------------------------------------------------- #


def _tokenize(text: str) -> List[Tuple[int, List[str]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line.split()))
    return out


def _read_raw(text: str) -> _RawCertificate:
    lines = _tokenize(text)
    if not lines:
        raise CertificateError("empty certificate")

    def expect(pos: int, keyword: str, arity: int) -> List[str]:
        if pos >= len(lines):
            raise CertificateError(f"unexpected end of certificate, expected '{keyword}'")
        lineno, parts = lines[pos]
        if parts[0] != keyword or len(parts) != arity:
            raise CertificateError(f"line {lineno}: expected '{keyword}' with {arity - 1} argument(s), got {' '.join(parts)!r}")
        return parts

    header = " ".join(lines[0][1])
    if header not in (EXACT_HEADER, DECIMAL_HEADER):
        raise CertificateError(f"line {lines[0][0]}: unknown certificate header {header!r}")
    source = expect(1, "graph", 2)[1]
    root = expect(2, "root", 2)[1]
    count_token = expect(3, "trees", 2)[1]
    if not count_token.isdigit():
        raise CertificateError(f"line {lines[3][0]}: tree count must be an integer")

    raw = _RawCertificate(header=header, graph_source=source, root=root, declared_trees=int(count_token), trees=[])
    pos = 4
    if pos < len(lines) and lines[pos][1][0] == "bound":
        lineno, parts = lines[pos]
        if len(parts) != 2 or not parts[1].isdigit():
            raise CertificateError(f"line {lineno}: expected 'bound <integer>', got {' '.join(parts)!r}")
        raw.claimed_bound = int(parts[1])
        pos += 1
    current: Optional[_RawTree] = None
    finished = False
    while pos < len(lines):
        lineno, parts = lines[pos]
        pos += 1
        head = parts[0]
        if finished:
            raise CertificateError(f"line {lineno}: content after 'end'")
        if current is None:
            if head == "tree" and len(parts) == 2 and parts[1].isdigit():
                current = _RawTree(index=int(parts[1]))
                if current.index != len(raw.trees) + 1:
                    raise CertificateError(f"line {lineno}: expected tree {len(raw.trees) + 1}, got tree {current.index}")
            elif parts == ["expand", "symmetric"] and header == DECIMAL_HEADER:
                raw.expand_symmetric = True
            elif parts == ["end"]:
                finished = True
            else:
                raise CertificateError(f"line {lineno}: unexpected {' '.join(parts)!r}")
        elif head == "edge" and len(parts) == 4:
            current.edges.append((parts[1], parts[2], parts[3]))
        elif head == "weight" and len(parts) == 3 and header == DECIMAL_HEADER:
            current.weights.append((parts[1], parts[2]))
        elif parts == ["endtree"]:
            if current.edges and current.weights:
                raise CertificateError(f"line {lineno}: tree {current.index} mixes 'edge' and 'weight' lines")
            raw.trees.append(current)
            current = None
        else:
            raise CertificateError(f"line {lineno}: cannot parse {' '.join(parts)!r}")

    if current is not None or not finished:
        raise CertificateError("certificate is truncated (missing 'endtree' or 'end')")
    if raw.declared_trees != len(raw.trees):
        raise CertificateError(f"header declares {raw.declared_trees} trees, file contains {len(raw.trees)}")
    return raw


def _resolve(source: str, base_dir: Optional[Path]) -> Graph:
    if base_dir is not None and (base_dir / source).is_file():
        return resolve_graph(str(base_dir / source))
    return resolve_graph(source)


def parse_certificate(text: str, base_dir: Optional[Path] = None) -> CertificateBundle:
    """Read an exact certificate. Weights must be exact dyadic rationals."""
    raw = _read_raw(text)
    if raw.header != EXACT_HEADER:
        raise CertificateError("decimal certificate: run 'convert' to produce an exact certificate first")
    graph = _resolve(raw.graph_source, base_dir)
    graph.require_vertex(raw.root)
    strategies = [
        TreeStrategy(
            graph=graph,
            root=raw.root,
            edges=tuple((p, c, DyadicRational.parse(w)) for p, c, w in tree.edges),
        )
        for tree in raw.trees
    ]
    return CertificateBundle(
        graph=graph, root=raw.root, strategies=tuple(strategies), claimed_bound=raw.claimed_bound
    )


def load_certificate(path: Union[str, Path]) -> CertificateBundle:
    path = Path(path)
    if not path.is_file():
        raise CertificateError(f"certificate file not found: {path}")
    return parse_certificate(path.read_text(encoding="utf-8"), base_dir=path.parent)


# ---------------------------------------------------------------------- #
# Writing
# ---------------------------------------------------------------------- #


def format_certificate(bundle: CertificateBundle, graph_source: Optional[str] = None) -> str:
    """Exact text with the recomputed covering bound recorded under `trees`. Refuses invalid bundles."""
    lines = [
        EXACT_HEADER,
        f"graph {graph_source or bundle.graph.name}",
        f"root {bundle.root}",
        f"trees {len(bundle.strategies)}",
        f"bound {covering_bound(bundle).bound}",
    ]
    for t, s in enumerate(bundle.strategies, start=1):
        lines.append(f"tree {t}")
        lines.extend(f"edge {p} {c} {w.numerator}/{w.denominator}" for p, c, w in s.edges)
        lines.append("endtree")
    lines.append("end")
    return "\n".join(lines) + "\n"


def write_certificate(bundle: CertificateBundle, path: Union[str, Path], graph_source: Optional[str] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_certificate(bundle, graph_source), encoding="utf-8")
    return path


# ---------------------------------------------------------------------- #
# Conversion
# ---------------------------------------------------------------------- #


def convert_certificate(
    text: str,
    max_exponent: int = DEFAULT_MAX_EXPONENT,
    base_dir: Optional[Path] = None,
) -> ConversionResult:
    """
    Rationalize every weight of a decimal (or exact) certificate, rebuild
    parent arcs for weight-table trees, re-validate exactly and apply a
    pending symmetric expansion. Refuses when any strategy fails
    validation after rounding.
    """
    raw = _read_raw(text)
    graph = _resolve(raw.graph_source, base_dir)
    graph.require_vertex(raw.root)
    adjustments: List[str] = []

    def exact(printed: str, where: str) -> DyadicRational:
        if raw.header == EXACT_HEADER:
            return DyadicRational.parse(printed)
        value = rationalize(printed, max_exponent)
        printed_value = Fraction(printed)
        if value.to_fraction() != printed_value:
            # already dyadic, only finer than max_exponent
            if not printed_value.denominator & (printed_value.denominator - 1):
                return DyadicRational.from_fraction(printed_value)
            adjustments.append(f"{where}: {printed} -> {value}")
        return value

    strategies: List[TreeStrategy] = []
    failures: List[str] = []
    for tree in raw.trees:
        try:
            if tree.weights:
                weights: Dict[Vertex, DyadicRational] = {}
                for v, printed in tree.weights:
                    if v in weights:
                        raise CertificateError(f"vertex {v} listed twice")
                    weights[v] = exact(printed, f"tree {tree.index} {v}")
                s = TreeStrategy.from_weights(graph, raw.root, weights)
            else:
                edges = [(p, c, exact(w, f"tree {tree.index} {c}")) for p, c, w in tree.edges]
                s = TreeStrategy(graph=graph, root=raw.root, edges=tuple(edges))
        except PebblingError as exc:
            failures.append(f"tree {tree.index}: {exc}")
            continue
        verdict = validate_strategy(s)
        if not verdict.ok:
            failures.extend(f"tree {tree.index}: {v}" for v in verdict.violations)
            continue
        strategies.append(s)

    if failures:
        raise CertificateError(
            f"conversion at max_exponent {max_exponent} failed:\n  " + "\n  ".join(failures)
        )

    bundle = CertificateBundle(graph=graph, root=raw.root, strategies=tuple(strategies))
    if raw.expand_symmetric:
        bundle = expand_symmetric(bundle)
    if raw.claimed_bound is not None:
        bound = covering_bound(bundle).bound
        if bound != raw.claimed_bound:
            raise CertificateError(
                f"certificate claims bound pi <= {raw.claimed_bound}, "
                f"weights at max_exponent {max_exponent} give {bound}"
            )
        bundle = replace(bundle, claimed_bound=bound)
    for note in adjustments:
        logger.debug("[convert_certificate] %s", note)
    return ConversionResult(bundle=bundle, graph_source=raw.graph_source, adjustments=adjustments)
