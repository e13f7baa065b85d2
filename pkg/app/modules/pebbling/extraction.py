from __future__ import annotations

import logging
from typing import Dict, List

from .dyadic import DEFAULT_MAX_EXPONENT, DyadicRational, rationalize
from .errors import CertificateError, ExtractionError
from .milp_model import MilpModel, Variant
from .solution_parser import SolutionAssignment
from .strategy import CertificateBundle, TreeStrategy, covering_bound, expand_symmetric, validate_strategy

logger = logging.getLogger(__name__)


def extract_strategies(
    model: MilpModel,
    sol: SolutionAssignment,
    max_exponent: int = DEFAULT_MAX_EXPONENT,
) -> CertificateBundle:
    """
    Read tree strategies out of a solver assignment and re-check them.

    Per block: tree vertices are those with y = 1 and a positive weight
    after rationalization (y = 1 at weight zero contributes nothing and
    is dropped); each keeps the parent given by its x = 1 in-arc. Every
    strategy must then pass validate_strategy and the bundle must cover
    every non-root vertex. Symmetric models are mirrored before return.
    """
    g, r = model.graph, model.root
    cap = DyadicRational(2 ** (model.params.ell - 1))
    strategies: List[TreeStrategy] = []

    if sol.status == "infeasible":
        raise ExtractionError("solver reported the model infeasible; nothing to extract")

    for t in range(1, model.params.blocks + 1):
        in_arcs: Dict[str, List[str]] = {v: [] for v in g.vertices}
        for (tt, i, j), name in model.x_names.items():
            if tt == t and sol.is_one(name):
                in_arcs[j].append(i)

        for v in g.vertices:
            member = 1 if sol.is_one(model.y_names[(t, v)]) else 0
            if len(in_arcs[v]) != member:
                raise ExtractionError(
                    f"strategy {t}: inflow: {v} has {len(in_arcs[v])} parent arc(s) but y={member}"
                )
        if sol.is_one(model.y_names[(t, r)]):
            raise ExtractionError(f"strategy {t}: rootout: root {r} is marked as a tree vertex")

        edges = []
        for v in g.vertices:
            if not in_arcs[v]:
                continue
            w = rationalize(sol.value(model.z_names[(t, v)]), max_exponent)
            if w.is_zero():
                continue
            if w > cap:
                raise ExtractionError(f"strategy {t}: link: w({v})={w} exceeds 2^(ell-1)={cap}")
            edges.append((in_arcs[v][0], v, w))

        strategy = TreeStrategy(graph=g, root=r, edges=tuple(edges))
        verdict = validate_strategy(strategy)
        if not verdict.ok:
            raise ExtractionError(
                f"strategy {t}: " + "; ".join(str(v) for v in verdict.violations)
            )
        strategies.append(strategy)

    bundle = CertificateBundle(graph=g, root=r, strategies=tuple(strategies))
    if model.variant is Variant.STS:
        bundle = expand_symmetric(bundle)

    try:
        report = covering_bound(bundle)
    except CertificateError as exc:
        raise ExtractionError(f"cover: {exc}") from exc
    logger.info("[extract_strategies] %d strategies extracted, bound %d", len(bundle), report.bound)
    return bundle
