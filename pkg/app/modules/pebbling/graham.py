from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

from .catalog import catalog, product_factors
from .errors import GraphError
from .oracle import PebblingOracle

logger = logging.getLogger(__name__)


@dataclass
class GrahamComparison:
    """pi(G)*pi(H) next to an optional certificate bound for G x H."""

    product_key: str
    left_key: str
    right_key: str
    pi_left: int
    pi_right: int
    bound: Optional[int] = None
    # root the certificate bound holds at; the bound says nothing about other roots
    root: Optional[str] = None

    @property
    def target(self) -> int:
        return self.pi_left * self.pi_right

    @property
    def verdict(self) -> str:
        if self.bound is None:
            return "no certificate bound given"
        if self.bound <= self.target:
            at = f"root {self.root}" if self.root else "its root"
            return (
                f"bound {self.bound} <= {self.target}: certificate bound at {at} "
                f"is at most pi({self.left_key})*pi({self.right_key})"
            )
        return f"bound {self.bound} > {self.target}: inconclusive"

    def to_human_summary(self) -> str:
        return (
            f"pi({self.left_key}) = {self.pi_left}, pi({self.right_key}) = {self.pi_right}, "
            f"target pi({self.product_key}) <= {self.target}; {self.verdict}"
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "product": self.product_key,
            "left": self.left_key,
            "right": self.right_key,
            "pi_left": self.pi_left,
            "pi_right": self.pi_right,
            "target": self.target,
            "bound": self.bound,
            "root": self.root,
        }


def graham_target(
    product_key: str,
    oracle: Optional[PebblingOracle] = None,
    bound: Optional[int] = None,
    root: Optional[str] = None,
) -> GrahamComparison:
    """
    Split a product catalog key into its factors and compute pi of each with
    the oracle. Raises GraphError for non-product keys and
    BudgetExceededError when a factor is out of the oracle's reach.
    """
    factors = product_factors(product_key)
    if factors is None:
        raise GraphError(f"{product_key!r} is not a product key (<a>*<b> or <key>-square)")
    oracle = oracle or PebblingOracle()
    left_key, right_key = factors

    pi_left = oracle.pebbling_number(catalog(left_key))
    pi_right = pi_left if right_key == left_key else oracle.pebbling_number(catalog(right_key))
    logger.info("[graham] pi(%s)=%d, pi(%s)=%d", left_key, pi_left, right_key, pi_right)
    return GrahamComparison(
        product_key=product_key,
        left_key=left_key,
        right_key=right_key,
        pi_left=pi_left,
        pi_right=pi_right,
        bound=bound,
        root=root,
    )
