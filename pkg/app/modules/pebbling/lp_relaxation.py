from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List

from .errors import UnboundedLPError
from .graph import Vertex
from .strategy import CertificateBundle

logger = logging.getLogger(__name__)


@dataclass
class LPRelaxationResult:
    objective: Fraction
    values: Dict[Vertex, Fraction]
    pivots: int

    @property
    def bound(self) -> int:
        return math.floor(self.objective) + 1


class _Tableau:
    """
    Dictionary-form tableau for max c.x s.t. A x <= b, x >= 0 with b >= 0,
    so the slack basis is feasible from the start. Column j of A always
    belongs to nonbasic variable nb_vars[j]; pivoting exchanges it with the
    basic variable of row i.
    """

    def __init__(self, A: List[List[Fraction]], b: List[Fraction], c: List[Fraction]) -> None:
        self.m = len(A)
        self.n = len(c)
        self.A = [list(row) for row in A]
        self.b = list(b)
        self.c = list(c)
        self.z = Fraction(0)
        self.nb_vars = list(range(self.n))
        self.b_vars = list(range(self.n, self.n + self.m))
        self.pivots = 0

    def pivot(self, i: int, j: int) -> None:
        piv = self.A[i][j]
        delta = self.c[j] / piv
        self.z += delta * self.b[i]
        for col in range(self.n):
            self.c[col] -= delta * self.A[i][col]
        self.c[j] = -delta

        for col in range(self.n):
            self.A[i][col] = 1 / piv if col == j else self.A[i][col] / piv
        self.b[i] /= piv

        for k in range(self.m):
            if k == i:
                continue
            f = self.A[k][j]
            if not f:
                continue
            for col in range(self.n):
                self.A[k][col] = -f / piv if col == j else self.A[k][col] - f * self.A[i][col]
            self.b[k] -= f * self.b[i]

        self.nb_vars[j], self.b_vars[i] = self.b_vars[i], self.nb_vars[j]
        self.pivots += 1

    def bland_step(self) -> str:
        entering = [(self.nb_vars[j], j) for j in range(self.n) if self.c[j] > 0]
        if not entering:
            return "optimal"
        _, j = min(entering)
        rows = [(self.b[i] / self.A[i][j], self.b_vars[i], i) for i in range(self.m) if self.A[i][j] > 0]
        if not rows:
            return "unbounded"
        _, _, i = min(rows)
        self.pivot(i, j)
        return "go_on"

    def solve(self) -> str:
        while True:
            status = self.bland_step()
            if status != "go_on":
                return status

    def primal_values(self) -> List[Fraction]:
        x = [Fraction(0)] * self.n
        for i, var in enumerate(self.b_vars):
            if var < self.n:
                x[var] = self.b[i]
        return x


def solve_lp_relaxation(bundle: CertificateBundle) -> LPRelaxationResult:
    """
    max sum_{v != r} C(v)  s.t.  w_t . C <= w_t . 1 for every strategy t,
    C >= 0, solved exactly.
    """
    bundle.require_valid()
    g, r = bundle.graph, bundle.root
    cols = [v for v in g.vertices if v != r]

    uncovered = [v for v in cols if not any(s.weight_of(v) for s in bundle.strategies)]
    if uncovered:
        raise UnboundedLPError("LP relaxation is unbounded; uncovered vertices: " + ", ".join(uncovered))

    A = [[s.weight_of(v).to_fraction() for v in cols] for s in bundle.strategies]
    b = [s.total_weight().to_fraction() for s in bundle.strategies]
    c = [Fraction(1)] * len(cols)

    tableau = _Tableau(A, b, c)
    if tableau.solve() == "unbounded":
        raise UnboundedLPError(f"LP relaxation unbounded for {g.name} root {r}")

    x = tableau.primal_values()
    logger.debug(
        "[solve_lp_relaxation] %s root %s: optimum %s after %d pivots",
        g.name, r, tableau.z, tableau.pivots,
    )
    return LPRelaxationResult(
        objective=tableau.z,
        values={v: val for v, val in zip(cols, x) if val},
        pivots=tableau.pivots,
    )


def lp_relaxation_bound(bundle: CertificateBundle) -> int:
    return solve_lp_relaxation(bundle).bound
