from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from .errors import ModelError
from .graph import Graph, ProductVertex, Vertex, bidirect, mirror_label

logger = logging.getLogger(__name__)

Term = Tuple[int, str]  # (coefficient, variable name)

_TOKEN_RE = re.compile(r"[^0-9A-Za-z]+")


class Variant(str, Enum):
    TS = "ts"
    STS = "sts"


@dataclass(frozen=True)
class ModelParams:
    # number of tree strategies in the certificate (after mirroring for STS)
    T: int
    # bound on tree depth; big-M is 2**ell, weights are capped at 2**(ell-1)
    ell: int = 16
    variant: Variant = Variant.TS

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.T < 1:
            raise ModelError(f"T must be at least 1, got {self.T}")
        if self.ell < 1:
            raise ModelError(f"ell must be at least 1, got {self.ell}")
        if self.variant is Variant.STS and self.T % 2:
            raise ModelError(f"symmetric models need an even T, got {self.T}")

    @property
    def blocks(self) -> int:
        """Strategy blocks in the model: T, or T/2 for STS."""
        return self.T // 2 if self.variant is Variant.STS else self.T


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str  # "binary" | "continuous"
    lower: int = 0
    upper: Optional[int] = None


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: Tuple[Term, ...]
    sense: str  # "<=", ">=", "="
    rhs: int
    family: str


@dataclass
class MilpModel:
    """
    Abstract mixed-integer model: declared variables, linear rows and a
    minimization objective, plus the lookups extraction needs to read a
    solution back as tree strategies.
    """

    graph: Graph
    root: Vertex
    params: ModelParams
    variables: List[Variable] = field(default_factory=list)
    constraints: List[Constraint] = field(default_factory=list)
    objective: Tuple[Term, ...] = ()
    objective_sense: str = "minimize"

    # (t, parent, child) -> x name ; (t, v) -> y / z name
    x_names: Dict[Tuple[int, Vertex, Vertex], str] = field(default_factory=dict)
    y_names: Dict[Tuple[int, Vertex], str] = field(default_factory=dict)
    z_names: Dict[Tuple[int, Vertex], str] = field(default_factory=dict)

    _declared: Dict[str, Variable] = field(default_factory=dict, repr=False)

    @property
    def variant(self) -> Variant:
        return self.params.variant

    def variable(self, name: str) -> Variable:
        return self._declared[name]

    def has_variable(self, name: str) -> bool:
        return name in self._declared

    def add_variable(self, name: str, kind: str, lower: int = 0, upper: Optional[int] = None) -> str:
        if name in self._declared:
            raise ModelError(f"variable name collision after sanitization: {name}")
        var = Variable(name=name, kind=kind, lower=lower, upper=upper)
        self._declared[name] = var
        self.variables.append(var)
        return name

    def add_constraint(self, name: str, terms: List[Term], sense: str, rhs: int, family: str) -> None:
        for _, var in terms:
            if var not in self._declared:
                raise ModelError(f"constraint {name} references undeclared variable {var}")
        self.constraints.append(Constraint(name, tuple(terms), sense, rhs, family))


# ---------------------------------------------------------------------- #
# Naming
# ---------------------------------------------------------------------- #


def sanitize(label: Vertex) -> str:
    """Vertex label -> LP-safe token: non-alphanumeric runs become '_'."""
    token = _TOKEN_RE.sub("_", label).strip("_")
    if not token:
        raise ModelError(f"vertex label {label!r} has no alphanumeric characters")
    return token


def _tokens(graph: Graph) -> Dict[Vertex, str]:
    tokens = {v: sanitize(v) for v in graph.vertices}
    seen: Dict[str, Vertex] = {}
    for v, tok in tokens.items():
        if tok in seen:
            raise ModelError(f"vertex labels {seen[tok]!r} and {v!r} collide after sanitization as {tok!r}")
        seen[tok] = v
    return tokens


# ---------------------------------------------------------------------- #
# Builders
# ---------------------------------------------------------------------- #


def _build(graph: Graph, root: Vertex, params: ModelParams) -> MilpModel:
    graph.require_vertex(root)
    graph.require_connected()

    arcs = bidirect(graph).arcs
    tok = _tokens(graph)
    model = MilpModel(graph=graph, root=root, params=params)
    big_m = 2**params.ell
    z_cap = 2 ** (params.ell - 1)

    for t in range(1, params.blocks + 1):
        for i, j in arcs:
            model.x_names[(t, i, j)] = model.add_variable(f"x_{t}_{tok[i]}_{tok[j]}", "binary", 0, 1)
        for v in graph.vertices:
            model.y_names[(t, v)] = model.add_variable(f"y_{t}_{tok[v]}", "binary", 0, 1)
        for v in graph.vertices:
            model.z_names[(t, v)] = model.add_variable(f"z_{t}_{tok[v]}", "continuous", 0, None)

    for t in range(1, params.blocks + 1):
        x = lambda i, j: model.x_names[(t, i, j)]  # noqa: E731
        y = lambda v: model.y_names[(t, v)]  # noqa: E731
        z = lambda v: model.z_names[(t, v)]  # noqa: E731

        # every tree vertex has exactly one parent arc
        for v in graph.vertices:
            terms = [(1, x(u, v)) for u in graph.neighbors(v)]
            terms.append((-1, y(v)))
            model.add_constraint(f"inflow_{t}_{tok[v]}", terms, "=", 0, "inflow")

        model.add_constraint(
            f"rootchild_{t}",
            [(1, y(v)) for v in graph.neighbors(root)],
            ">=",
            1,
            "rootchild",
        )

        # z_i - 2 z_j + 2^ell (1 - x_ij) >= 0, arcs away from the root only
        for i, j in arcs:
            if root in (i, j):
                continue
            model.add_constraint(
                f"double_{t}_{tok[i]}_{tok[j]}",
                [(1, z(i)), (-2, z(j)), (-big_m, x(i, j))],
                ">=",
                -big_m,
                "double",
            )

        for v in graph.vertices:
            model.add_constraint(f"link_{t}_{tok[v]}", [(1, z(v)), (-z_cap, y(v))], "<=", 0, "link")

        model.add_constraint(f"rootout_{t}", [(1, y(root))], "=", 0, "rootout")

    return model


def build_ts_model(graph: Graph, root: Vertex, params: ModelParams) -> MilpModel:
    if params.variant is not Variant.TS:
        raise ModelError("build_ts_model needs variant TS")
    model = _build(graph, root, params)

    for v in graph.vertices:
        if v == root:
            continue
        terms = [(1, model.z_names[(t, v)]) for t in range(1, params.T + 1)]
        model.add_constraint(f"cover_{sanitize(v)}", terms, ">=", params.T, "cover")

    model.objective = tuple(
        (1, model.z_names[(t, v)]) for t in range(1, params.T + 1) for v in graph.vertices
    )
    logger.debug(
        "[build_ts_model] %s root %s: %d variables, %d constraints",
        graph.name, root, len(model.variables), len(model.constraints),
    )
    return model


def build_sts_model(graph: Graph, root: Vertex, params: ModelParams) -> MilpModel:
    """
    Symmetric model on G□G: T/2 strategy blocks; each block also stands for
    its coordinate-swapped mirror, so coverage of v counts z_v and z_v'.
    """
    if params.variant is not Variant.STS:
        raise ModelError("build_sts_model needs variant STS")
    if not graph.is_self_product:
        raise ModelError(f"{graph.name} is not a product of a graph with itself")
    graph.require_vertex(root)
    pv = ProductVertex.parse(root)
    if pv.left != pv.right:
        raise ModelError(f"symmetric models need a diagonal root, got {root}")

    model = _build(graph, root, params)
    blocks = params.blocks

    for v in graph.vertices:
        if v == root:
            continue
        mirror = mirror_label(v)
        coef: Dict[str, int] = {}
        for t in range(1, blocks + 1):
            for u in (v, mirror):
                name = model.z_names[(t, u)]
                coef[name] = coef.get(name, 0) + 1
        terms = [(c, name) for name, c in coef.items()]
        model.add_constraint(f"cover_{sanitize(v)}", terms, ">=", params.T, "cover")

    # sum_i z_i + z_i' counts every z twice
    model.objective = tuple(
        (2, model.z_names[(t, v)]) for t in range(1, blocks + 1) for v in graph.vertices
    )
    logger.debug(
        "[build_sts_model] %s root %s: %d variables, %d constraints",
        graph.name, root, len(model.variables), len(model.constraints),
    )
    return model


def build_model(graph: Graph, root: Vertex, params: ModelParams) -> MilpModel:
    if params.variant is Variant.STS:
        return build_sts_model(graph, root, params)
    return build_ts_model(graph, root, params)


# ---------------------------------------------------------------------- #
# Statistics
# ---------------------------------------------------------------------- #


@dataclass
class ModelStats:
    n: int
    m: int  # arcs of the bidirected graph
    T: int
    blocks: int
    variable_count: int
    constraint_count: int
    binary_count: int
    continuous_count: int
    per_family: Dict[str, int]
    formula_variables: int
    formula_constraints: int
    root_degree: int

    @property
    def constraint_delta(self) -> int:
        return self.constraint_count - self.formula_constraints

    def explanation(self) -> List[str]:
        """Row families as built, each with the closed form it follows."""
        b, n, m, d = self.blocks, self.n, self.m, self.root_degree
        return [
            f"inflow    = blocks*n           = {b}*{n} = {self.per_family.get('inflow', 0)}",
            f"rootchild = blocks             = {self.per_family.get('rootchild', 0)}",
            f"double    = blocks*(m - 2deg r) = {b}*({m} - {2 * d}) = {self.per_family.get('double', 0)}",
            f"link      = blocks*n           = {b}*{n} = {self.per_family.get('link', 0)}",
            f"rootout   = blocks             = {self.per_family.get('rootout', 0)}",
            f"cover     = n - 1              = {self.per_family.get('cover', 0)}",
            f"as built  = blocks*(2n + m - 2deg r + 2) + n - 1 = {self.constraint_count}",
            f"formula   = T*(2m + 2n + 1) + n = {self.formula_constraints} (delta {self.constraint_delta:+d})",
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "T": self.T,
            "variables": self.variable_count,
            "constraints": self.constraint_count,
            "binary": self.binary_count,
            "continuous": self.continuous_count,
            "formula_variables": self.formula_variables,
            "formula_constraints": self.formula_constraints,
        }


def model_stats(model: MilpModel) -> ModelStats:
    n = model.graph.n
    m = 2 * model.graph.m
    per_family: Dict[str, int] = {}
    for c in model.constraints:
        per_family[c.family] = per_family.get(c.family, 0) + 1
    binary = sum(1 for v in model.variables if v.kind == "binary")
    T = model.params.T
    return ModelStats(
        n=n,
        m=m,
        T=T,
        blocks=model.params.blocks,
        variable_count=len(model.variables),
        constraint_count=len(model.constraints),
        binary_count=binary,
        continuous_count=len(model.variables) - binary,
        per_family=per_family,
        formula_variables=model.params.blocks * (2 * n + m),
        formula_constraints=T * (2 * m + 2 * n + 1) + n,
        root_degree=model.graph.degree(model.root),
    )
