from __future__ import annotations

from pathlib import Path
from typing import Iterable, List, Union

from .milp_model import MilpModel, Term

TERMS_PER_LINE = 8


def _expression(terms: Iterable[Term]) -> List[str]:
    """Render terms as LP-format chunks, TERMS_PER_LINE per output line."""
    chunks: List[str] = []
    for k, (coef, name) in enumerate(terms):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = name if mag == 1 else f"{mag} {name}"
        if k == 0:
            chunks.append(f"- {body}" if coef < 0 else body)
        else:
            chunks.append(f"{sign} {body}")
    if not chunks:
        return ["0"]
    return [" ".join(chunks[i : i + TERMS_PER_LINE]) for i in range(0, len(chunks), TERMS_PER_LINE)]


def emit_lp(model: MilpModel) -> str:
    """CPLEX LP text for the model; identical models give identical text."""
    p = model.params
    out: List[str] = [
        f"\\ pebbling tree strategies: graph {model.graph.name} root {model.root}",
        f"\\ variant {p.variant.value.upper()} T={p.T} ell={p.ell}",
        "Minimize" if model.objective_sense == "minimize" else "Maximize",
    ]

    obj = _expression(model.objective)
    out.append(f" obj: {obj[0]}")
    out.extend(f"   {line}" for line in obj[1:])

    out.append("Subject To")
    for c in model.constraints:
        expr = _expression(c.terms)
        if len(expr) == 1:
            out.append(f" {c.name}: {expr[0]} {c.sense} {c.rhs}")
        else:
            out.append(f" {c.name}: {expr[0]}")
            out.extend(f"   {line}" for line in expr[1:-1])
            out.append(f"   {expr[-1]} {c.sense} {c.rhs}")

    out.append("Bounds")
    for v in model.variables:
        if v.kind == "binary":
            continue
        if v.upper is None:
            out.append(f" {v.name} >= {v.lower}")
        else:
            out.append(f" {v.lower} <= {v.name} <= {v.upper}")

    out.append("Binaries")
    binaries = [v.name for v in model.variables if v.kind == "binary"]
    for i in range(0, len(binaries), TERMS_PER_LINE):
        out.append(" " + " ".join(binaries[i : i + TERMS_PER_LINE]))

    out.append("End")
    return "\n".join(out) + "\n"


def write_lp(model: MilpModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(emit_lp(model), encoding="utf-8")
    return path
