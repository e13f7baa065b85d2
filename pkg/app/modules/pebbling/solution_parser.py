from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .errors import SolutionError
from .milp_model import MilpModel

logger = logging.getLogger(__name__)

SNAP_TOLERANCE = Fraction(3, 10)

_GUROBI_OBJECTIVE = re.compile(r"#\s*objective value\s*=\s*(\S+)", re.IGNORECASE)
_CBC_HEADER = re.compile(r"^(?P<status>.*?)\s*-\s*objective value\s+(?P<obj>\S+)\s*$", re.IGNORECASE)


@dataclass
class SolutionAssignment:
    values: Dict[str, Fraction] = field(default_factory=dict)
    objective_value: Optional[Fraction] = None
    status: str = "unknown"  # optimal | feasible | infeasible | unknown

    def value(self, name: str) -> Fraction:
        return self.values.get(name, Fraction(0))

    def is_one(self, name: str) -> bool:
        return self.values.get(name, Fraction(0)) == 1


def _number(token: str, lineno: int) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise SolutionError(f"line {lineno}: not a number: {token!r}") from exc


def _status_word(text: str) -> str:
    low = text.lower()
    if "infeasible" in low:
        return "infeasible"
    if low.startswith("optimal"):
        return "optimal"
    if low.startswith("stopped") or "feasible" in low or "integer" in low:
        return "feasible"
    return "unknown"


def _read_pairs(text: str) -> Tuple[List[Tuple[int, str, str]], Optional[Fraction], str, bool]:
    """
    Normalize the supported solution shapes to (lineno, name, value) rows.

    - plain `name value` lines, optional `objective <v>` / `status <word>`
    - Gurobi .sol: `# Objective value = <v>` comment, then `name value`
    - CBC: first line `<status> - objective value <v>`, then
      `index name value reduced-cost` rows (a leading `**` marks infeasibility)
    """
    rows: List[Tuple[int, str, str]] = []
    objective: Optional[Fraction] = None
    status = "unknown"
    cbc = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            match = _GUROBI_OBJECTIVE.match(line)
            if match:
                objective = _number(match.group(1), lineno)
            continue

        if not rows and not cbc and objective is None:
            header = _CBC_HEADER.match(line)
            if header:
                cbc = True
                status = _status_word(header.group("status"))
                objective = _number(header.group("obj"), lineno)
                continue
            if line.lower().startswith("infeasible"):
                cbc = True
                status = "infeasible"
                continue

        parts = line.split()
        if cbc:
            if parts[0] == "**":
                parts = parts[1:]
            if len(parts) != 4:
                raise SolutionError(f"line {lineno}: expected 'index name value reduced-cost', got {line!r}")
            rows.append((lineno, parts[1], parts[2]))
        elif len(parts) == 2 and parts[0].lower() == "objective":
            objective = _number(parts[1], lineno)
        elif len(parts) == 2 and parts[0].lower() == "status":
            status = _status_word(parts[1])
        elif len(parts) == 2:
            rows.append((lineno, parts[0], parts[1]))
        else:
            raise SolutionError(f"line {lineno}: expected 'name value', got {line!r}")
    return rows, objective, status, cbc


def parse_solution(text: str, model: MilpModel) -> SolutionAssignment:
    """
    Read a solver solution for `model`. Binary variables within
    SNAP_TOLERANCE of 0 or 1 are snapped; continuous values are kept
    exactly as printed. Variables missing from the file are zero.
    """
    rows, objective, status, cbc = _read_pairs(text)
    constraint_names = {c.name for c in model.constraints} if cbc else set()

    values: Dict[str, Fraction] = {}
    for lineno, name, token in rows:
        if not model.has_variable(name):
            if name in constraint_names:
                continue  # CBC also prints row activities
            raise SolutionError(f"line {lineno}: unknown variable {name!r}")
        value = _number(token, lineno)
        if model.variable(name).kind == "binary":
            nearest = round(value)
            if nearest not in (0, 1) or abs(value - nearest) > SNAP_TOLERANCE:
                raise SolutionError(
                    f"line {lineno}: binary {name} = {token} is not within {float(SNAP_TOLERANCE)} of 0 or 1"
                )
            value = Fraction(nearest)
        values[name] = value

    logger.debug("[parse_solution] %d values, status %s, objective %s", len(values), status, objective)
    return SolutionAssignment(values=values, objective_value=objective, status=status)


def load_solution(path: Union[str, Path], model: MilpModel) -> SolutionAssignment:
    path = Path(path)
    if not path.is_file():
        raise SolutionError(f"solution file not found: {path}")
    return parse_solution(path.read_text(encoding="utf-8"), model)
