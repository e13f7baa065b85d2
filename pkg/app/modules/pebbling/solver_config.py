from __future__ import annotations

import logging
import os
import shlex
import string
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

from dotenv import dotenv_values

from .errors import ConfigError
from .oracle import DEFAULT_BUDGET

logger = logging.getLogger(__name__)

SOLVER_CMD_ENV = "PEBBLE_SOLVER_CMD"
BUDGET_ENV = "PEBBLE_BUDGET"

_PLACEHOLDERS = {"model", "solution", "threads", "time_limit"}
_INT_KEYS = ("threads", "budget", "time_limit")


@dataclass(frozen=True)
class SolverConfig:
    """
    Settings for solver invocation and the oracle budget.
    """

    # Shell command template; {model} and {solution} are required,
    # {threads} and {time_limit} optional. None means "no solver configured".
    solver_cmd: Optional[str] = None

    # Worker processes for --roots fan-out, also passed to the solver as {threads}
    threads: int = 16

    # Seconds handed to the solver as {time_limit}; None leaves it unset
    time_limit: Optional[int] = None

    # Visited-state budget for the brute-force oracle
    budget: int = DEFAULT_BUDGET

    # Root folder for per-graph, per-root run directories
    output_root: Path = Path("runs")

    def __post_init__(self) -> None:
        if self.solver_cmd is not None:
            validate_template(self.solver_cmd)
        if self.threads < 1:
            raise ConfigError(f"threads must be positive, got {self.threads}")
        if self.budget < 1:
            raise ConfigError(f"budget must be positive, got {self.budget}")

    def render_command(self, model: Path, solution: Path) -> str:
        if self.solver_cmd is None:
            raise ConfigError("no solver command configured")
        return self.solver_cmd.format(
            model=shlex.quote(str(model)),
            solution=shlex.quote(str(solution)),
            threads=self.threads,
            time_limit=self.time_limit if self.time_limit is not None else "",
        )

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["output_root"] = str(self.output_root)
        return data


def validate_template(template: str) -> None:
    try:
        fields = {name for _, name, _, _ in string.Formatter().parse(template) if name is not None}
    except ValueError as exc:
        raise ConfigError(f"malformed solver command template {template!r}: {exc}") from exc
    unknown = fields - _PLACEHOLDERS
    if unknown:
        raise ConfigError(f"unknown placeholder(s) in solver command: {', '.join(sorted(unknown))}")
    missing = {"model", "solution"} - fields
    if missing:
        raise ConfigError(f"solver command must contain {', '.join('{' + m + '}' for m in sorted(missing))}")


def _as_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{key} must be an integer, got {raw!r}") from exc


def load_solver_config(path: Optional[Union[str, Path]] = None, environ: Optional[Dict[str, str]] = None) -> SolverConfig:
    """
    Resolve the effective configuration: defaults, then the `key = value`
    config file (if given), then environment overrides.
    """
    environ = dict(os.environ) if environ is None else environ
    values: Dict[str, Any] = {}

    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        for key, raw in dotenv_values(path).items():
            if raw is None or raw == "":
                continue
            if key == "solver_cmd":
                values["solver_cmd"] = raw
            elif key == "output_root":
                values["output_root"] = Path(raw)
            elif key in _INT_KEYS:
                values[key] = _as_int(key, raw)
            else:
                logger.warning("[SolverConfig] ignoring unknown config key %r in %s", key, path)

    if environ.get(SOLVER_CMD_ENV):
        values["solver_cmd"] = environ[SOLVER_CMD_ENV]
    if environ.get(BUDGET_ENV):
        values["budget"] = _as_int(BUDGET_ENV, environ[BUDGET_ENV])

    config = SolverConfig(**values)
    logger.debug("[SolverConfig] effective configuration %s", config.to_dict())
    return config


def with_overrides(config: SolverConfig, **overrides: Any) -> SolverConfig:
    """Apply CLI flags; None values leave the setting untouched."""
    changes = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **changes) if changes else config
