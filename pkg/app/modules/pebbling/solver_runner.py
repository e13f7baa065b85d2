from __future__ import annotations

import logging
import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import SolverError
from .solver_config import SolverConfig

logger = logging.getLogger(__name__)


@dataclass
class SolverRunner:
    """
    Runs the configured external MILP solver on an LP file:
      1. Renders the command template with the model/solution paths
      2. Runs it through bash in the model's directory
      3. Writes STDOUT/STDERR to solver.log next to the model
      4. Checks that the solution file was produced

    The toolkit never trusts the solver's claims; the solution is parsed and
    re-verified exactly downstream.
    """

    config: SolverConfig

    @property
    def available(self) -> bool:
        return self.config.solver_cmd is not None

    def run_for_model(self, model_path: Path, solution_path: Optional[Path] = None) -> Path:
        """
        Main API.

        :param model_path: LP file written by the pipeline
        :param solution_path: where the solver must write its solution;
                              defaults to solution.sol next to the model
        """
        model_path = Path(model_path).resolve()
        if not model_path.exists():
            raise FileNotFoundError(f"LP model not found: {model_path}")
        solution_path = (solution_path or model_path.with_name("solution.sol")).resolve()
        if solution_path.exists():
            solution_path.unlink()

        cmd = self.config.render_command(model_path, solution_path)
        log_path = model_path.with_name("solver.log")
        logger.info("[SolverRunner] Solver command: %s", cmd)
        self._run_command(cmd, cwd=model_path.parent, log_path=log_path)
        return self._locate_solution(solution_path, log_path)

    # ---------------------- Internals ---------------------- #

    def _run_command(self, cmd: str, cwd: Path, log_path: Path) -> None:
        proc = subprocess.run(
            ["bash", "-lc", cmd],
            cwd=str(cwd),
            text=True,
            capture_output=True,
        )
        log_path.write_text(
            f"$ {cmd}\n\n--- STDOUT ---\n{proc.stdout}\n--- STDERR ---\n{proc.stderr}",
            encoding="utf-8",
        )
        logger.info("[SolverRunner] Solver exited with code %d (log: %s)", proc.returncode, log_path)

        if proc.returncode != 0:
            raise SolverError(
                f"solver run failed (exit code {proc.returncode}); see {log_path}"
            )

    def _locate_solution(self, solution_path: Path, log_path: Path) -> Path:
        logger.debug("[SolverRunner] Looking for solution at: %s", solution_path)
        if not solution_path.exists():
            raise SolverError(f"solver produced no solution file at {solution_path}; see {log_path}")
        return solution_path
