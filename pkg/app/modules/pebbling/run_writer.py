from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .certificate_io import write_certificate
from .lp_writer import write_lp
from .milp_model import MilpModel
from .strategy import CertificateBundle


@dataclass
class RunArtifacts:
    """
    Files of one single-root pipeline run:

    - run_dir: <output_root>/<graph>/<root>/
    - model_path: model.lp
    - solution_path: solution.sol (written by the solver, if one ran)
    - certificate_path: bundle.cert
    - report_path: report.txt
    """

    run_dir: Path

    @property
    def model_path(self) -> Path:
        return self.run_dir / "model.lp"

    @property
    def solution_path(self) -> Path:
        return self.run_dir / "solution.sol"

    @property
    def certificate_path(self) -> Path:
        return self.run_dir / "bundle.cert"

    @property
    def report_path(self) -> Path:
        return self.run_dir / "report.txt"


@dataclass
class RunWriter:
    """
    Owns the output tree. Per-root directories are isolated so parallel
    roots never share a file.
    """

    output_root: Path

    def __post_init__(self) -> None:
        self.output_root = Path(self.output_root)
        self.output_root.mkdir(parents=True, exist_ok=True)

    # ------------------------------------------------------------------ #
    # Public API
    # ------------------------------------------------------------------ #

    def artifacts(self, graph_name: str, root: str) -> RunArtifacts:
        run_dir = self.output_root / _safe(graph_name) / _safe(root)
        run_dir.mkdir(parents=True, exist_ok=True)
        return RunArtifacts(run_dir=run_dir)

    def write_model(self, artifacts: RunArtifacts, model: MilpModel) -> Path:
        return write_lp(model, artifacts.model_path)

    def write_bundle(self, artifacts: RunArtifacts, bundle: CertificateBundle, graph_source: str) -> Path:
        return write_certificate(bundle, artifacts.certificate_path, graph_source=graph_source)

    def write_report(self, artifacts: RunArtifacts, text: str) -> Path:
        artifacts.report_path.write_text(text, encoding="utf-8")
        return artifacts.report_path


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() or c in "_-" else "_" for c in name).strip("_") or "_"
