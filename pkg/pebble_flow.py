from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, TypedDict

from langgraph.graph import END, StateGraph

from app.modules.pebbling.catalog import resolve_graph
from app.modules.pebbling.certificate_io import load_certificate
from app.modules.pebbling.errors import CertificateError, SolverError, UnboundedLPError
from app.modules.pebbling.extraction import extract_strategies
from app.modules.pebbling.graph import Graph, ProductVertex
from app.modules.pebbling.heuristic import heuristic_generate
from app.modules.pebbling.lp_relaxation import lp_relaxation_bound
from app.modules.pebbling.milp_model import MilpModel, ModelParams, ModelStats, Variant, build_model, model_stats
from app.modules.pebbling.run_writer import RunArtifacts, RunWriter
from app.modules.pebbling.solution_parser import load_solution
from app.modules.pebbling.solver_config import SolverConfig
from app.modules.pebbling.solver_runner import SolverRunner
from app.modules.pebbling.strategy import CertificateBundle, CertificateReport, covering_bound

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundRequest:
    """One single-root run of the bound pipeline."""

    graph_source: str
    root: str
    T: int
    ell: int = 16
    variant: Variant = Variant.TS
    seed: int = 0
    max_exponent: int = 6
    allow_heuristic: bool = True
    force_heuristic: bool = False
    compute_lp: bool = True
    config: SolverConfig = field(default_factory=SolverConfig)


@dataclass
class BoundResult:
    root: str
    method: str
    variant: Variant
    report: CertificateReport
    lp_bound: Optional[int]
    stats: ModelStats
    run_dir: Path
    certificate_path: Path
    summary: str
    mirror_of: Optional[str] = None

    def to_row(self) -> List[Any]:
        return [
            self.root,
            self.report.strategy_count,
            self.report.K.to_decimal_string(),
            self.report.total_weight.to_decimal_string(),
            self.report.bound,
            self.lp_bound if self.lp_bound is not None else "-",
            self.method if self.mirror_of is None else f"mirror of {self.mirror_of}",
        ]


class BoundState(TypedDict, total=False):
    # Inputs
    request: BoundRequest

    # Set by build_model
    graph: Graph
    params: ModelParams
    model: MilpModel
    stats: ModelStats
    artifacts: RunArtifacts

    # Set by solve / heuristic
    method: str
    bundle: CertificateBundle

    # Set by certify / verify
    certificate_path: str
    report: CertificateReport
    lp_bound: Optional[int]

    # Set by report
    summary_text: str


def effective_params(graph: Graph, root: str, T: int, ell: int, variant: Variant) -> ModelParams:
    """STS needs a self-product and a diagonal root; otherwise fall back to TS."""
    if variant is Variant.STS:
        diagonal = graph.is_self_product and ProductVertex.parse(root).left == ProductVertex.parse(root).right
        if not diagonal:
            logger.warning(
                "[pebble_flow] STS needs a diagonal root of a self-product; using TS for %s root %s",
                graph.name, root,
            )
            return ModelParams(T=T, ell=ell, variant=Variant.TS)
    return ModelParams(T=T, ell=ell, variant=variant)


def build_bound_graph(runner: SolverRunner, writer: RunWriter):
    """
    LangGraph for a single-root bound run:

        build_model
          -> write_model
          -> solve | heuristic
          -> certify
          -> verify
          -> report
    """

    graph = StateGraph(BoundState)

    # ---------------------- Nodes ---------------------- #

    def build_model_node(state: BoundState) -> Dict[str, Any]:
        req = state["request"]
        g = resolve_graph(req.graph_source)
        g.require_vertex(req.root)
        params = effective_params(g, req.root, req.T, req.ell, req.variant)
        model = build_model(g, req.root, params)
        return {
            "graph": g,
            "params": params,
            "model": model,
            "stats": model_stats(model),
            "artifacts": writer.artifacts(g.name, req.root),
        }

    def write_model_node(state: BoundState) -> Dict[str, Any]:
        path = writer.write_model(state["artifacts"], state["model"])
        logger.info("[pebble_flow] LP model written to %s", path)
        return {}

    def route_generation(state: BoundState) -> str:
        req = state["request"]
        if runner.available and not req.force_heuristic:
            return "solve"
        if req.allow_heuristic:
            if not runner.available:
                logger.warning("[pebble_flow] no solver configured; generating strategies heuristically")
            return "heuristic"
        raise SolverError("no generation method: no solver command configured and heuristic generation disabled")

    def solve_node(state: BoundState) -> Dict[str, Any]:
        req = state["request"]
        model = state["model"]
        solution_path = runner.run_for_model(state["artifacts"].model_path, state["artifacts"].solution_path)
        solution = load_solution(solution_path, model)
        bundle = extract_strategies(model, solution, req.max_exponent)
        return {"bundle": bundle, "method": "solver"}

    def heuristic_node(state: BoundState) -> Dict[str, Any]:
        req = state["request"]
        bundle = heuristic_generate(state["graph"], req.root, state["params"], seed=req.seed)
        return {"bundle": bundle, "method": "heuristic"}

    def certify_node(state: BoundState) -> Dict[str, Any]:
        req = state["request"]
        source = req.graph_source
        if Path(source).is_file():
            source = str(Path(source).resolve())
        path = writer.write_bundle(state["artifacts"], state["bundle"], graph_source=source)
        return {"certificate_path": str(path)}

    def verify_node(state: BoundState) -> Dict[str, Any]:
        # from disk, from scratch: the written file is what gets reported
        bundle = load_certificate(state["certificate_path"])
        report = covering_bound(bundle)
        if bundle.claimed_bound != report.bound:
            raise CertificateError(
                f"{state['certificate_path']} records bound {bundle.claimed_bound}, strategies give {report.bound}"
            )
        lp_bound: Optional[int] = None
        if state["request"].compute_lp:
            try:
                lp_bound = lp_relaxation_bound(bundle)
            except UnboundedLPError:
                lp_bound = None
        return {"report": report, "lp_bound": lp_bound}

    def report_node(state: BoundState) -> Dict[str, Any]:
        req = state["request"]
        report = state["report"]
        stats = state["stats"]
        lines = [
            report.to_human_summary(),
            f"method: {state['method']} (variant {state['params'].variant.value.upper()}, "
            f"T={state['params'].T}, ell={state['params'].ell}, seed={req.seed})",
            f"lp relaxation bound: {state['lp_bound'] if state.get('lp_bound') is not None else 'not computed'}",
            f"K attained at: {', '.join(report.attaining)}",
            f"model: {stats.variable_count} variables ({stats.binary_count} binary, "
            f"{stats.continuous_count} continuous), {stats.constraint_count} constraints",
            f"certificate: {state['certificate_path']}",
        ]
        text = "\n".join(lines) + "\n"
        writer.write_report(state["artifacts"], text)
        return {"summary_text": text}

    # -------------------- Graph wiring ----------------- #

    graph.add_node("build_model", build_model_node)
    graph.add_node("write_model", write_model_node)
    graph.add_node("solve", solve_node)
    graph.add_node("heuristic", heuristic_node)
    graph.add_node("certify", certify_node)
    graph.add_node("verify", verify_node)
    graph.add_node("report", report_node)

    graph.set_entry_point("build_model")
    graph.add_edge("build_model", "write_model")
    graph.add_conditional_edges("write_model", route_generation, {"solve": "solve", "heuristic": "heuristic"})
    graph.add_edge("solve", "certify")
    graph.add_edge("heuristic", "certify")
    graph.add_edge("certify", "verify")
    graph.add_edge("verify", "report")
    graph.add_edge("report", END)

    return graph.compile()


def run_bound(request: BoundRequest) -> BoundResult:
    """Run the pipeline for one root. Module-level so joblib workers can call it."""
    runner = SolverRunner(config=request.config)
    writer = RunWriter(output_root=request.config.output_root)
    flow = build_bound_graph(runner, writer)
    state = flow.invoke({"request": request})
    return BoundResult(
        root=request.root,
        method=state["method"],
        variant=state["params"].variant,
        report=state["report"],
        lp_bound=state.get("lp_bound"),
        stats=state["stats"],
        run_dir=state["artifacts"].run_dir,
        certificate_path=Path(state["certificate_path"]),
        summary=state["summary_text"],
    )
