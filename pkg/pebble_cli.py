from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import replace
from enum import Enum
from pathlib import Path
from typing import Iterator, List, Optional

import typer
from dotenv import load_dotenv
from joblib import Parallel, delayed
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from tabulate import tabulate

from app.modules.pebbling.catalog import catalog, named_keys, resolve_graph
from app.modules.pebbling.certificate_io import convert_certificate, format_certificate, load_certificate, write_certificate
from app.modules.pebbling.dot_export import bundle_to_dot, write_dot_files
from app.modules.pebbling.errors import GraphError, PebblingError
from app.modules.pebbling.graham import graham_target
from app.modules.pebbling.graph import Graph, mirror_label
from app.modules.pebbling.lp_relaxation import lp_relaxation_bound
from app.modules.pebbling.milp_model import Variant, build_model, model_stats
from app.modules.pebbling.oracle import PebblingOracle
from app.modules.pebbling.solver_config import SolverConfig, load_solver_config, with_overrides
from app.modules.pebbling.strategy import covering_bound
from pebble_flow import BoundRequest, BoundResult, effective_params, run_bound

load_dotenv()

app = typer.Typer(
    add_completion=False,
    no_args_is_help=True,
    help="Tree-strategy certificates for graph pebbling upper bounds.",
)
console = Console(soft_wrap=True)
err_console = Console(stderr=True, soft_wrap=True)
logger = logging.getLogger("pebble_cli")

RESULT_HEADERS = ["root", "strategies", "K", "total weight", "bound", "lp bound", "method"]


class RootsMode(str, Enum):
    ALL = "all"
    MIRROR = "mirror"


@contextmanager
def _exit_on_error() -> Iterator[None]:
    try:
        yield
    except PebblingError as exc:
        err_console.print(f"[red]error:[/red] {escape(str(exc))}", highlight=False)
        raise typer.Exit(code=exc.exit_code)


def _config(config_file: Optional[Path]) -> SolverConfig:
    return load_solver_config(config_file)


def default_T(graph: Graph, variant: Variant) -> int:
    if variant is Variant.STS:
        return 10
    return 6 if graph.name == "bruhat4" else 8


def mirror_representatives(graph: Graph) -> List[str]:
    """Roots (a,b) with index(a,b) <= index(b,a); each mirror pair shares a bound."""
    if not graph.is_self_product:
        raise GraphError(f"--roots mirror needs a self-product graph, {graph.name} is not one")
    return [v for v in graph.vertices if graph.index(v) <= graph.index(mirror_label(v))]


@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging.")) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


# ---------------------------------------------------------------------- #
# Commands
# ---------------------------------------------------------------------- #


@app.command("catalog")
def cmd_catalog(key: Optional[str] = typer.Argument(None, help="Catalog key; omit to list keys.")) -> None:
    """Print a catalog graph in the graph text format."""
    if key is None:
        console.print("named: " + ", ".join(named_keys()))
        console.print("families: path_k, cycle_k, complete_k, hypercube_d")
        console.print("products: <key>-square, <a>*<b>")
        return
    with _exit_on_error():
        typer.echo(catalog(key).to_text(), nl=False)


@app.command("oracle")
def cmd_oracle(
    graph: str = typer.Option(..., "--graph", "-g", help="Catalog key or graph file."),
    root: Optional[str] = typer.Option(None, "--root", "-r", help="Single root; default all roots."),
    budget: Optional[int] = typer.Option(None, "--budget", help="Visited-state budget."),
    jobs: int = typer.Option(1, "--jobs", "-j", help="Parallel roots."),
    config_file: Optional[Path] = typer.Option(None, "--config", help="key = value config file."),
) -> None:
    """Brute-force pi(G, r) with a witness configuration."""
    with _exit_on_error():
        config = with_overrides(_config(config_file), budget=budget)
        g = resolve_graph(graph)
        oracle = PebblingOracle(budget=config.budget, n_jobs=jobs)
        reports = oracle.reports(g, [root] if root else None)
        rows = [
            [rep.root, rep.rooted_pebbling_number, rep.max_unsolvable_size, str(rep.witness), rep.visited_states]
            for rep in reports
        ]
        console.print(tabulate(rows, headers=["root", "pi(G,r)", "max unsolvable", "witness", "visited"]))
        for rep in reports:
            console.print(rep.to_human_summary(g.name), highlight=False)
        if root is None:
            console.print(f"pi({g.name}) = {max(rep.rooted_pebbling_number for rep in reports)}", highlight=False)


@app.command("bound")
def cmd_bound(
    graph: str = typer.Option(..., "--graph", "-g", help="Catalog key or graph file."),
    root: Optional[str] = typer.Option(None, "--root", "-r", help="Target root; default first vertex."),
    roots: Optional[RootsMode] = typer.Option(None, "--roots", help="Run every root, or one per mirror pair."),
    T: Optional[int] = typer.Option(None, "--T", help="Strategies per model (default 10 STS, 8 TS, 6 bruhat4)."),
    ell: int = typer.Option(16, "--ell", help="Depth cap; weights at most 2^(ell-1)."),
    variant: Variant = typer.Option(Variant.TS, "--variant", case_sensitive=False),
    seed: int = typer.Option(0, "--seed"),
    max_exponent: int = typer.Option(6, "--max-exponent", help="Dyadic exponent for rationalized weights."),
    heuristic: Optional[bool] = typer.Option(
        None, "--heuristic/--no-heuristic",
        help="Force heuristic generation, or forbid it. Default: solver when configured, else heuristic.",
    ),
    solver_cmd: Optional[str] = typer.Option(None, "--solver-cmd", help="Overrides solver_cmd."),
    threads: Optional[int] = typer.Option(None, "--threads"),
    time_limit: Optional[int] = typer.Option(None, "--time-limit"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Run directory root."),
    no_lp: bool = typer.Option(False, "--no-lp", help="Skip the LP-relaxation bound."),
    config_file: Optional[Path] = typer.Option(None, "--config", help="key = value config file."),
) -> None:
    """Build the model, generate strategies, verify them and report the bound."""
    with _exit_on_error():
        config = with_overrides(
            _config(config_file),
            solver_cmd=solver_cmd, threads=threads, time_limit=time_limit, output_root=output,
        )
        g = resolve_graph(graph)
        if root is not None:
            g.require_vertex(root)
        T = T if T is not None else default_T(g, variant)

        if roots is RootsMode.ALL:
            targets = list(g.vertices)
        elif roots is RootsMode.MIRROR:
            targets = mirror_representatives(g)
        else:
            targets = [root or g.vertices[0]]

        requests = [
            BoundRequest(
                graph_source=graph, root=r, T=T, ell=ell, variant=variant, seed=seed,
                max_exponent=max_exponent,
                allow_heuristic=heuristic is not False,
                force_heuristic=heuristic is True,
                compute_lp=not no_lp,
                config=config,
            )
            for r in targets
        ]
        if len(requests) == 1:
            results = [run_bound(requests[0])]
        else:
            results = Parallel(n_jobs=config.threads, prefer="processes")(delayed(run_bound)(req) for req in requests)

        if roots is RootsMode.MIRROR:
            results = _with_mirrors(g, results)

        if len(results) == 1:
            console.print(results[0].summary, highlight=False, end="")
            return
        console.print(tabulate([res.to_row() for res in results], headers=RESULT_HEADERS))
        best = max(res.report.bound for res in results)
        console.print(f"pi({g.name}) <= {best}", highlight=False)


def _with_mirrors(g: Graph, results: List[BoundResult]) -> List[BoundResult]:
    by_root = {res.root: res for res in results}
    out = []
    for v in g.vertices:
        if v in by_root:
            out.append(by_root[v])
        else:
            source = by_root[mirror_label(v)]
            out.append(replace(source, root=v, mirror_of=source.root))
    return out


@app.command("verify")
def cmd_verify(
    certificate: Path = typer.Argument(..., help="Exact certificate file."),
    no_lp: bool = typer.Option(False, "--no-lp", help="Skip the LP-relaxation bound."),
    expect_bound: Optional[int] = typer.Option(
        None, "--expect-bound", help="Bound the certificate must give; default the bound recorded in the file."
    ),
) -> None:
    """Re-validate every strategy exactly and recompute the bound."""
    with _exit_on_error():
        bundle = load_certificate(certificate)
        verdicts = bundle.verdicts()
        if not all(v.ok for v in verdicts):
            for t, verdict in enumerate(verdicts, start=1):
                if not verdict.ok:
                    console.print(f"strategy {t}: {verdict.to_human_summary()}", highlight=False)
            console.print("[red]INVALID[/red]")
            raise typer.Exit(code=1)

        report = covering_bound(bundle)
        expected = expect_bound if expect_bound is not None else bundle.claimed_bound
        if expected is not None and expected != report.bound:
            console.print(report.to_human_summary(), highlight=False)
            console.print(
                f"bound mismatch: certificate claims bound pi <= {expected}, strategies give {report.bound}",
                highlight=False,
            )
            console.print("[red]INVALID[/red]")
            raise typer.Exit(code=1)
        console.print("[green]VALID[/green]")
        console.print(report.to_human_summary(), highlight=False)
        console.print(f"K attained at: {', '.join(report.attaining)}", highlight=False)
        if not no_lp:
            console.print(f"lp relaxation bound: {lp_relaxation_bound(bundle)}", highlight=False)


@app.command("convert")
def cmd_convert(
    certificate: Path = typer.Argument(..., help="Decimal certificate file."),
    max_exponent: int = typer.Option(6, "--max-exponent", help="Largest power of two in denominators."),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Exact certificate; default stdout."),
) -> None:
    """Rationalize a decimal certificate into the exact format."""
    with _exit_on_error():
        if not certificate.is_file():
            raise GraphError(f"certificate file not found: {certificate}")
        in_dir = certificate.parent
        result = convert_certificate(certificate.read_text(encoding="utf-8"), max_exponent, base_dir=in_dir)
        for note in result.adjustments:
            logger.info("[convert] %s", note)

        source = result.graph_source
        if output is None:
            typer.echo(format_certificate(result.bundle, source), nl=False)
            return
        if (in_dir / source).is_file() and output.parent.resolve() != in_dir.resolve():
            source = str((in_dir / source).resolve())
        write_certificate(result.bundle, output, graph_source=source)
        report = covering_bound(result.bundle)
        console.print(f"wrote {output} ({len(result.adjustments)} weights rounded)", highlight=False)
        console.print(report.to_human_summary(), highlight=False)


@app.command("dot")
def cmd_dot(
    certificate: Path = typer.Argument(..., help="Exact certificate file."),
    out_dir: Optional[Path] = typer.Option(None, "--out-dir", help="One .dot file per strategy; default stdout."),
) -> None:
    """Graphviz DOT digraph per strategy. Invalid certificates are refused."""
    with _exit_on_error():
        bundle = load_certificate(certificate)
        if out_dir is None:
            for text in bundle_to_dot(bundle):
                typer.echo(text, nl=False)
            return
        for path in write_dot_files(bundle, out_dir, stem=certificate.name.split(".")[0]):
            console.print(str(path), highlight=False)


@app.command("stats")
def cmd_stats(
    graph: str = typer.Option(..., "--graph", "-g", help="Catalog key or graph file."),
    root: Optional[str] = typer.Option(None, "--root", "-r"),
    T: Optional[int] = typer.Option(None, "--T"),
    ell: int = typer.Option(16, "--ell"),
    variant: Variant = typer.Option(Variant.TS, "--variant", case_sensitive=False),
) -> None:
    """Model size as built, next to the closed-form estimate."""
    with _exit_on_error():
        g = resolve_graph(graph)
        r = root or g.vertices[0]
        params = effective_params(g, r, T if T is not None else default_T(g, variant), ell, variant)
        stats = model_stats(build_model(g, r, params))
        rows = [
            ["variables", stats.variable_count, stats.formula_variables],
            ["  binary", stats.binary_count, ""],
            ["  continuous", stats.continuous_count, ""],
            ["constraints", stats.constraint_count, stats.formula_constraints],
        ]
        console.print(
            f"{g.name} root {r}, variant {params.variant.value.upper()}, T={params.T}, ell={params.ell}",
            highlight=False,
        )
        console.print(tabulate(rows, headers=["", "as built", "formula"]))
        console.print(tabulate(sorted(stats.per_family.items()), headers=["family", "rows"]))
        for line in stats.explanation():
            console.print(line, highlight=False)


@app.command("graham")
def cmd_graham(
    graph: str = typer.Option(..., "--graph", "-g", help="Product key, <a>*<b> or <key>-square."),
    certificate: Optional[Path] = typer.Option(None, "--certificate", "-c", help="Certificate on the product."),
    budget: Optional[int] = typer.Option(None, "--budget"),
    config_file: Optional[Path] = typer.Option(None, "--config"),
) -> None:
    """Compare pi(G)*pi(H) with a certificate bound on the product."""
    with _exit_on_error():
        config = with_overrides(_config(config_file), budget=budget)
        bound, root = None, None
        if certificate is not None:
            bundle = load_certificate(certificate)
            bound, root = covering_bound(bundle).bound, bundle.root
        comparison = graham_target(graph, PebblingOracle(budget=config.budget), bound=bound, root=root)
        console.print(comparison.to_human_summary(), highlight=False)


@app.command("config")
def cmd_config(config_file: Optional[Path] = typer.Option(None, "--config")) -> None:
    """Print the effective configuration after file and environment resolution."""
    with _exit_on_error():
        config = _config(config_file)
        rows = [[k, "" if v is None else v] for k, v in config.to_dict().items()]
        console.print(tabulate(rows, headers=["key", "value"]), highlight=False)


if __name__ == "__main__":
    app()
