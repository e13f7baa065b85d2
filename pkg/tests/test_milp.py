import pytest

from app.modules.pebbling.catalog import catalog
from app.modules.pebbling.errors import ExtractionError, ModelError, SolutionError
from app.modules.pebbling.extraction import extract_strategies
from app.modules.pebbling.graph import build_graph
from app.modules.pebbling.lp_writer import emit_lp, write_lp
from app.modules.pebbling.milp_model import ModelParams, Variant, build_model, model_stats, sanitize
from app.modules.pebbling.solution_parser import load_solution, parse_solution
from app.modules.pebbling.strategy import covering_bound


@pytest.fixture
def k2_model():
    return build_model(catalog("complete_2"), "v1", ModelParams(T=1, ell=2))


@pytest.fixture
def square_sts_model(square2):
    return build_model(square2, "(v1,v1)", ModelParams(T=2, ell=2, variant=Variant.STS))


# ---------------------- Model building ---------------------- #


def test_single_edge_model_counts(k2_model) -> None:
    stats = model_stats(k2_model)
    assert (stats.variable_count, stats.binary_count, stats.continuous_count) == (6, 4, 2)
    assert stats.per_family == {"inflow": 2, "rootchild": 1, "link": 2, "rootout": 1, "cover": 1}
    assert stats.constraint_count == 7
    assert stats.formula_variables == 6
    assert stats.formula_constraints == 11


def test_lemke_square_ts_size() -> None:
    stats = model_stats(build_model(catalog("lemke-square"), "(v1,v1)", ModelParams(T=10, ell=16)))
    assert stats.variable_count == 5440
    assert stats.binary_count == 4800
    assert stats.continuous_count == 640
    assert stats.formula_variables == 5440
    assert stats.constraint_count == 5443
    assert stats.formula_constraints == 9674
    assert stats.explanation()[-1].endswith("= 9674 (delta -4231)")


def test_lemke_square_sts_halves_variables() -> None:
    model = build_model(catalog("lemke-square"), "(v1,v1)", ModelParams(T=10, ell=16, variant=Variant.STS))
    assert len(model.variables) == 2720


def test_model_parameter_checks(square2, lemke) -> None:
    with pytest.raises(ModelError, match="even T"):
        ModelParams(T=3, variant=Variant.STS)
    with pytest.raises(ModelError):
        ModelParams(T=0)
    with pytest.raises(ModelError, match="not a product"):
        build_model(lemke, "v1", ModelParams(T=2, variant=Variant.STS))
    with pytest.raises(ModelError, match="diagonal"):
        build_model(square2, "(v1,v2)", ModelParams(T=2, variant=Variant.STS))


def test_sanitize_and_collisions() -> None:
    assert sanitize("(v1,v2)") == "v1_v2"
    assert sanitize("((a,b),c)") == "a_b_c"
    g = build_graph("clash", ["a-b", "a_b"], [("a-b", "a_b")])
    with pytest.raises(ModelError, match="collide"):
        build_model(g, "a-b", ModelParams(T=1))


def test_double_rows_skip_root_arcs(path3) -> None:
    model = build_model(path3, "v1", ModelParams(T=1, ell=3))
    doubles = [c for c in model.constraints if c.family == "double"]
    assert [c.name for c in doubles] == ["double_1_v2_v3", "double_1_v3_v2"]
    assert doubles[0].terms == ((1, "z_1_v2"), (-2, "z_1_v3"), (-8, "x_1_v2_v3"))
    assert doubles[0].rhs == -8


def test_sts_cover_counts_mirrors(square_sts_model) -> None:
    cover = {c.name: c for c in square_sts_model.constraints if c.family == "cover"}
    assert cover["cover_v1_v2"].terms == ((1, "z_1_v1_v2"), (1, "z_1_v2_v1"))
    assert cover["cover_v2_v2"].terms == ((2, "z_1_v2_v2"),)
    assert all(coef == 2 for coef, _ in square_sts_model.objective)


# ---------------------- LP text ---------------------- #


def test_emit_lp_single_edge(k2_model) -> None:
    text = emit_lp(k2_model)
    lines = text.splitlines()
    assert lines[0] == "\\ pebbling tree strategies: graph complete_2 root v1"
    assert lines[2] == "Minimize"
    assert " obj: z_1_v1 + z_1_v2" in lines
    assert " inflow_1_v1: x_1_v2_v1 - y_1_v1 = 0" in lines
    assert " link_1_v2: z_1_v2 - 2 y_1_v2 <= 0" in lines
    assert " cover_v2: z_1_v2 >= 1" in lines
    assert " z_1_v1 >= 0" in lines
    assert lines[-1] == "End"
    assert lines.index("Subject To") < lines.index("Bounds") < lines.index("Binaries")
    assert emit_lp(k2_model) == text


def test_emit_lp_wraps_long_rows(tmp_path) -> None:
    model = build_model(catalog("complete_4"), "v1", ModelParams(T=10, ell=4))
    path = write_lp(model, tmp_path / "k4.lp")
    text = path.read_text()
    start = text.index(" cover_v2:")
    row = text[start : text.index("\n cover_v3:")]
    assert row.count("\n") == 1
    assert row.rstrip().endswith(">= 10")


# ---------------------- Solutions ---------------------- #


K2_SOLUTION = "x_1_v1_v2 1\ny_1_v2 1\nz_1_v2 1\n"


def test_parse_plain_solution(k2_model) -> None:
    sol = parse_solution("status optimal\nobjective 1\n" + K2_SOLUTION, k2_model)
    assert sol.status == "optimal"
    assert sol.objective_value == 1
    assert sol.is_one("y_1_v2")
    assert sol.value("z_1_v1") == 0


def test_parse_gurobi_solution(k2_model) -> None:
    sol = parse_solution("# Solution for model obj\n# Objective value = 1\n" + K2_SOLUTION, k2_model)
    assert sol.objective_value == 1
    assert sol.is_one("x_1_v1_v2")


def test_parse_cbc_solution(k2_model) -> None:
    text = (
        "Optimal - objective value 1.00000000\n"
        "      0 x_1_v1_v2               1                       0\n"
        "      3 y_1_v2                  1                       0\n"
        "      5 z_1_v2                  1                       1\n"
        "      0 cover_v2                1                       0\n"
    )
    sol = parse_solution(text, k2_model)
    assert sol.status == "optimal"
    assert sol.is_one("y_1_v2")
    assert "cover_v2" not in sol.values


def test_binary_snapping(k2_model) -> None:
    sol = parse_solution("y_1_v2 0.8\nx_1_v1_v2 1e-9\n", k2_model)
    assert sol.is_one("y_1_v2")
    assert sol.value("x_1_v1_v2") == 0
    with pytest.raises(SolutionError, match="not within"):
        parse_solution("y_1_v2 0.6\n", k2_model)


@pytest.mark.parametrize(
    "text, message",
    [
        ("q_1 1\n", "unknown variable"),
        ("z_1_v2 abc\n", "not a number"),
        ("z_1_v2 1 extra words\n", "expected 'name value'"),
    ],
)
def test_malformed_solutions(k2_model, text: str, message: str) -> None:
    with pytest.raises(SolutionError, match=message):
        parse_solution(text, k2_model)


def test_missing_solution_file(k2_model, tmp_path) -> None:
    with pytest.raises(SolutionError, match="not found"):
        load_solution(tmp_path / "nope.sol", k2_model)


# ---------------------- Extraction ---------------------- #


def test_extract_single_edge(k2_model) -> None:
    bundle = extract_strategies(k2_model, parse_solution(K2_SOLUTION, k2_model))
    assert len(bundle) == 1
    assert covering_bound(bundle).bound == 2


def test_extract_symmetric_square(square_sts_model) -> None:
    text = (
        "x_1_v1_v1_v1_v2 1\n"
        "x_1_v1_v2_v2_v2 1\n"
        "y_1_v1_v2 1\n"
        "y_1_v2_v2 1\n"
        "z_1_v1_v2 2\n"
        "z_1_v2_v2 1\n"
    )
    bundle = extract_strategies(square_sts_model, parse_solution(text, square_sts_model))
    assert len(bundle) == 2
    report = covering_bound(bundle)
    assert report.total_weight == 6
    assert report.bound == 4


def test_extract_drops_zero_weight_members() -> None:
    model = build_model(catalog("path_3"), "v1", ModelParams(T=1, ell=3))
    text = "x_1_v1_v2 1\nx_1_v2_v3 1\ny_1_v2 1\ny_1_v3 1\nz_1_v2 2\nz_1_v3 0\n"
    with pytest.raises(ExtractionError, match="cover"):
        extract_strategies(model, parse_solution(text, model))


@pytest.mark.parametrize(
    "text, message",
    [
        ("y_1_v2 1\nz_1_v2 1\n", "inflow"),
        ("x_1_v2_v1 1\ny_1_v1 1\n", "rootout"),
        ("x_1_v1_v2 1\ny_1_v2 1\nz_1_v2 3\n", "link"),
        ("status infeasible\n", "infeasible"),
    ],
)
def test_extraction_failures_name_the_constraint(k2_model, text: str, message: str) -> None:
    with pytest.raises(ExtractionError, match=message):
        extract_strategies(k2_model, parse_solution(text, k2_model))


def test_extraction_rounds_solver_noise(k2_model) -> None:
    bundle = extract_strategies(k2_model, parse_solution("x_1_v1_v2 1\ny_1_v2 1\nz_1_v2 0.99999\n", k2_model))
    assert bundle.strategies[0].weight_of("v2") == 1
