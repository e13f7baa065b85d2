from pathlib import Path

import pytest

from app.modules.pebbling.certificate_io import (
    convert_certificate,
    format_certificate,
    load_certificate,
    parse_certificate,
    write_certificate,
)
from app.modules.pebbling.dot_export import bundle_to_dot, strategy_to_dot, write_dot_files
from app.modules.pebbling.dyadic import DyadicRational
from app.modules.pebbling.errors import CertificateError
from app.modules.pebbling.strategy import CertificateBundle, TreeStrategy, covering_bound


def tampered_bruhat(path: Path) -> str:
    # doubles a leaf under a weight-2 parent
    return path.read_text().replace("edge v14 v16 1/1", "edge v14 v16 2/1", 1)


def test_bruhat_fixture(bruhat_cert: Path) -> None:
    bundle = load_certificate(bruhat_cert)
    assert bundle.root == "v1"
    assert bundle.graph.name == "bruhat4"
    assert [len(s.edges) for s in bundle.strategies] == [9, 10, 7, 6, 6, 7]
    report = covering_bound(bundle)
    assert report.K == 6
    assert report.total_weight == 396
    assert report.bound == 67
    assert bundle.claimed_bound == 67


def test_tampered_bruhat_is_rejected(bruhat_cert: Path) -> None:
    bundle = parse_certificate(tampered_bruhat(bruhat_cert))
    verdicts = bundle.verdicts()
    assert "doubling" in verdicts[0].kinds
    with pytest.raises(CertificateError, match="strategy 1"):
        covering_bound(bundle)


def test_lemke_square_conversion(lemke_square_dec_cert: Path, tmp_path: Path) -> None:
    result = convert_certificate(lemke_square_dec_cert.read_text(), 6, base_dir=lemke_square_dec_cert.parent)
    assert result.graph_source == "lemke-square"
    assert len(result.bundle) == 20
    assert result.adjustments  # two-decimal prints such as 1.88 are not dyadic
    report = covering_bound(result.bundle)
    assert report.root == "(v1,v1)"
    assert report.bound == 96

    exact = write_certificate(result.bundle, tmp_path / "lemke_square.cert", graph_source=result.graph_source)
    reloaded = load_certificate(exact)
    assert reloaded == result.bundle
    assert covering_bound(reloaded).bound == 96


def test_conversion_is_idempotent_on_exact_text(lemke_square_dec_cert: Path) -> None:
    bundle = convert_certificate(lemke_square_dec_cert.read_text(), 6).bundle
    text = format_certificate(bundle, "lemke-square")
    again = convert_certificate(text, 6)
    assert again.bundle == bundle
    assert again.adjustments == []


def test_conversion_itemizes_failures() -> None:
    text = "\n".join(
        [
            "certificate decimal",
            "graph path_3",
            "root v1",
            "trees 2",
            "tree 1",
            "weight v2 -1",
            "endtree",
            "tree 2",
            "edge v1 v2 1.00",
            "edge v2 v3 1.00",
            "endtree",
            "end",
        ]
    )
    with pytest.raises(CertificateError) as info:
        convert_certificate(text)
    message = str(info.value)
    assert "tree 1: weights must be nonnegative" in message
    assert "tree 2: doubling" in message


def test_decimal_rounding_reaches_the_bundle() -> None:
    text = "certificate decimal\ngraph path_2\nroot v1\ntrees 1\ntree 1\nedge v1 v2 10.12\nendtree\nend\n"
    result = convert_certificate(text, max_exponent=4)
    assert result.bundle.strategies[0].weight_of("v2") == DyadicRational(81, 3)
    assert result.adjustments == ["tree 1 v2: 10.12 -> 81/8"]


@pytest.mark.parametrize(
    "text, message",
    [
        ("", "empty"),
        ("certificate v2\ngraph path_2\nroot v1\ntrees 0\nend\n", "unknown certificate header"),
        ("certificate v1\ngraph path_2\nroot v1\ntrees 2\ntree 1\nedge v1 v2 1\nendtree\nend\n", "declares 2 trees"),
        ("certificate v1\ngraph path_2\nroot v1\ntrees 1\ntree 1\nedge v1 v2 1\n", "truncated"),
        ("certificate v1\ngraph path_2\nroot v1\ntrees 1\ntree 2\nendtree\nend\n", "expected tree 1"),
        ("certificate v1\ngraph path_2\nroot v1\ntrees 1\ntree 1\nedge v1 v2 0.5\nendtree\nend\n", "exact dyadic"),
    ],
)
def test_malformed_certificates(text: str, message: str) -> None:
    with pytest.raises(CertificateError, match=message):
        parse_certificate(text)


def test_decimal_certificate_needs_conversion(lemke_square_dec_cert: Path) -> None:
    with pytest.raises(CertificateError, match="convert"):
        load_certificate(lemke_square_dec_cert)


def test_graph_file_relative_to_certificate(tmp_path: Path) -> None:
    (tmp_path / "edge.graph").write_text("graph edge\nv a\nv b\ne a b\nend\n")
    (tmp_path / "edge.cert").write_text(
        "certificate v1\ngraph edge.graph\nroot a\ntrees 1\ntree 1\nedge a b 1\nendtree\nend\n"
    )
    bundle = load_certificate(tmp_path / "edge.cert")
    assert bundle.graph.name == "edge"
    assert covering_bound(bundle).bound == 2


def test_dot_single_edge(path3) -> None:
    s = TreeStrategy.from_edges(path3, "v1", [("v1", "v2", 1)])
    text = strategy_to_dot(s, "t")
    assert text.startswith('digraph "t" {')
    assert '"v1" -> "v2";' in text
    assert '"v2" [label="v2\\n1"];' in text
    assert "doublecircle" in text


def test_dot_refuses_invalid_bundles(bruhat_cert: Path) -> None:
    with pytest.raises(CertificateError):
        bundle_to_dot(parse_certificate(tampered_bruhat(bruhat_cert)))


def test_dot_files_for_bruhat(bruhat_cert: Path, tmp_path: Path) -> None:
    paths = write_dot_files(load_certificate(bruhat_cert), tmp_path, stem="bruhat4")
    assert [p.name for p in paths] == [f"bruhat4_{t}.dot" for t in range(1, 7)]
    assert all(p.read_text().count("->") == n for p, n in zip(paths, [9, 10, 7, 6, 6, 7]))


def test_dot_is_deterministic(path3_bundle: CertificateBundle) -> None:
    assert bundle_to_dot(path3_bundle) == bundle_to_dot(path3_bundle)


def test_halved_leaf_stays_valid_but_moves_the_bound(bruhat_cert: Path) -> None:
    bundle = parse_certificate(bruhat_cert.read_text().replace("edge v20 v19 2/1", "edge v20 v19 1/1", 1))
    assert all(v.ok for v in bundle.verdicts())
    assert bundle.claimed_bound == 67
    assert covering_bound(bundle).bound == 80


def test_written_certificate_records_its_bound(path3_bundle, tmp_path: Path) -> None:
    text = format_certificate(path3_bundle)
    assert text.splitlines()[4] == "bound 4"
    path = write_certificate(path3_bundle, tmp_path / "p3.cert")
    assert load_certificate(path).claimed_bound == 4


def test_bound_line_must_be_an_integer() -> None:
    text = "certificate v1\ngraph path_2\nroot v1\ntrees 1\nbound many\ntree 1\nedge v1 v2 1\nendtree\nend\n"
    with pytest.raises(CertificateError, match="bound <integer>"):
        parse_certificate(text)


FINE_PATH = "certificate v1\ngraph path_3\nroot v1\ntrees 1\ntree 1\nedge v1 v2 1/2\nedge v2 v3 1/128\nendtree\nend\n"


def test_exact_weights_finer_than_max_exponent_pass_through() -> None:
    assert covering_bound(parse_certificate(FINE_PATH)).bound == 66
    result = convert_certificate(FINE_PATH, 6)
    assert result.adjustments == []
    assert result.bundle.strategies[0].weight_of("v3") == DyadicRational(1, 7)
    assert covering_bound(result.bundle).bound == 66


def test_dyadic_decimal_is_not_rounded() -> None:
    text = "certificate decimal\ngraph path_3\nroot v1\ntrees 1\ntree 1\nweight v2 0.5\nweight v3 0.0078125\nendtree\nend\n"
    result = convert_certificate(text, 6)
    assert result.adjustments == []
    assert result.bundle.strategies[0].weight_of("v3") == DyadicRational(1, 7)


def test_conversion_checks_the_recorded_bound() -> None:
    text = "certificate decimal\ngraph path_3\nroot v1\ntrees 1\nbound 5\ntree 1\nedge v1 v2 2.00\nedge v2 v3 1.00\nendtree\nend\n"
    with pytest.raises(CertificateError, match="claims bound pi <= 5"):
        convert_certificate(text)
    assert convert_certificate(text.replace("bound 5", "bound 4")).bundle.claimed_bound == 4
