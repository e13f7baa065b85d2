from pathlib import Path

import pytest

from app.modules.pebbling.catalog import catalog
from app.modules.pebbling.graph import Graph
from app.modules.pebbling.strategy import CertificateBundle, TreeStrategy

REPO_ROOT = Path(__file__).resolve().parents[1]
CERTIFICATES = REPO_ROOT / "certificates"


@pytest.fixture
def certificates_dir() -> Path:
    return CERTIFICATES


@pytest.fixture
def bruhat_cert() -> Path:
    return CERTIFICATES / "bruhat4_67.cert"


@pytest.fixture
def lemke_square_dec_cert() -> Path:
    return CERTIFICATES / "lemke_square_96.dec.cert"


@pytest.fixture
def path3() -> Graph:
    return catalog("path_3")


@pytest.fixture
def lemke() -> Graph:
    return catalog("lemke")


@pytest.fixture
def square2() -> Graph:
    """P2 x P2: vertices (v1,v1), (v1,v2), (v2,v1), (v2,v2)."""
    return catalog("path_2-square")


@pytest.fixture
def path3_bundle(path3: Graph) -> CertificateBundle:
    """v1 <- v2 (2) <- v3 (1): the optimal single strategy for P3 from an end."""
    s = TreeStrategy.from_edges(path3, "v1", [("v1", "v2", 2), ("v2", "v3", 1)])
    return CertificateBundle(graph=path3, root="v1", strategies=(s,))


@pytest.fixture
def square2_strategy(square2: Graph) -> TreeStrategy:
    return TreeStrategy.from_edges(
        square2, "(v1,v1)", [("(v1,v1)", "(v1,v2)", 2), ("(v1,v2)", "(v2,v2)", 1)]
    )
