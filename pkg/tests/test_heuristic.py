import pytest

from app.modules.pebbling.catalog import catalog
from app.modules.pebbling.heuristic import heuristic_generate
from app.modules.pebbling.milp_model import ModelParams, Variant
from app.modules.pebbling.strategy import covering_bound, validate_strategy


def test_lemke_bound_from_untruncated_trees(lemke) -> None:
    bundle = heuristic_generate(lemke, "v1", ModelParams(T=4, ell=16), seed=3)
    assert len(bundle) == 4
    assert all(validate_strategy(s).ok for s in bundle.strategies)
    # every tree weighs vertices by distance alone: floor(17) + 1
    assert covering_bound(bundle).bound == 18


def test_path_endpoint(path3) -> None:
    bundle = heuristic_generate(path3, "v1", ModelParams(T=1, ell=16))
    assert covering_bound(bundle).bound == 4


def test_same_seed_same_bundle(lemke) -> None:
    params = ModelParams(T=3, ell=2)
    assert heuristic_generate(lemke, "v8", params, seed=7) == heuristic_generate(lemke, "v8", params, seed=7)


def test_shallow_trees_get_a_repair_tree() -> None:
    p4 = catalog("path_4")
    bundle = heuristic_generate(p4, "v1", ModelParams(T=2, ell=1))
    assert len(bundle) == 3
    assert bundle.strategies[-1].depth() == 3
    assert covering_bound(bundle).bound >= 8


def test_symmetric_variant_appends_mirrors(square2) -> None:
    bundle = heuristic_generate(square2, "(v1,v1)", ModelParams(T=2, ell=16, variant=Variant.STS), seed=1)
    assert len(bundle) == 2
    assert bundle.strategies[1].root == "(v1,v1)"
    # full BFS trees: floor(2 + 2 + 1) + 1
    assert covering_bound(bundle).bound == 6


@pytest.mark.parametrize("seed", range(5))
def test_bound_never_below_rooted_number(seed: int) -> None:
    c5 = catalog("cycle_5")
    bundle = heuristic_generate(c5, "v1", ModelParams(T=2, ell=2), seed=seed)
    assert covering_bound(bundle).bound >= 5
