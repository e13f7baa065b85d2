"""
Property suites: every certificate the toolkit can produce must bound the
brute-force pebbling number from above, and the weight-function inequality
must hold on every unsolvable configuration.
"""
import random
from typing import List

import pytest

from app.modules.pebbling.catalog import catalog
from app.modules.pebbling.heuristic import heuristic_generate
from app.modules.pebbling.lp_relaxation import lp_relaxation_bound
from app.modules.pebbling.milp_model import ModelParams
from app.modules.pebbling.oracle import PebblingOracle, unsolvable_configurations
from app.modules.pebbling.strategy import (
    CertificateBundle,
    TreeStrategy,
    covering_bound,
    symmetric_mirror,
    validate_strategy,
    wfl_holds,
)

SMALL_KEYS = [
    *(f"path_{k}" for k in range(2, 7)),
    *(f"cycle_{k}" for k in range(3, 9)),
    *(f"complete_{k}" for k in range(2, 7)),
    "hypercube_2",
    "hypercube_3",
    "lemke",
    "lemke2",
    "lemke3",
    "lemke4",
    "path_2-square",
    "path_2*path_3",
]

TINY_KEYS = [key for key in SMALL_KEYS if catalog(key).n <= 6]


def random_bundles(key: str, root: str, count: int, seed: int) -> List[CertificateBundle]:
    g = catalog(key)
    rng = random.Random(seed)
    out = []
    for k in range(count):
        params = ModelParams(T=rng.randint(1, 4), ell=rng.choice([1, 2, 3, 16]))
        out.append(heuristic_generate(g, root, params, seed=k))
    return out


def check_bounds(key: str, bundles_per_root: int) -> None:
    g = catalog(key)
    oracle = PebblingOracle()
    for root in g.vertices:
        pi = oracle.rooted_pebbling_number(g, root)
        for bundle in random_bundles(key, root, bundles_per_root, seed=len(key)):
            bound = covering_bound(bundle).bound
            lp = lp_relaxation_bound(bundle)
            assert pi <= lp <= bound, (key, root, pi, lp, bound)


@pytest.mark.parametrize("key", ["path_3", "cycle_5", "complete_4", "hypercube_2"])
def test_bounds_dominate_oracle_quick(key: str) -> None:
    check_bounds(key, bundles_per_root=5)


@pytest.mark.slow
@pytest.mark.parametrize("key", SMALL_KEYS)
def test_bounds_dominate_oracle(key: str) -> None:
    check_bounds(key, bundles_per_root=20)


@pytest.mark.slow
@pytest.mark.parametrize("key", TINY_KEYS)
def test_weight_function_inequality_exhaustive(key: str) -> None:
    g = catalog(key)
    oracle = PebblingOracle()
    for root in g.vertices:
        pi = oracle.rooted_pebbling_number(g, root)
        unsolvable = unsolvable_configurations(g, root, pi - 1)
        strategies = [s for b in random_bundles(key, root, 3, seed=7) for s in b.strategies]
        for s in strategies:
            for config in unsolvable:
                assert wfl_holds(s, config), (key, root, s.edges, config)


def test_weight_function_inequality_on_path(path3_bundle) -> None:
    s = path3_bundle.strategies[0]
    for config in unsolvable_configurations(path3_bundle.graph, "v1", 3):
        assert wfl_holds(s, config)


def tampered(s: TreeStrategy) -> TreeStrategy:
    parent, child, w = s.edges[-1]
    return TreeStrategy(graph=s.graph, root=s.root, edges=s.edges[:-1] + ((parent, child, w.double()),))


@pytest.mark.slow
def test_mirror_properties_on_lemke_square() -> None:
    g = catalog("lemke-square")
    rng = random.Random(2024)
    strategies: List[TreeStrategy] = []
    while len(strategies) < 100:
        root = rng.choice(g.vertices)
        params = ModelParams(T=4, ell=rng.choice([1, 2, 3, 16]))
        bundle = heuristic_generate(g, root, params, seed=rng.randrange(10_000))
        for s in bundle.strategies:
            strategies.append(s if rng.random() < 0.5 else tampered(s))
    for s in strategies[:100]:
        m = symmetric_mirror(s)
        assert symmetric_mirror(m) == s
        assert validate_strategy(m).kinds == validate_strategy(s).kinds
