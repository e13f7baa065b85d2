import pytest

from app.modules.pebbling.catalog import catalog
from app.modules.pebbling.errors import BudgetExceededError, ConfigurationError
from app.modules.pebbling.oracle import (
    Configuration,
    PebblingOracle,
    is_solvable,
    max_unsolvable,
    parse_configuration_text,
    pebbling_number,
    rooted_pebbling_number,
    unsolvable_configurations,
)


@pytest.mark.parametrize(
    "key, expected",
    [
        ("complete_2", 2),
        ("complete_4", 4),
        ("path_3", 4),
        ("path_4", 8),
        ("cycle_5", 5),
        ("cycle_6", 8),
        ("hypercube_2", 4),
        ("hypercube_3", 8),
    ],
)
def test_pebbling_numbers(key: str, expected: int) -> None:
    assert pebbling_number(catalog(key)) == expected


@pytest.mark.slow
def test_lemke_every_root_is_eight(lemke) -> None:
    reports = PebblingOracle().reports(lemke)
    assert [rep.root for rep in reports] == list(lemke.vertices)
    assert all(rep.rooted_pebbling_number == 8 for rep in reports)


def test_single_edge() -> None:
    rep = max_unsolvable(catalog("complete_2"), "v1")
    assert rep.max_unsolvable_size == 1
    assert rep.witness == Configuration.from_counts({"v2": 1})


def test_path_endpoint_witness(path3) -> None:
    rep = max_unsolvable(path3, "v1")
    assert rep.rooted_pebbling_number == 4
    assert rep.witness.counts == {"v3": 3}
    assert rooted_pebbling_number(path3, "v2") == 2


def test_is_solvable(path3) -> None:
    assert is_solvable(path3, "v1", Configuration.from_counts({"v3": 4}))
    assert not is_solvable(path3, "v1", Configuration.from_counts({"v3": 3}))
    assert is_solvable(path3, "v1", Configuration.from_counts({"v1": 1}))
    assert not is_solvable(path3, "v1", Configuration())


def test_unsolvable_configurations(path3) -> None:
    found = unsolvable_configurations(path3, "v1", 3)
    assert len(found) == 6
    assert Configuration.from_counts({"v3": 3}) in found
    assert all(not is_solvable(path3, "v1", c) for c in found)
    assert max(c.size for c in found) == 3


def test_budget_refusal_up_front() -> None:
    with pytest.raises(BudgetExceededError, match="exceed"):
        PebblingOracle().max_unsolvable(catalog("bruhat4"), "v1")
    with pytest.raises(BudgetExceededError):
        PebblingOracle(budget=10).max_unsolvable(catalog("lemke"), "v1")


def test_size_cap_too_small() -> None:
    with pytest.raises(BudgetExceededError, match="size cap too small"):
        PebblingOracle().max_unsolvable(catalog("path_4"), "v1", size_cap=3)


def test_parallel_reports_match_serial() -> None:
    g = catalog("cycle_5")
    serial = PebblingOracle(n_jobs=1).reports(g)
    parallel = PebblingOracle(n_jobs=2).reports(g)
    assert [r.rooted_pebbling_number for r in parallel] == [r.rooted_pebbling_number for r in serial]
    assert [r.root for r in parallel] == list(g.vertices)


def test_configuration_validation(path3) -> None:
    with pytest.raises(ConfigurationError):
        Configuration.from_counts({"v1": -1})
    with pytest.raises(ConfigurationError, match="unknown vertex"):
        Configuration.from_counts({"v9": 1}).as_vector(path3)
    c = Configuration.from_counts({"v2": 0, "v3": 2})
    assert c.counts == {"v3": 2}
    assert c.size == 2


def test_configuration_text(path3) -> None:
    c = Configuration.from_counts({"v3": 2, "v2": 1})
    text = c.to_text(path3)
    assert text == "config\np v2 1\np v3 2\nend\n"
    assert parse_configuration_text(text).counts == {"v2": 1, "v3": 2}
    with pytest.raises(ConfigurationError):
        parse_configuration_text("config\np v2 x\nend\n")
