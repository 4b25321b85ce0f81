import numpy as np
import pytest

from skystream import (DDRule, Repository, RepositoryIndex, StreamObject,
                       build_lattice, impute_object, rank_lattice, select_dd)
from skystream.dd import (FALLBACK, fallback_impute, impute_attribute,
                          impute_attribute_scan)


def rule(dets, dep, eps):
    return DDRule(frozenset(dets), dep, tuple(sorted(eps.items())))


@pytest.fixture
def repo5(small_repo):
    return small_repo


def test_lattice_has_all_rule_combinations():
    rules = [rule({0}, 3, {0: 10.0, 3: 2.0}), rule({1, 2}, 3, {1: 1.0, 2: 1.0, 3: 2.0})]
    lattice = build_lattice(rules)
    assert len(lattice.nodes) == 4  # empty node + 2 singles + 1 combination
    combined = next(n for n in lattice.nodes if n.level == 2)
    assert combined.determinants == {0, 1, 2}


def test_lattice_intersection_takes_min_eps():
    rules = [rule({0}, 3, {0: 10.0, 3: 2.0}), rule({0, 1}, 3, {0: 4.0, 1: 1.0, 3: 2.0})]
    lattice = build_lattice(rules)
    combined = next(n for n in lattice.nodes if n.level == 2)
    assert combined.eps_of(0) == 4.0
    assert combined.eps_of(1) == 1.0


def test_lattice_rejects_mixed_dependents():
    with pytest.raises(ValueError):
        build_lattice([rule({0}, 3, {0: 1.0, 3: 1.0}),
                       rule({0}, 2, {0: 1.0, 2: 1.0})])


def test_worked_example_imputation(repo5):
    # A -> D within (10, 2): matches the 60 and 70 samples, D in {1, 2}
    rules = [rule({0}, 3, {0: 10.0, 3: 2.0})]
    lattice = rank_lattice(build_lattice(rules), repo5)
    index = RepositoryIndex(repo5, dependent=3, dims=[0], u=5.0)
    obj = StreamObject("o5", 6, 11, (70.0, 2.0, 2.0, None))
    imputed = impute_object(obj, {3: lattice}, {3: index}, repo5)
    support = {i.attrs[3]: i.p for i in imputed.instances}
    assert support == {1.0: pytest.approx(0.5), 2.0: pytest.approx(0.5)}
    assert all(i.attrs[:3] == (70.0, 2.0, 2.0) for i in imputed.instances)


def test_select_dd_skips_nodes_with_missing_determinants(repo5):
    rules = [rule({0}, 3, {0: 10.0, 3: 2.0}), rule({2}, 3, {2: 0.5, 3: 2.0})]
    lattice = rank_lattice(build_lattice(rules), repo5)
    index = RepositoryIndex(repo5, dependent=3, dims=[0, 2], u=5.0)
    # attribute C is itself missing, so any node using C must be skipped
    obj = StreamObject("x", 0, 5, (70.0, 2.0, None, None))
    node = select_dd(lattice, obj, index)
    assert node.determinants == {0}


def test_select_dd_falls_back_when_nothing_matches(repo5):
    rules = [rule({0}, 3, {0: 0.5, 3: 2.0})]
    lattice = rank_lattice(build_lattice(rules), repo5)
    index = RepositoryIndex(repo5, dependent=3, dims=[0], u=5.0)
    obj = StreamObject("x", 0, 5, (400.0, 2.0, 2.0, None))
    node = select_dd(lattice, obj, index)
    assert node is FALLBACK


def test_fallback_is_column_distribution(repo5):
    dist = fallback_impute(3, repo5)
    support = dict(dist.support)
    assert support == {1.0: pytest.approx(0.25), 2.0: pytest.approx(0.5),
                       3.0: pytest.approx(0.25)}


def test_complete_object_bypasses_imputation(repo5):
    obj = StreamObject("c", 0, 5, (1.0, 2.0, 3.0, 4.0))
    imputed = impute_object(obj, {}, {}, repo5)
    assert len(imputed.instances) == 1
    assert imputed.instances[0].attrs == (1.0, 2.0, 3.0, 4.0)
    assert imputed.instances[0].p == 1.0


def test_instance_cap_keeps_top_probabilities_and_renormalizes():
    rng = np.random.default_rng(5)
    rows = np.column_stack([
        np.full(90, 5.0),
        rng.integers(0, 9, 90).astype(float),
        rng.integers(0, 9, 90).astype(float),
        np.full(90, 1.0),
    ])
    repo = Repository(rows)
    rules_b = [rule({0}, 1, {0: 1.0, 1: 20.0})]
    rules_c = [rule({0}, 2, {0: 1.0, 2: 20.0})]
    lattices = {1: rank_lattice(build_lattice(rules_b), repo),
                2: rank_lattice(build_lattice(rules_c), repo)}
    indexes = {1: RepositoryIndex(repo, 1, [0], u=1.0),
               2: RepositoryIndex(repo, 2, [0], u=1.0)}
    obj = StreamObject("x", 0, 5, (5.0, None, None, 1.0))
    imputed = impute_object(obj, lattices, indexes, repo)
    assert len(imputed.instances) <= 64
    assert sum(i.p for i in imputed.instances) == pytest.approx(1.0, abs=1e-9)


def test_index_backed_imputation_matches_full_scan():
    rng = np.random.default_rng(17)
    for _ in range(40):
        n = int(rng.integers(20, 120))
        rows = rng.uniform(0, 10, (n, 3)).round(1)
        repo = Repository(rows)
        eps0 = float(rng.uniform(0.3, 3.0))
        r = rule({0}, 2, {0: eps0, 2: 5.0})
        lattice = rank_lattice(build_lattice([r]), repo)
        index = RepositoryIndex(repo, 2, [0], u=float(rng.uniform(0.2, 4.0)))
        obj = StreamObject("x", 0, 5, (float(rng.uniform(0, 10)), 1.0, None))
        node = select_dd(lattice, obj, index)
        if node is FALLBACK:
            continue
        fast = impute_attribute(obj, node, index)
        slow = impute_attribute_scan(obj, node, repo, 2)
        assert fast.support == slow.support
