"""Shared fixtures: the worked-example stream and small random generators."""
from __future__ import annotations

import numpy as np
import pytest

from skystream import Instance, ProbabilisticObject, Repository, StreamObject


def raw_stream() -> list[StreamObject]:
    """The eight-object example stream (d=4, larger is better, '-' missing)."""
    rows = [
        ("o1", 1, 6, (100, 3, 3, 3)),
        ("o2", 2, 6, (50, 1, 1, 1)),
        ("o3", 3, 9, (90, 2, None, 3)),
        ("o4", 3, 9, (60, None, 1, None)),
        ("o5", 6, 11, (70, 2, 2, None)),
        ("o6", 6, 10, (None, 2, 3, 2)),
        ("o1b", 7, 12, (80, 2, 2, 2)),
        ("o2b", 8, 12, (90, 1, 3, 3)),
    ]
    return [StreamObject(i, a, e, tuple(attrs)) for i, a, e, attrs in rows]


def _prob(id, arr, exp, pairs) -> ProbabilisticObject:
    return ProbabilisticObject(id, arr, exp,
                               tuple(Instance(tuple(map(float, v)), p)
                                     for v, p in pairs))


def imputed_stream() -> list[ProbabilisticObject]:
    """The example stream with its published imputed instance sets."""
    return [
        _prob("o1", 1, 6, [((100, 3, 3, 3), 1.0)]),
        _prob("o2", 2, 6, [((50, 1, 1, 1), 1.0)]),
        _prob("o3", 3, 9, [((90, 2, 2, 3), 0.4), ((90, 2, 3, 3), 0.6)]),
        _prob("o4", 3, 9, [((60, 1, 1, 1), 0.56), ((60, 1, 1, 2), 0.24),
                           ((60, 2, 1, 1), 0.14), ((60, 2, 1, 2), 0.06)]),
        _prob("o5", 6, 11, [((70, 2, 2, 2), 1.0)]),
        _prob("o6", 6, 10, [((90, 2, 3, 2), 0.6), ((80, 2, 3, 2), 0.4)]),
        _prob("o1b", 7, 12, [((80, 2, 2, 2), 1.0)]),
        _prob("o2b", 8, 12, [((90, 1, 3, 3), 1.0)]),
    ]


def window_at_6() -> list[ProbabilisticObject]:
    """Live objects at t=6 (o1 and o2 have expired): o3, o4, o5, o6."""
    return [o for o in imputed_stream() if o.arr <= 6 < o.exp]


@pytest.fixture
def example_stream():
    return raw_stream()


@pytest.fixture
def example_imputed():
    return imputed_stream()


@pytest.fixture
def example_window_6():
    return window_at_6()


@pytest.fixture
def small_repo() -> Repository:
    """The four-sample worked-example repository."""
    return Repository(np.array([
        [90.0, 2.0, 2.0, 3.0],
        [60.0, 1.0, 1.0, 1.0],
        [70.0, 2.0, 2.0, 2.0],
        [90.0, 2.0, 3.0, 2.0],
    ]))


def random_prob_object(rng, id, arr=0, exp=10, d=3, max_inst=4,
                       lo=0.0, hi=10.0) -> ProbabilisticObject:
    """A random probabilistic object with up to max_inst instances."""
    k = int(rng.integers(1, max_inst + 1))
    weights = rng.random(k) + 0.05
    weights /= weights.sum()
    pairs = []
    for w in weights:
        attrs = tuple(float(v) for v in rng.uniform(lo, hi, d).round(1))
        pairs.append((attrs, float(w)))
    return ProbabilisticObject.from_pairs(id, arr, exp, pairs)


def random_window(rng, n_max=8, d_max=4, max_inst=4) -> list[ProbabilisticObject]:
    n = int(rng.integers(1, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    return [random_prob_object(rng, f"r{i}", d=d, max_inst=max_inst,
                               exp=int(rng.integers(1, 20)))
            for i in range(n)]
