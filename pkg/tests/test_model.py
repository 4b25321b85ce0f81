import math

import numpy as np
import pytest

from skystream import (Instance, ProbabilisticObject, StreamObject,
                       dominance_probability, dominates, max_corner_prune,
                       min_corner_prune, spatial_prune, weakly_dominates)
from skystream.model import Window, point_object, prob_dominates_point

from conftest import imputed_stream, random_prob_object


def test_dominates_larger_is_better():
    assert dominates((3, 3), (2, 3))
    assert dominates((3, 3), (2, 2))
    assert not dominates((3, 3), (3, 3))
    assert not dominates((2, 4), (3, 3))
    assert weakly_dominates((3, 3), (3, 3))
    assert not weakly_dominates((2, 4), (3, 3))


def test_dominates_dimension_mismatch():
    with pytest.raises(ValueError):
        dominates((1, 2), (1, 2, 3))


def test_stream_object_validation():
    with pytest.raises(ValueError):
        StreamObject("x", 5, 5, (1.0, 2.0))  # exp must exceed arr
    with pytest.raises(ValueError):
        StreamObject("x", 1, 2, (None, None))  # all attributes missing
    with pytest.raises(ValueError):
        StreamObject("x", 1, 2, (float("nan"), 1.0))
    obj = StreamObject("x", 1, 9, (1.0, None, 3.0))
    assert obj.missing == (1,)
    assert not obj.is_complete


def test_probabilistic_object_mbr_and_normalization():
    obj = ProbabilisticObject("p", 0, 5, (
        Instance((1.0, 4.0), 0.5), Instance((3.0, 2.0), 0.5)))
    assert obj.mbr_min == (1.0, 2.0)
    assert obj.mbr_max == (3.0, 4.0)
    with pytest.raises(ValueError):
        ProbabilisticObject("p", 0, 5, (Instance((1.0,), 0.4),))


def test_from_pairs_merges_duplicates():
    obj = ProbabilisticObject.from_pairs("p", 0, 5, [
        ((1.0, 2.0), 0.25), ((1.0, 2.0), 0.25), ((2.0, 1.0), 0.5)])
    assert len(obj.instances) == 2
    merged = {i.attrs: i.p for i in obj.instances}
    assert merged[(1.0, 2.0)] == pytest.approx(0.5)


def test_dominance_probability_exact():
    objs = {o.id: o for o in imputed_stream()}
    assert dominance_probability(objs["o3"], objs["o6"]) == pytest.approx(0.6)
    assert dominance_probability(objs["o6"], objs["o3"]) == pytest.approx(0.0)
    assert dominance_probability(objs["o3"], objs["o4"]) == pytest.approx(1.0)


def test_dominance_probability_matches_instance_sum():
    rng = np.random.default_rng(7)
    for _ in range(50):
        p = random_prob_object(rng, "p", d=3)
        q = random_prob_object(rng, "q", d=3)
        expected = sum(ip.p * iq.p for ip in p.instances for iq in q.instances
                       if dominates(ip.attrs, iq.attrs))
        assert dominance_probability(p, q) == pytest.approx(expected, abs=1e-12)


def test_prob_dominates_point():
    objs = {o.id: o for o in imputed_stream()}
    assert prob_dominates_point(objs["o3"], (80.0, 1.0, 2.5, 2.0)) == pytest.approx(0.6)


def test_spatial_prune_requires_corner_dominance_and_expiry():
    cand = point_object((1.0, 1.0), id="c", arr=0, exp=5)
    longer = point_object((2.0, 2.0), id="l", arr=0, exp=9)
    shorter = point_object((2.0, 2.0), id="s", arr=0, exp=3)
    assert spatial_prune(cand, longer)
    assert not spatial_prune(cand, shorter)  # must outlive the candidate
    assert not spatial_prune(longer, cand)


def test_corner_prunes():
    objs = {o.id: o for o in imputed_stream()}
    # o3 dominates o4's max corner in every instance and outlives it (tie)
    assert max_corner_prune(objs["o4"], objs["o3"], alpha=0.45)
    assert not max_corner_prune(objs["o3"], objs["o4"], alpha=0.45)
    cand = point_object((1.0, 1.0, 1.0, 1.0), id="c", arr=0, exp=5)
    assert min_corner_prune(cand, objs["o3"], alpha=0.45)


def test_window_eviction():
    w = Window()
    a = point_object((1.0,), id="a", arr=0, exp=3)
    b = point_object((2.0,), id="b", arr=0, exp=6)
    w.add(a)
    w.add(b)
    gone = w.evict(3)
    assert [o.id for o in gone] == ["a"]
    assert len(w) == 1


def test_answer_probabilities_sum_to_one_per_instance_set():
    rng = np.random.default_rng(11)
    for _ in range(20):
        obj = random_prob_object(rng, "p")
        assert math.isclose(sum(i.p for i in obj.instances), 1.0, abs_tol=1e-9)
