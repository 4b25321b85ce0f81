import numpy as np
import pytest

from skystream import (Engine, QueryConfig, StreamObject, brute_answer_set,
                       brute_skyline_probability, skyline_probability)
from skystream.engine import WindowMatrix, lb_skyline_probability
from skystream.model import Window

from conftest import imputed_stream, random_prob_object


def replay_engine(stream, until_t, alpha, d=4):
    engine = Engine(QueryConfig(alpha=alpha, d=d))
    by_tick = {}
    for o in stream:
        by_tick.setdefault(o.arr, []).append(o)
    answers, stats = {}, {}
    for t in range(1, until_t + 1):
        answers[t], stats[t] = engine.process_tick(by_tick.get(t, []), t)
    return engine, answers, stats


def test_worked_example_answers_at_t6():
    engine, answers, _ = replay_engine(imputed_stream(), 6, alpha=0.45)
    assert answers[6].ids == {"o3"}
    assert answers[6].members["o3"] == pytest.approx(1.0, abs=1e-9)
    window = list(engine.window)
    objs = {o.id: o for o in window}
    assert skyline_probability(objs["o3"], engine.window) == pytest.approx(1.0, abs=1e-9)
    assert skyline_probability(objs["o6"], engine.window) == pytest.approx(0.4, abs=1e-9)


def test_window_retains_pruned_objects():
    engine, _, _ = replay_engine(imputed_stream(), 6, alpha=0.45)
    ids = {o.id for o in engine.window}
    assert ids == {"o3", "o4", "o5", "o6"}  # o4 pruned from the tree, not the window
    assert "o4" not in engine.tree.nodes


def test_no_update_tick_reuses_previous_answers():
    engine, answers, _ = replay_engine(imputed_stream(), 6, alpha=0.45)
    prev = dict(answers[6].members)
    # nothing arrives and nothing expires before t=7 in this variant
    ans, stats = engine.process_tick([], 7)
    assert ans.members == prev
    assert stats.arrivals == 0


def test_deletions_only_tick_carries_survivors():
    stream = imputed_stream()
    engine, answers, _ = replay_engine(stream, 8, alpha=0.45)
    assert "o3" in answers[8].ids
    ans, _ = engine.process_tick([], 9)  # o3 and o4 expire, nothing arrives
    assert "o3" not in ans.ids
    assert ans.ids <= {o.id for o in engine.tree.first_layer()}


def test_rejects_malformed_arrivals_and_continues():
    engine = Engine(QueryConfig(alpha=0.5, d=2))
    bad_time = StreamObject("late", 3, 9, (1.0, 1.0))
    bad_width = StreamObject("wide", 1, 9, (1.0, 1.0, 1.0))
    good = StreamObject("ok", 1, 9, (2.0, 2.0))
    ans, stats = engine.process_tick([bad_time, bad_width, good], 1)
    assert stats.rejected == 2
    assert len(engine.diagnostics) == 2
    assert ans.ids == {"ok"}


def test_incomplete_arrival_without_repository_is_rejected():
    engine = Engine(QueryConfig(alpha=0.5, d=2))
    ans, stats = engine.process_tick([StreamObject("m", 1, 5, (1.0, None))], 1)
    assert stats.rejected == 1
    assert ans.ids == set()


def test_lower_bound_is_sound():
    rng = np.random.default_rng(3)
    for _ in range(40):
        objects = [random_prob_object(rng, f"b{i}", exp=int(rng.integers(1, 9)))
                   for i in range(int(rng.integers(2, 7)))]
        window = Window()
        for o in objects:
            window.add(o)
        matrix = WindowMatrix(window)
        for o in objects:
            lb = lb_skyline_probability(o, window, matrix)
            exact = skyline_probability(o, window, matrix)
            assert lb <= exact + 1e-12


def _random_engine_stream(rng, n=12, d=3):
    stream = []
    for i in range(n):
        arr = int(rng.integers(1, 8))
        exp = arr + int(rng.integers(1, 6))
        stream.append(random_prob_object(rng, f"e{i}", arr=arr, exp=exp, d=d,
                                         max_inst=3, lo=0, hi=4))
    return stream


def test_engine_answers_match_oracle_on_random_streams():
    rng = np.random.default_rng(90)
    for trial in range(30):
        alpha = float(rng.choice([0.3, 0.5, 0.7]))
        d = int(rng.integers(2, 4))
        stream = _random_engine_stream(rng, d=d)
        engine = Engine(QueryConfig(alpha=alpha, d=d))
        by_tick = {}
        for o in stream:
            by_tick.setdefault(o.arr, []).append(o)
        horizon = max(o.exp for o in stream)
        pruned_ids = set()
        for t in range(1, horizon + 1):
            ans, stats = engine.process_tick(by_tick.get(t, []), t)
            live = [o for o in stream if o.arr <= t < o.exp]
            assert ans.ids == brute_answer_set(live, alpha), f"trial {trial} t={t}"
            in_tree = set(engine.tree.nodes)
            pruned_ids |= {o.id for o in by_tick.get(t, [])} - in_tree
            assert not (ans.ids & (pruned_ids - in_tree) - in_tree)


def test_answer_probabilities_match_oracle_for_members():
    rng = np.random.default_rng(14)
    stream = _random_engine_stream(rng, n=10, d=2)
    engine = Engine(QueryConfig(alpha=0.01, d=2))
    by_tick = {}
    for o in stream:
        by_tick.setdefault(o.arr, []).append(o)
    for t in range(1, max(o.exp for o in stream) + 1):
        _, _ = engine.process_tick(by_tick.get(t, []), t)
        live = [o for o in stream if o.arr <= t < o.exp]
        for o in live:
            exact = skyline_probability(o, engine.window)
            brute = brute_skyline_probability(o, live)
            assert exact == pytest.approx(brute, abs=1e-9)
