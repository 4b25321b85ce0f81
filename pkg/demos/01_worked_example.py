"""Walk through the small worked example: eight objects, four attributes.

Shows possible-world enumeration, dominance and skyline probabilities, the
answer set at t=6, and the skyline tree at t=8.
"""
from skystream import (Engine, Instance, ProbabilisticObject, QueryConfig,
                       brute_skyline_probability, dominance_probability,
                       enumerate_worlds)


def prob(id, arr, exp, pairs):
    return ProbabilisticObject(id, arr, exp,
                               tuple(Instance(tuple(map(float, v)), p)
                                     for v, p in pairs))


STREAM = [
    prob("o1", 1, 6, [((100, 3, 3, 3), 1.0)]),
    prob("o2", 2, 6, [((50, 1, 1, 1), 1.0)]),
    prob("o3", 3, 9, [((90, 2, 2, 3), 0.4), ((90, 2, 3, 3), 0.6)]),
    prob("o4", 3, 9, [((60, 1, 1, 1), 0.56), ((60, 1, 1, 2), 0.24),
                      ((60, 2, 1, 1), 0.14), ((60, 2, 1, 2), 0.06)]),
    prob("o5", 6, 11, [((70, 2, 2, 2), 1.0)]),
    prob("o6", 6, 10, [((90, 2, 3, 2), 0.6), ((80, 2, 3, 2), 0.4)]),
    prob("o1b", 7, 12, [((80, 2, 2, 2), 1.0)]),
    prob("o2b", 8, 12, [((90, 1, 3, 3), 1.0)]),
]


def main():
    window6 = [o for o in STREAM if o.arr <= 6 < o.exp]
    print(f"live objects at t=6: {[o.id for o in window6]}")
    worlds = enumerate_worlds(window6)
    print(f"possible worlds: {len(worlds)} (probabilities sum to "
          f"{sum(p for _, p in worlds):.6f})")
    objs = {o.id: o for o in window6}
    print(f"Pr{{o3 dominates o6}} = {dominance_probability(objs['o3'], objs['o6']):.3f}")
    for oid in ("o3", "o4", "o5", "o6"):
        p = brute_skyline_probability(objs[oid], window6)
        print(f"skyline probability of {oid} at t=6: {p:.4f}")

    engine = Engine(QueryConfig(alpha=0.45, d=4))
    by_tick = {}
    for o in STREAM:
        by_tick.setdefault(o.arr, []).append(o)
    for t in range(1, 9):
        answers, stats = engine.process_tick(by_tick.get(t, []), t)
        print(f"t={t}: answers={sorted(answers.ids)} "
              f"(layer 1 holds {stats.layer1} of {stats.window} live objects)")
    print("\nskyline tree at t=8:")
    print(engine.tree.dump())


if __name__ == "__main__":
    main()
