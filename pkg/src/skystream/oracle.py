"""Exact possible-worlds reference implementation.

Used by tests and acceptance checks only; never on the streaming hot path.
"""
from __future__ import annotations

import itertools

from .model import ProbabilisticObject, dominates

WORLD_GUARD = 10**6


class WorldGuardExceeded(ValueError):
    """Raised when a window has too many possible worlds to enumerate."""


def _guard(objects: list[ProbabilisticObject]) -> None:
    total = 1
    for o in objects:
        total *= len(o.instances)
        if total > WORLD_GUARD:
            raise WorldGuardExceeded(
                f"possible-worlds enumeration exceeds {WORLD_GUARD}")


def enumerate_worlds(objects):
    """All possible worlds of the window with their appearance probabilities.

    Each world is a tuple with one chosen Instance per object, in the order
    the objects were given.
    """
    objects = list(objects)
    _guard(objects)
    worlds = []
    for combo in itertools.product(*(o.instances for o in objects)):
        prob = 1.0
        for inst in combo:
            prob *= inst.p
        worlds.append((combo, prob))
    return worlds


def brute_skyline_probability(obj: ProbabilisticObject, objects) -> float:
    """Probability, over possible worlds, that obj's instance is undominated."""
    objects = list(objects)
    ids = [o.id for o in objects]
    if obj.id not in ids:
        objects = objects + [obj]
        ids.append(obj.id)
    pos = ids.index(obj.id)
    total = 0.0
    for world, prob in enumerate_worlds(objects):
        mine = world[pos].attrs
        if any(dominates(world[i].attrs, mine) for i in range(len(world)) if i != pos):
            continue
        total += prob
    return total


def brute_answer_set(objects, alpha: float) -> set[str]:
    """Ids of objects whose skyline probability strictly exceeds alpha."""
    objects = list(objects)
    return {
        o.id
        for o in objects
        if brute_skyline_probability(o, objects) > alpha
    }
