"""Core domain types: stream tuples, probabilistic objects, dominance, pruning.

All attributes share larger-is-better semantics; direction flips are a
preprocessing concern for callers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

PROB_TOL = 1e-9

Vector = tuple[float, ...]


def _check_dims(a, b) -> None:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")


def dominates(a, b) -> bool:
    """True iff a >= b on every dimension and a > b on at least one."""
    _check_dims(a, b)
    strict = False
    for x, y in zip(a, b):
        if x < y:
            return False
        if x > y:
            strict = True
    return strict


def weakly_dominates(a, b) -> bool:
    """True iff a >= b componentwise (reflexive)."""
    _check_dims(a, b)
    return all(x >= y for x, y in zip(a, b))


@dataclass(frozen=True)
class StreamObject:
    """One stream tuple; ``None`` marks a missing attribute slot."""

    id: str
    arr: int
    exp: int
    attrs: tuple[float | None, ...]

    def __post_init__(self):
        if self.exp <= self.arr:
            raise ValueError(f"object {self.id}: exp {self.exp} <= arr {self.arr}")
        if all(v is None for v in self.attrs):
            raise ValueError(f"object {self.id}: all attributes missing")
        for v in self.attrs:
            if v is not None and not math.isfinite(v):
                raise ValueError(f"object {self.id}: non-finite attribute {v}")

    @property
    def missing(self) -> tuple[int, ...]:
        return tuple(j for j, v in enumerate(self.attrs) if v is None)

    @property
    def is_complete(self) -> bool:
        return not self.missing


@dataclass(frozen=True)
class Instance:
    attrs: Vector
    p: float

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0 + PROB_TOL:
            raise ValueError(f"instance probability {self.p} outside (0, 1]")


@dataclass(frozen=True)
class ProbabilisticObject:
    """An imputed object: instances with existence probabilities summing to 1."""

    id: str
    arr: int
    exp: int
    instances: tuple[Instance, ...]
    # computed in __post_init__
    mbr_min: Vector = field(default=(), compare=False)
    mbr_max: Vector = field(default=(), compare=False)

    def __post_init__(self):
        if not self.instances:
            raise ValueError(f"object {self.id}: no instances")
        total = sum(i.p for i in self.instances)
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"object {self.id}: probabilities sum to {total}")
        d = len(self.instances[0].attrs)
        for inst in self.instances:
            if len(inst.attrs) != d:
                raise ValueError(f"object {self.id}: ragged instance dimensions")
        lo = tuple(min(i.attrs[k] for i in self.instances) for k in range(d))
        hi = tuple(max(i.attrs[k] for i in self.instances) for k in range(d))
        object.__setattr__(self, "mbr_min", lo)
        object.__setattr__(self, "mbr_max", hi)
        object.__setattr__(self, "_matrix", None)

    @classmethod
    def from_pairs(cls, id, arr, exp, pairs) -> "ProbabilisticObject":
        """Build from (attrs, p) pairs, merging duplicate attribute vectors."""
        merged: dict[Vector, float] = {}
        for attrs, p in pairs:
            key = tuple(float(v) for v in attrs)
            merged[key] = merged.get(key, 0.0) + p
        insts = tuple(Instance(a, p) for a, p in sorted(merged.items()))
        return cls(id, arr, exp, insts)

    @classmethod
    def certain(cls, id, arr, exp, attrs) -> "ProbabilisticObject":
        return cls(id, arr, exp, (Instance(tuple(float(v) for v in attrs), 1.0),))

    @property
    def d(self) -> int:
        return len(self.instances[0].attrs)

    def matrix(self) -> tuple[np.ndarray, np.ndarray]:
        """(n_instances x d) attribute matrix and probability vector, cached."""
        cached = getattr(self, "_matrix", None)
        if cached is None:
            m = np.array([i.attrs for i in self.instances], dtype=float)
            p = np.array([i.p for i in self.instances], dtype=float)
            cached = (m, p)
            object.__setattr__(self, "_matrix", cached)
        return cached


def point_object(attrs, id="point", arr=0, exp=1) -> ProbabilisticObject:
    """Degenerate single-instance object, used for corner computations."""
    return ProbabilisticObject.certain(id, arr, exp, attrs)


def dominance_probability(p: ProbabilisticObject, q: ProbabilisticObject) -> float:
    """Pr{p dominates q}: sum over instance pairs of joint probability."""
    pm, pp = p.matrix()
    qm, qp = q.matrix()
    ge = (pm[:, None, :] >= qm[None, :, :]).all(axis=2)
    gt = (pm[:, None, :] > qm[None, :, :]).any(axis=2)
    dom = ge & gt
    return float(pp @ dom @ qp)


def prob_dominates_point(p: ProbabilisticObject, point) -> float:
    """Pr{p dominates the fixed vector point}."""
    pm, pp = p.matrix()
    pt = np.asarray(point, dtype=float)
    dom = (pm >= pt).all(axis=1) & (pm > pt).any(axis=1)
    return float(pp[dom].sum())


def spatial_prune(candidate: ProbabilisticObject, other: ProbabilisticObject) -> bool:
    """True certifies the candidate can never be a skyline while other lives."""
    return other.exp >= candidate.exp and dominates(other.mbr_min, candidate.mbr_max)


def max_corner_prune(candidate, other, alpha: float) -> bool:
    if other.exp < candidate.exp:
        return False
    return prob_dominates_point(other, candidate.mbr_max) >= 1.0 - alpha - PROB_TOL


def min_corner_prune(candidate, other, alpha: float) -> bool:
    if other.exp < candidate.exp:
        return False
    corner = point_object(other.mbr_min)
    return dominance_probability(corner, candidate) >= 1.0 - alpha - PROB_TOL


@dataclass
class Window:
    """Objects valid at time t (arr <= t < exp)."""

    t: int = 0
    objects: dict[str, ProbabilisticObject] = field(default_factory=dict)

    def add(self, obj: ProbabilisticObject) -> None:
        self.objects[obj.id] = obj

    def evict(self, t: int) -> list[ProbabilisticObject]:
        gone = [o for o in self.objects.values() if o.exp <= t]
        for o in gone:
            del self.objects[o.id]
        self.t = t
        return gone

    def __len__(self) -> int:
        return len(self.objects)

    def __iter__(self):
        return iter(self.objects.values())


@dataclass(frozen=True)
class QueryConfig:
    alpha: float
    d: int

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha {self.alpha} outside (0, 1)")
        if self.d < 1:
            raise ValueError("d must be positive")
