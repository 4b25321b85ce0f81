"""Differential-dependency rules, conceptual lattices, and imputation.

A rule X -> A_j tolerates a per-attribute difference of at most eps on each
determinant; repository samples within tolerance of an incomplete object vote
for the missing value with frequency-proportional probabilities.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .index import Repository, RepositoryIndex
from .model import ProbabilisticObject, StreamObject

INSTANCE_CAP = 64


@dataclass(frozen=True)
class DDRule:
    determinants: frozenset[int]
    dependent: int
    eps: tuple[tuple[int, float], ...]  # (attr, tolerance) for X plus the dependent

    def __post_init__(self):
        if self.dependent in self.determinants:
            raise ValueError("dependent attribute cannot be a determinant")
        covered = {a for a, _ in self.eps}
        if covered != self.determinants | {self.dependent}:
            raise ValueError("tolerances must cover X and the dependent attribute")
        if any(e < 0 for _, e in self.eps):
            raise ValueError("tolerances must be non-negative")

    def eps_of(self, attr: int) -> float:
        return dict(self.eps)[attr]


@dataclass(frozen=True)
class LatticeNode:
    """A combination of base determinant sets; intervals intersected on overlap."""

    determinants: frozenset[int]
    eps: tuple[tuple[int, float], ...]  # determinant tolerances only
    level: int
    rank: int = 0  # per-level visit order, ascending imputation cost

    def eps_of(self, attr: int) -> float:
        return dict(self.eps)[attr]


FALLBACK = LatticeNode(frozenset(), (), 0)


@dataclass(frozen=True)
class ConceptualLattice:
    dependent: int
    nodes: tuple[LatticeNode, ...]  # includes the empty (fallback) node

    def levels(self):
        """Nodes grouped by level, highest first, each level in rank order."""
        top = max(n.level for n in self.nodes)
        for lvl in range(top, 0, -1):
            members = [n for n in self.nodes if n.level == lvl]
            yield sorted(members, key=lambda n: (n.rank, sorted(n.determinants)))


def build_lattice(rules) -> ConceptualLattice:
    rules = list(rules)
    if not rules:
        raise ValueError("no rules supplied")
    dependents = {r.dependent for r in rules}
    if len(dependents) != 1:
        raise ValueError("rules must share one dependent attribute")
    dependent = dependents.pop()
    nodes = [FALLBACK]
    for k in range(1, len(rules) + 1):
        for combo in itertools.combinations(range(len(rules)), k):
            dets: set[int] = set()
            tol: dict[int, float] = {}
            for ri in combo:
                for attr, eps in rules[ri].eps:
                    if attr == dependent:
                        continue
                    dets.add(attr)
                    tol[attr] = min(tol.get(attr, eps), eps)
            nodes.append(LatticeNode(frozenset(dets), tuple(sorted(tol.items())), k))
    return ConceptualLattice(dependent, tuple(nodes))


def rank_lattice(lattice: ConceptualLattice, repo: Repository,
                 lam: int = 16) -> ConceptualLattice:
    """Assign per-level ranks by ascending histogram-estimated match count.

    Per determinant dimension, a lam-bucket marginal histogram of R yields the
    expected fraction of samples within +-eps of a random repository point;
    the node estimate multiplies those fractions (independence assumption).
    """
    n = len(repo)
    frac_cache: dict[tuple[int, float], float] = {}

    def dim_fraction(attr: int, eps: float) -> float:
        key = (attr, eps)
        if key not in frac_cache:
            col = repo.samples[:, attr]
            counts, edges = np.histogram(col, bins=lam)
            centers = (edges[:-1] + edges[1:]) / 2.0
            within = np.abs(centers[:, None] - centers[None, :])
            width = (edges[1] - edges[0]) or 1.0
            near = within <= eps + width / 2.0
            hits = (near * counts[None, :]).sum(axis=1)
            frac_cache[key] = float((counts * hits).sum()) / max(n * n, 1)
        return frac_cache[key]

    ranked = [FALLBACK]
    by_level: dict[int, list[LatticeNode]] = {}
    for node in lattice.nodes:
        if node.level > 0:
            by_level.setdefault(node.level, []).append(node)
    for level, members in by_level.items():
        def estimate(node: LatticeNode) -> float:
            f = 1.0
            for attr, eps in node.eps:
                f *= dim_fraction(attr, eps)
            return n * f

        members = sorted(members, key=lambda m: (estimate(m), sorted(m.determinants)))
        for rank, node in enumerate(members):
            ranked.append(LatticeNode(node.determinants, node.eps, level, rank))
    return ConceptualLattice(lattice.dependent, tuple(ranked))


@dataclass(frozen=True)
class ImputedDistribution:
    attribute: int
    support: tuple[tuple[float, float], ...]  # (value, probability)

    def __post_init__(self):
        if not self.support:
            raise ValueError("empty support")
        total = sum(p for _, p in self.support)
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"support probabilities sum to {total}")


def _node_query(node: LatticeNode, obj: StreamObject):
    return {attr: (obj.attrs[attr] - eps, obj.attrs[attr] + eps)
            for attr, eps in node.eps}


def select_dd(lattice: ConceptualLattice, obj: StreamObject,
              index: RepositoryIndex) -> LatticeNode:
    """Pick the most specific applicable node with at least one matching sample.

    Levels are visited top down; within a level, ascending imputation cost.
    Falls back to the empty node when nothing matches.
    """
    present = {j for j, v in enumerate(obj.attrs) if v is not None}
    for members in lattice.levels():
        for node in members:
            if not node.determinants <= present:
                continue
            query = _node_query(node, obj)
            _, _, upper = index.attribute_bounds(query, depth=0)
            if upper == 0:
                continue
            if index.range_query(query):
                return node
    return FALLBACK


def impute_attribute(obj: StreamObject, node: LatticeNode,
                     index: RepositoryIndex) -> ImputedDistribution:
    """Frequency distribution of the dependent attribute over in-range samples."""
    matches = index.range_query(_node_query(node, obj))
    if not matches:
        raise ValueError("no repository samples in range; selection bug upstream")
    values = index.repo.samples[matches, index.dependent]
    return _frequency_distribution(index.dependent, values)


def fallback_impute(attribute: int, repo: Repository) -> ImputedDistribution:
    """Empirical distribution of the attribute column over all of R."""
    return _frequency_distribution(attribute, repo.samples[:, attribute])


def _frequency_distribution(attribute: int, values) -> ImputedDistribution:
    uniq, counts = np.unique(np.asarray(values, dtype=float), return_counts=True)
    total = counts.sum()
    support = tuple((float(v), float(c) / total) for v, c in zip(uniq, counts))
    return ImputedDistribution(attribute, support)


def impute_object(obj: StreamObject, lattices: dict[int, ConceptualLattice],
                  indexes: dict[int, RepositoryIndex], repo: Repository,
                  cap: int = INSTANCE_CAP) -> ProbabilisticObject:
    """Impute every missing slot independently and cross the supports."""
    if obj.is_complete:
        return ProbabilisticObject.certain(obj.id, obj.arr, obj.exp, obj.attrs)
    dists: list[ImputedDistribution] = []
    for j in obj.missing:
        lattice = lattices.get(j)
        index = indexes.get(j)
        node = select_dd(lattice, obj, index) if lattice and index else FALLBACK
        if node.level == 0:
            dists.append(fallback_impute(j, repo))
        else:
            dists.append(impute_attribute(obj, node, index))
    combos = []
    for picks in itertools.product(*(d.support for d in dists)):
        attrs = list(obj.attrs)
        prob = 1.0
        for dist, (value, p) in zip(dists, picks):
            attrs[dist.attribute] = value
            prob *= p
        combos.append((tuple(attrs), prob))
    if len(combos) > cap:
        combos = sorted(combos, key=lambda c: (-c[1], c[0]))[:cap]
        total = sum(p for _, p in combos)
        combos = [(a, p / total) for a, p in combos]
    return ProbabilisticObject.from_pairs(obj.id, obj.arr, obj.exp, combos)


def impute_attribute_scan(obj: StreamObject, node: LatticeNode,
                          repo: Repository, dependent: int) -> ImputedDistribution:
    """Reference full-scan imputation (test oracle for the index-backed path)."""
    query = _node_query(node, obj)
    values = [row[dependent] for row in repo.samples
              if all(lo <= row[a] <= hi for a, (lo, hi) in query.items())]
    if not values:
        raise ValueError("no repository samples in range")
    return _frequency_distribution(dependent, values)
