"""End-to-end streaming loop: expiry, imputation, pruning, tree upkeep,
and answer refinement with full/partial update shortcuts."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import dd
from .model import (ProbabilisticObject, QueryConfig, StreamObject, Window,
                    max_corner_prune, min_corner_prune, spatial_prune)
from .tree import InsertOutcome, SkylineTree

_TOL = 1e-9


class WindowMatrix:
    """Flattened instance view of a window for vectorized probability sums."""

    def __init__(self, window: Window):
        attrs, probs, owners = [], [], []
        self.offsets: dict[str, tuple[int, int]] = {}
        pos = 0
        for obj in window:
            m, p = obj.matrix()
            attrs.append(m)
            probs.append(p)
            owners.extend([obj.id] * len(p))
            self.offsets[obj.id] = (pos, pos + len(p))
            pos += len(p)
        self.attrs = np.vstack(attrs) if attrs else np.empty((0, 0))
        self.probs = np.concatenate(probs) if probs else np.empty(0)

    def undominated_factor(self, point, exclude: str) -> float:
        """Product over other objects of (1 - Pr{object dominates point})."""
        if self.attrs.size == 0:
            return 1.0
        pt = np.asarray(point, dtype=float)
        dom = (self.attrs >= pt).all(axis=1) & (self.attrs > pt).any(axis=1)
        factor = 1.0
        for oid, (lo, hi) in self.offsets.items():
            if oid == exclude:
                continue
            mass = self.probs[lo:hi][dom[lo:hi]].sum()
            factor *= 1.0 - mass
            if factor <= 0.0:
                return 0.0
        return factor


def skyline_probability(obj: ProbabilisticObject, window: Window,
                        matrix: WindowMatrix | None = None) -> float:
    """Probability that obj's realized instance is undominated in the window."""
    matrix = matrix if matrix is not None else WindowMatrix(window)
    total = 0.0
    for inst in obj.instances:
        total += inst.p * matrix.undominated_factor(inst.attrs, exclude=obj.id)
    return total


def lb_skyline_probability(obj: ProbabilisticObject, window: Window,
                           matrix: WindowMatrix | None = None) -> float:
    """Lower bound: the skyline probability of obj's min corner."""
    matrix = matrix if matrix is not None else WindowMatrix(window)
    return matrix.undominated_factor(obj.mbr_min, exclude=obj.id)


@dataclass
class AnswerSet:
    t: int
    members: dict[str, float] = field(default_factory=dict)  # id -> probability

    @property
    def ids(self) -> set[str]:
        return set(self.members)

    def format_line(self) -> str:
        parts = [f"{oid}@{self.members[oid]:.6f}" for oid in sorted(self.members)]
        return f"{self.t}:" + ("" if not parts else " " + " ".join(parts))


@dataclass
class TickStats:
    arrivals: int = 0
    pruned_spatial: int = 0
    pruned_max_corner: int = 0
    pruned_min_corner: int = 0
    pruned_tree: int = 0
    rejected: int = 0
    layer1: int = 0
    window: int = 0
    maintain_s: float = 0.0
    query_s: float = 0.0

    @property
    def pruned_total(self) -> int:
        return (self.pruned_spatial + self.pruned_max_corner
                + self.pruned_min_corner + self.pruned_tree)


class Engine:
    def __init__(self, config: QueryConfig, repo=None, lattices=None, indexes=None):
        self.config = config
        self.repo = repo
        self.lattices = lattices or {}
        self.indexes = indexes or {}
        self.window = Window()
        self.tree = SkylineTree(config.alpha)
        self.prev_answers = AnswerSet(t=-1)
        self.diagnostics: list[str] = []

    # -- per-arrival pipeline ----------------------------------------------

    def _impute(self, obj: StreamObject) -> ProbabilisticObject:
        if obj.is_complete:
            return ProbabilisticObject.certain(obj.id, obj.arr, obj.exp, obj.attrs)
        if self.repo is None:
            raise ValueError(f"object {obj.id} is incomplete but no repository given")
        return dd.impute_object(obj, self.lattices, self.indexes, self.repo)

    def _try_prune(self, cand: ProbabilisticObject, stats: TickStats) -> bool:
        alpha = self.config.alpha
        for node in self.tree.all_nodes():
            other = node.obj
            if spatial_prune(cand, other):
                stats.pruned_spatial += 1
                return True
            if max_corner_prune(cand, other, alpha):
                stats.pruned_max_corner += 1
                return True
            if min_corner_prune(cand, other, alpha):
                stats.pruned_min_corner += 1
                return True
        return False

    def process_tick(self, arrivals, t: int) -> tuple[AnswerSet, TickStats]:
        stats = TickStats()
        began = time.perf_counter()
        evicted = self.window.evict(t)
        self.tree.delete_expired(t)
        had_deletions = bool(evicted)
        had_insertions = False
        for raw in arrivals:
            stats.arrivals += 1
            try:
                if raw.arr != t:
                    raise ValueError(f"object {raw.id} arrives at {raw.arr}, not {t}")
                width = raw.d if isinstance(raw, ProbabilisticObject) else len(raw.attrs)
                if self.config.d != width:
                    raise ValueError(f"object {raw.id} has {width} attributes")
                imputed = raw if isinstance(raw, ProbabilisticObject) else self._impute(raw)
            except ValueError as err:
                stats.rejected += 1
                self.diagnostics.append(str(err))
                continue
            self.window.add(imputed)
            had_insertions = True
            if self._try_prune(imputed, stats):
                continue
            if self.tree.insert(imputed) is InsertOutcome.PRUNED:
                stats.pruned_tree += 1
        mid = time.perf_counter()
        answers = self.refine(t, had_insertions, had_deletions)
        stats.maintain_s = mid - began
        stats.query_s = time.perf_counter() - mid
        self.prev_answers = answers
        stats.layer1 = len(self.tree.layer(1))
        stats.window = len(self.window)
        return answers, stats

    def refine(self, t: int, had_insertions: bool, had_deletions: bool) -> AnswerSet:
        alpha = self.config.alpha
        if not had_insertions and not had_deletions:
            return AnswerSet(t, dict(self.prev_answers.members))
        layer1 = {o.id: o for o in self.tree.first_layer()}
        answers = AnswerSet(t)
        if not had_insertions:
            # deletions only: surviving previous answers stay answers
            answers.members = {oid: p for oid, p in self.prev_answers.members.items()
                               if oid in layer1}
            candidates = [o for oid, o in layer1.items() if oid not in answers.members]
        else:
            candidates = list(layer1.values())
        matrix = WindowMatrix(self.window)
        for obj in candidates:
            lb = lb_skyline_probability(obj, self.window, matrix)
            if lb > alpha + _TOL:
                # the bound already certifies membership; report it as-is
                answers.members[obj.id] = lb
                continue
            exact = skyline_probability(obj, self.window, matrix)
            if exact > alpha + _TOL:
                answers.members[obj.id] = exact
        return answers
