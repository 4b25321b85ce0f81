"""Imputation index over the complete repository.

One index per dependent attribute: equal-size grid cells over the union of
determinant attributes, packed under a small MBR hierarchy whose nodes carry a
bucket histogram (COUNT plus dependent-value interval per bucket), and the
cost model used to tune the grid cell size.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np


class Repository:
    """Complete reference samples, one row per sample."""

    def __init__(self, samples, lengths=None):
        self.samples = np.asarray(samples, dtype=float)
        if self.samples.ndim != 2 or self.samples.shape[0] == 0:
            raise ValueError("repository must be a non-empty 2-D table")
        if np.isnan(self.samples).any():
            raise ValueError("repository rows must be complete")
        self.mins = self.samples.min(axis=0)
        spans = self.samples.max(axis=0) - self.mins
        if lengths is not None:
            self.lengths = np.asarray(lengths, dtype=float)
        else:
            self.lengths = np.where(spans > 0, spans, 1.0)

    @property
    def d(self) -> int:
        return self.samples.shape[1]

    def __len__(self) -> int:
        return self.samples.shape[0]


@dataclass
class Bucket:
    cnt: int = 0
    lo: float = math.inf
    hi: float = -math.inf

    def add(self, v: float, k: int = 1) -> None:
        self.cnt += k
        self.lo = min(self.lo, v)
        self.hi = max(self.hi, v)

    @property
    def interval(self):
        return None if self.cnt == 0 else (self.lo, self.hi)


class Histogram:
    """lam intervals per dimension over a node's MBR."""

    def __init__(self, lo, hi, lam: int):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        self.lam = lam
        self.buckets: dict[tuple[int, ...], Bucket] = {}

    def _locate(self, point) -> tuple[int, ...]:
        span = np.where(self.hi > self.lo, self.hi - self.lo, 1.0)
        idx = np.floor((np.asarray(point) - self.lo) / span * self.lam).astype(int)
        return tuple(int(min(max(i, 0), self.lam - 1)) for i in idx)

    def add(self, point, dep_value: float) -> None:
        self.buckets.setdefault(self._locate(point), Bucket()).add(dep_value)

    def bucket_box(self, key):
        span = np.where(self.hi > self.lo, self.hi - self.lo, 1.0)
        lo = self.lo + span * np.array(key) / self.lam
        hi = self.lo + span * (np.array(key) + np.ones(len(key))) / self.lam
        return lo, hi

    def total(self) -> int:
        return sum(b.cnt for b in self.buckets.values())


@dataclass
class IndexNode:
    lo: np.ndarray
    hi: np.ndarray
    children: list = field(default_factory=list)  # IndexNode list for inner nodes
    cells: list = field(default_factory=list)  # cell coord list for leaves
    hist: Histogram | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def intersects(self, qlo, qhi) -> bool:
        return bool(np.all(self.lo <= qhi) and np.all(self.hi >= qlo))


class RepositoryIndex:
    """Grid + MBR hierarchy over repository projections for one dependent attr."""

    def __init__(self, repo: Repository, dependent: int, dims, u: float,
                 lam: int = 4, fanout: int = 8):
        if u <= 0:
            raise ValueError("cell size u must be positive")
        if lam < 1:
            raise ValueError("lambda must be >= 1")
        self.repo = repo
        self.dependent = dependent
        self.dims = tuple(sorted(dims))
        self.u = float(u)
        self.lam = lam
        self.fanout = fanout
        self.origin = repo.mins[list(self.dims)].copy()
        self.cells: dict[tuple[int, ...], list[int]] = {}
        for i in range(len(repo)):
            self.cells.setdefault(self._cell_of(repo.samples[i]), []).append(i)
        self.root = self._pack(sorted(self.cells))

    # -- construction ------------------------------------------------------

    def _cell_of(self, sample) -> tuple[int, ...]:
        proj = np.asarray(sample)[list(self.dims)]
        return tuple(int(math.floor(v)) for v in (proj - self.origin) / self.u)

    def _cell_box(self, coord):
        lo = self.origin + np.array(coord, dtype=float) * self.u
        return lo, lo + self.u

    def _leaf(self, coords) -> IndexNode:
        boxes = [self._cell_box(c) for c in coords]
        lo = np.min([b[0] for b in boxes], axis=0)
        hi = np.max([b[1] for b in boxes], axis=0)
        return IndexNode(lo=lo, hi=hi, cells=list(coords))

    def _pack(self, coords) -> IndexNode:
        leaves = [self._leaf(coords[i:i + self.fanout])
                  for i in range(0, len(coords), self.fanout)]
        level = leaves
        while len(level) > 1:
            nxt = []
            for i in range(0, len(level), self.fanout):
                group = level[i:i + self.fanout]
                lo = np.min([n.lo for n in group], axis=0)
                hi = np.max([n.hi for n in group], axis=0)
                nxt.append(IndexNode(lo=lo, hi=hi, children=group))
            level = nxt
        root = level[0]
        self._fill_histograms(root)
        return root

    def _samples_under(self, node: IndexNode):
        if node.is_leaf:
            for coord in node.cells:
                yield from self.cells[coord]
        else:
            for child in node.children:
                yield from self._samples_under(child)

    def _fill_histograms(self, node: IndexNode) -> None:
        node.hist = Histogram(node.lo, node.hi, self.lam)
        for i in self._samples_under(node):
            row = self.repo.samples[i]
            node.hist.add(row[list(self.dims)], row[self.dependent])
        for child in node.children:
            self._fill_histograms(child)

    # -- maintenance -------------------------------------------------------

    def insert_sample(self, sample) -> None:
        """Offline single-writer insert; histograms on the path stay consistent."""
        sample = np.asarray(sample, dtype=float)
        if sample.shape != (self.repo.d,):
            raise ValueError("sample dimensionality mismatch")
        idx = len(self.repo)
        self.repo.samples = np.vstack([self.repo.samples, sample])
        coord = self._cell_of(sample)
        new_cell = coord not in self.cells
        self.cells.setdefault(coord, []).append(idx)
        proj = sample[list(self.dims)]
        dep = sample[self.dependent]
        node = self.root
        while True:
            node.lo = np.minimum(node.lo, self._cell_box(coord)[0])
            node.hi = np.maximum(node.hi, self._cell_box(coord)[1])
            node.hist.add(proj, dep)
            if node.is_leaf:
                if new_cell and coord not in node.cells:
                    node.cells.append(coord)
                break
            # descend into the child needing the least MBR enlargement
            node = min(node.children, key=lambda c: self._enlargement(c, proj))

    @staticmethod
    def _enlargement(node: IndexNode, point) -> float:
        lo = np.minimum(node.lo, point)
        hi = np.maximum(node.hi, point)
        return float(np.prod(hi - lo) - np.prod(node.hi - node.lo))

    # -- queries -----------------------------------------------------------

    def _query_box(self, query: dict[int, tuple[float, float]]):
        qlo = np.full(len(self.dims), -math.inf)
        qhi = np.full(len(self.dims), math.inf)
        for attr, (lo, hi) in query.items():
            if attr not in self.dims:
                raise ValueError(f"attribute {attr} not indexed")
            k = self.dims.index(attr)
            qlo[k], qhi[k] = lo, hi
        return qlo, qhi

    def range_query(self, query: dict[int, tuple[float, float]]) -> list[int]:
        """Sample indices whose queried attributes all fall inside the ranges."""
        qlo, qhi = self._query_box(query)
        out: list[int] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if not node.intersects(qlo, qhi):
                continue
            if node.is_leaf:
                for coord in node.cells:
                    clo, chi = self._cell_box(coord)
                    if np.all(clo >= qlo) and np.all(chi <= qhi):
                        out.extend(self.cells[coord])
                    else:
                        for i in self.cells[coord]:
                            proj = self.repo.samples[i][list(self.dims)]
                            if np.all(proj >= qlo) and np.all(proj <= qhi):
                                out.append(i)
            else:
                stack.extend(node.children)
        return sorted(out)

    def attribute_bounds(self, query, depth: int):
        """Dependent-value interval and count bounds from depth-level histograms.

        Buckets fully inside the query count toward both bounds, partially
        intersecting buckets toward the upper bound only.
        """
        qlo, qhi = self._query_box(query)
        level = [self.root]
        for _ in range(depth):
            nxt = []
            for node in level:
                nxt.extend(node.children if not node.is_leaf else [node])
            level = nxt
        interval = None
        lo_cnt = hi_cnt = 0
        for node in level:
            if not node.intersects(qlo, qhi):
                continue
            for key, bucket in node.hist.buckets.items():
                blo, bhi = node.hist.bucket_box(key)
                if np.any(bhi < qlo) or np.any(blo > qhi):
                    continue
                hi_cnt += bucket.cnt
                if np.all(blo >= qlo) and np.all(bhi <= qhi):
                    lo_cnt += bucket.cnt
                iv = bucket.interval
                if iv is not None:
                    interval = iv if interval is None else (
                        min(interval[0], iv[0]), max(interval[1], iv[1]))
        return interval, lo_cnt, hi_cnt

    def full_scan(self, query) -> list[int]:
        """Reference linear scan with the same interval predicate."""
        out = []
        for i in range(len(self.repo)):
            row = self.repo.samples[i]
            if all(lo <= row[a] <= hi for a, (lo, hi) in query.items()):
                out.append(i)
        return out

    def height(self) -> int:
        h, node = 1, self.root
        while not node.is_leaf:
            node = node.children[0]
            h += 1
        return h


# -- cost model --------------------------------------------------------------


@dataclass(frozen=True)
class CostRule:
    """Determinant set Y with per-attribute tolerance radii, for the cost model."""

    determinants: tuple[int, ...]
    eps: tuple[float, ...]  # aligned with determinants


@dataclass(frozen=True)
class CostModelParams:
    beta: float
    t_cell: float
    t_sr: float
    d2: float
    n: int
    lengths: tuple[float, ...]
    rules: tuple[CostRule, ...]
    eta: float = 0.01

    def __post_init__(self):
        d = len(self.lengths)
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must be in (0, 1)")
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if not 0.0 < self.d2 <= d:
            raise ValueError("d2 must be in (0, d]")


def estimate_cost(params: CostModelParams, u: float) -> float:
    """Total grid-access cost at cell size u: cell-visit + refinement terms."""
    if u <= 0:
        raise ValueError("u must be positive")
    d = len(params.lengths)
    exponent = params.d2 / d
    total = 0.0
    for rule in params.rules:
        inside = set(rule.determinants)
        cell = 1.0
        for eps in rule.eps:
            cell *= 2.0 * eps / u + 2.0
        for x in range(d):
            if x not in inside:
                cell *= params.lengths[x] / u
        extra = 1.0
        for x in range(d):
            if x not in inside:
                extra *= params.lengths[x] ** exponent
        grown = shrunk = 1.0
        for eps in rule.eps:
            grown *= (2.0 * eps + 2.0 * u) ** exponent
            shrunk *= (2.0 * eps) ** exponent
        total += params.t_cell * params.beta * cell
        total += (params.n - 1) * params.t_sr * (1.0 - params.beta) * extra * (grown - shrunk)
    return total


def tune_cell_size(params: CostModelParams) -> float:
    """Bisection on the sign of dCost/du, to within 2*eta of the minimizer."""
    lo, hi = 0.0, max(params.lengths)
    step = params.eta / 10.0
    while hi - lo >= 2.0 * params.eta:
        u = (lo + hi) / 2.0
        left = max(u - step, step / 100.0)
        deriv = estimate_cost(params, u + step) - estimate_cost(params, left)
        if deriv > 0:
            hi = u
        else:
            lo = u
    return (lo + hi) / 2.0


def grid_argmin_cost(params: CostModelParams, step: float | None = None) -> float:
    """Dense grid-search reference minimizer (test oracle)."""
    step = step if step is not None else params.eta / 2.0
    us = np.arange(step, max(params.lengths) + step, step)
    costs = [estimate_cost(params, float(u)) for u in us]
    return float(us[int(np.argmin(costs))])
