"""Answer-quality and runtime metrics for experiment runs."""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field


def _as_sets(answers) -> dict[int, set[str]]:
    out = {}
    for t, members in answers.items():
        out[int(t)] = set(members.members) if hasattr(members, "members") else set(members)
    return out


def f_score(returned, truth, macro: bool = False) -> float:
    """F-score of returned answer sets against ground-truth answer sets.

    Micro mode pools member hits over all ticks before combining; macro mode
    averages per-tick F-scores. NaN when the truth contains no members at all.
    """
    ret = _as_sets(returned)
    tru = _as_sets(truth)
    ticks = sorted(tru)
    if macro:
        scores = []
        for t in ticks:
            r, g = ret.get(t, set()), tru[t]
            if not g and not r:
                scores.append(1.0)
            elif not g:
                scores.append(0.0)
            else:
                p = len(r & g) / len(r) if r else 0.0
                rec = len(r & g) / len(g)
                scores.append(2 * p * rec / (p + rec) if p + rec else 0.0)
        return float(statistics.fmean(scores)) if scores else math.nan
    tp = sum(len(ret.get(t, set()) & tru[t]) for t in ticks)
    fp = sum(len(ret.get(t, set()) - tru[t]) for t in ticks)
    fn = sum(len(tru[t] - ret.get(t, set())) for t in ticks)
    if tp + fn == 0:
        return math.nan
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn)
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


@dataclass
class MetricsReport:
    ticks: int = 0
    arrivals: int = 0
    rejected: int = 0
    pruned_spatial: int = 0
    pruned_max_corner: int = 0
    pruned_min_corner: int = 0
    pruned_tree: int = 0
    pruning_ratio: float = math.nan
    layer1_fraction_mean: float = math.nan
    maintain_s_median: float = math.nan
    query_s_median: float = math.nan
    cell_size_u: float = math.nan
    f_score: float = math.nan
    diagnostics: list[str] = field(default_factory=list)

    @property
    def pruned_total(self) -> int:
        return (self.pruned_spatial + self.pruned_max_corner
                + self.pruned_min_corner + self.pruned_tree)

    def to_dict(self) -> dict:
        return {
            "ticks": self.ticks,
            "arrivals": self.arrivals,
            "rejected": self.rejected,
            "pruned_spatial": self.pruned_spatial,
            "pruned_max_corner": self.pruned_max_corner,
            "pruned_min_corner": self.pruned_min_corner,
            "pruned_tree": self.pruned_tree,
            "pruned_total": self.pruned_total,
            "pruning_ratio": self.pruning_ratio,
            "layer1_fraction_mean": self.layer1_fraction_mean,
            "maintain_s_median": self.maintain_s_median,
            "query_s_median": self.query_s_median,
            "cell_size_u": self.cell_size_u,
            "f_score": self.f_score,
        }


def summarize(stats_list, cell_size_u: float = math.nan,
              score: float = math.nan) -> MetricsReport:
    """Fold per-tick statistics into a MetricsReport."""
    rep = MetricsReport(cell_size_u=cell_size_u, f_score=score)
    rep.ticks = len(stats_list)
    occupancy = []
    for s in stats_list:
        rep.arrivals += s.arrivals
        rep.rejected += s.rejected
        rep.pruned_spatial += s.pruned_spatial
        rep.pruned_max_corner += s.pruned_max_corner
        rep.pruned_min_corner += s.pruned_min_corner
        rep.pruned_tree += s.pruned_tree
        if s.window:
            occupancy.append(s.layer1 / s.window)
    accepted = rep.arrivals - rep.rejected
    if accepted:
        rep.pruning_ratio = rep.pruned_total / accepted
    if occupancy:
        rep.layer1_fraction_mean = float(statistics.fmean(occupancy))
    if stats_list:
        rep.maintain_s_median = float(statistics.median(s.maintain_s for s in stats_list))
        rep.query_s_median = float(statistics.median(s.query_s for s in stats_list))
    return rep
