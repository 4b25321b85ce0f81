"""Experiment orchestration: engine assembly, stream replay, end-to-end runs."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import datagen
from .dd import build_lattice, rank_lattice
from .engine import AnswerSet, Engine, TickStats
from .index import (CostModelParams, CostRule, Repository, RepositoryIndex,
                    tune_cell_size)
from .metrics import MetricsReport, f_score, summarize
from .model import QueryConfig


@dataclass(frozen=True)
class ExperimentConfig:
    alpha: float = 0.5
    d: int = 4
    window: int = 2_000
    repo_size: int = 12_000
    theta: int = 30
    m: int = 1
    xi: float = 0.3
    kind: str = "correlated"
    seed: int = 0
    u: float | str = "auto"
    lam: int = 4
    beta: float = 0.5
    eta: float = 0.01
    d2: float | None = None
    t_cell: float = 1e-7
    t_sr: float = 1e-6
    n_stream: int | None = None
    rule_eps: float = 0.02

    @property
    def stream_size(self) -> int:
        return self.n_stream if self.n_stream is not None else 4 * self.window


def paper_scale(cfg: ExperimentConfig) -> ExperimentConfig:
    """Restore the full-size defaults (|W_t|=20K, |R|=120K)."""
    return replace(cfg, window=20_000, repo_size=120_000)


def cost_params(cfg: ExperimentConfig, rules, lengths) -> CostModelParams:
    cost_rules = tuple(
        CostRule(tuple(sorted(r.determinants)),
                 tuple(r.eps_of(x) for x in sorted(r.determinants)))
        for r in rules)
    return CostModelParams(beta=cfg.beta, t_cell=cfg.t_cell, t_sr=cfg.t_sr,
                           d2=cfg.d2 if cfg.d2 is not None else float(cfg.d),
                           n=cfg.window, lengths=tuple(float(v) for v in lengths),
                           rules=cost_rules, eta=cfg.eta)


def resolve_u(cfg: ExperimentConfig, rules, lengths) -> float:
    if cfg.u == "auto":
        return tune_cell_size(cost_params(cfg, rules, lengths))
    return float(cfg.u)


def build_engine(repo: Repository, rules, cfg: ExperimentConfig
                 ) -> tuple[Engine, float]:
    """Per-dependent lattices and indexes wrapped in a ready engine."""
    by_dep: dict[int, list] = {}
    for r in rules:
        by_dep.setdefault(r.dependent, []).append(r)
    if by_dep:
        u = resolve_u(cfg, rules, repo.lengths)
    else:
        u = 1.0 if cfg.u == "auto" else float(cfg.u)
    lattices, indexes = {}, {}
    for dep, group in by_dep.items():
        lattices[dep] = rank_lattice(build_lattice(group), repo)
        dims = sorted(set().union(*(r.determinants for r in group)))
        indexes[dep] = RepositoryIndex(repo, dep, dims, u, lam=cfg.lam)
    engine = Engine(QueryConfig(alpha=cfg.alpha, d=cfg.d), repo, lattices, indexes)
    return engine, u


def replay(engine: Engine, stream, t_start: int | None = None,
           t_end: int | None = None
           ) -> tuple[dict[int, AnswerSet], list[TickStats]]:
    """Advance the engine tick-by-tick over the stream's arrival range."""
    by_tick: dict[int, list] = {}
    for obj in stream:
        by_tick.setdefault(obj.arr, []).append(obj)
    if not by_tick:
        return {}, []
    lo = t_start if t_start is not None else min(by_tick)
    hi = t_end if t_end is not None else max(by_tick)
    answers: dict[int, AnswerSet] = {}
    all_stats: list[TickStats] = []
    for t in range(lo, hi + 1):
        ans, stats = engine.process_tick(by_tick.get(t, []), t)
        answers[t] = ans
        all_stats.append(stats)
    return answers, all_stats


def run_experiment(cfg: ExperimentConfig, repo: Repository | None = None,
                   stream=None, rules=None, truth_answers=None,
                   with_truth: bool = True, macro: bool = False
                   ) -> tuple[MetricsReport, dict[int, AnswerSet]]:
    """Build (or take) inputs, replay the stream, and report metrics.

    When the stream is generated here, the complete pre-mask stream is
    replayed too so an F-score against ground truth can be reported.
    """
    if rules is None:
        rules = datagen.default_rules(cfg.d, cfg.rule_eps)
    truth_stream = None
    if repo is None or stream is None:
        repo_rows, complete = datagen.gen_synthetic(
            cfg.kind, cfg.repo_size, cfg.stream_size, cfg.d, rules,
            cfg.seed, cfg.window, cfg.theta)
        if repo is None:
            repo = Repository(repo_rows)
        if stream is None:
            stream, truth_stream = datagen.mask(complete, cfg.xi, cfg.m, cfg.seed + 1)
    engine, u = build_engine(repo, rules, cfg)
    answers, stats = replay(engine, stream)
    score = math.nan
    if truth_answers is not None:
        score = f_score(answers, truth_answers, macro=macro)
    elif with_truth and truth_stream is not None:
        truth_engine, _ = build_engine(repo, rules, cfg)
        truth_ans, _ = replay(truth_engine, truth_stream)
        score = f_score(answers, truth_ans, macro=macro)
    report = summarize(stats, cell_size_u=u, score=score)
    report.diagnostics = list(engine.diagnostics)
    return report, answers
