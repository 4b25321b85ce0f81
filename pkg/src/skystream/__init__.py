"""Streaming probabilistic skylines over incomplete data streams.

Missing attributes are imputed from a complete repository via differential
dependency rules; the probabilistic skyline answer set is maintained
continuously with pruning, a layered skyline-tree synopsis, and a
cost-model-tuned imputation index.
"""
from .dd import (DDRule, ConceptualLattice, ImputedDistribution, build_lattice,
                 impute_object, rank_lattice, select_dd)
from .engine import (AnswerSet, Engine, TickStats, lb_skyline_probability,
                     skyline_probability)
from .harness import (ExperimentConfig, build_engine, paper_scale, replay,
                      run_experiment)
from .index import (CostModelParams, CostRule, Repository, RepositoryIndex,
                    estimate_cost, tune_cell_size)
from .metrics import MetricsReport, f_score, summarize
from .model import (Instance, ProbabilisticObject, QueryConfig, StreamObject,
                    Window, dominance_probability, dominates,
                    max_corner_prune, min_corner_prune, spatial_prune,
                    weakly_dominates)
from .oracle import brute_answer_set, brute_skyline_probability, enumerate_worlds
from .tree import InsertOutcome, SkylineTree

__all__ = [
    "AnswerSet", "ConceptualLattice", "CostModelParams", "CostRule", "DDRule",
    "Engine", "ExperimentConfig", "ImputedDistribution", "InsertOutcome",
    "Instance", "MetricsReport", "ProbabilisticObject", "QueryConfig",
    "Repository", "RepositoryIndex", "SkylineTree", "StreamObject",
    "TickStats", "Window", "brute_answer_set", "brute_skyline_probability",
    "build_engine", "build_lattice", "dominance_probability", "dominates",
    "enumerate_worlds", "estimate_cost", "f_score", "impute_object",
    "lb_skyline_probability", "max_corner_prune", "min_corner_prune",
    "paper_scale", "rank_lattice", "replay", "run_experiment", "select_dd",
    "skyline_probability", "spatial_prune", "summarize", "tune_cell_size",
    "weakly_dominates",
]

__version__ = "0.1.0"
