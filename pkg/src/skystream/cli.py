"""Command-line surface: gen, mask, index, run, eval, validate-dd."""
from __future__ import annotations

import argparse
import dataclasses
import math
import sys

from . import datagen, formats, harness
from .index import Repository, RepositoryIndex
from .metrics import f_score


def _print_kv(pairs: dict) -> None:
    for k, v in pairs.items():
        print(f"{k}={v}")


def _config_from_args(args) -> harness.ExperimentConfig:
    cfg = harness.ExperimentConfig(
        alpha=args.alpha, d=args.d, window=args.window,
        repo_size=args.repo_size, theta=args.theta, m=args.m, xi=args.xi,
        kind=args.kind, seed=args.seed,
        u="auto" if args.u == "auto" else float(args.u),
        lam=args.lam, beta=args.beta, eta=args.eta, d2=args.d2,
        n_stream=args.stream_size, rule_eps=args.rule_eps)
    if getattr(args, "paper_scale", False):
        cfg = harness.paper_scale(cfg)
    return cfg


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--window", type=int, default=2_000,
                   help="live-window size target |W_t|")
    p.add_argument("--repo-size", type=int, default=12_000)
    p.add_argument("--theta", type=int, default=30, help="arrivals per tick")
    p.add_argument("--m", type=int, default=1, help="missing attributes per masked object")
    p.add_argument("--xi", type=float, default=0.3, help="missing rate")
    p.add_argument("--kind", choices=["uniform", "correlated", "anticorrelated"],
                   default="correlated")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--u", default="auto", help="grid cell size, or 'auto' to tune")
    p.add_argument("--lam", type=int, default=4, help="histogram buckets per dimension")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--eta", type=float, default=0.01, help="tuner precision")
    p.add_argument("--d2", type=float, default=None, help="fractal dimension (default d)")
    p.add_argument("--stream-size", type=int, default=None)
    p.add_argument("--rule-eps", type=float, default=0.02,
                   help="tolerance for the built-in default rules")


def _load_rules(path: str | None, header, args):
    if path is not None:
        return formats.load_rules(path, header)
    return datagen.default_rules(args.d, args.rule_eps)


def cmd_gen(args) -> int:
    names = datagen.attr_names(args.d)
    rules = _load_rules(args.rules, names, args)
    cfg = _config_from_args(args)
    repo_rows, stream = datagen.gen_synthetic(
        cfg.kind, cfg.repo_size, cfg.stream_size, cfg.d, rules,
        cfg.seed, cfg.window, cfg.theta)
    formats.write_repository(args.repo_out, repo_rows, names)
    formats.write_stream(args.stream_out, stream, names)
    if args.rules_out:
        with open(args.rules_out, "w") as fh:
            fh.write(formats.format_rules(rules, names))
    _print_kv({"repo_rows": len(repo_rows), "stream_objects": len(stream)})
    return 0


def cmd_mask(args) -> int:
    stream, names = formats.load_stream(args.stream)
    masked, truth = datagen.mask(stream, args.xi, args.m, args.seed)
    formats.write_stream(args.out, masked, names)
    if args.truth_out:
        formats.write_stream(args.truth_out, truth, names)
    n_masked = sum(1 for a, b in zip(masked, truth) if a.attrs != b.attrs)
    _print_kv({"objects": len(masked), "masked": n_masked})
    return 0


def cmd_index(args) -> int:
    repo, names = formats.load_repository(args.repo)
    rules = formats.load_rules(args.rules, names)
    cfg = _config_from_args(args)
    if args.tune_u:
        cfg = dataclasses.replace(cfg, u="auto")
    u = harness.resolve_u(cfg, rules, repo.lengths)
    report = {"u": u}
    deps = sorted({r.dependent for r in rules})
    for dep in deps:
        group = [r for r in rules if r.dependent == dep]
        dims = sorted(set().union(*(r.determinants for r in group)))
        idx = RepositoryIndex(repo, dep, dims, u, lam=cfg.lam)
        report[f"index_{names[dep]}_cells"] = len(idx.cells)
        report[f"index_{names[dep]}_height"] = idx.height()
    _print_kv(report)
    return 0


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    repo = stream = rules = None
    if args.repo:
        repo, names = formats.load_repository(args.repo)
        if args.rules:
            rules = formats.load_rules(args.rules, names)
    if args.stream:
        stream, _ = formats.load_stream(args.stream)
    truth_answers = formats.load_answers(args.truth) if args.truth else None
    report, answers = harness.run_experiment(
        cfg, repo=repo, stream=stream, rules=rules,
        truth_answers=truth_answers, with_truth=not args.no_truth,
        macro=args.macro)
    if args.answers_out:
        formats.write_answers(args.answers_out,
                              [answers[t] for t in sorted(answers)])
    if args.metrics_out:
        formats.write_metrics(args.metrics_out, report.to_dict())
    _print_kv(report.to_dict())
    for line in report.diagnostics:
        print(f"diagnostic: {line}", file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    returned = formats.load_answers(args.answers)
    truth = formats.load_answers(args.truth)
    score = f_score(returned, truth, macro=args.macro)
    if math.isnan(score):
        print("diagnostic: truth answer sets are empty; F-score undefined",
              file=sys.stderr)
    _print_kv({"f_score": score})
    return 0


def cmd_validate_dd(args) -> int:
    repo, names = formats.load_repository(args.repo)
    rules = formats.load_rules(args.rules, names)
    violations = datagen.validate_rules(repo.samples, rules,
                                        sample=args.sample, seed=args.seed)
    _print_kv({"violations": violations})
    return 0 if violations == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skystream",
        description="Streaming probabilistic skylines over incomplete data")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a repository and a complete stream")
    _add_config_flags(p)
    p.add_argument("--rules", default=None, help="rule file (default built-in rules)")
    p.add_argument("--repo-out", required=True)
    p.add_argument("--stream-out", required=True)
    p.add_argument("--rules-out", default=None)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("mask", help="mask attributes of a complete stream")
    p.add_argument("--stream", required=True)
    p.add_argument("--xi", type=float, default=0.3)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--truth-out", default=None)
    p.set_defaults(fn=cmd_mask)

    p = sub.add_parser("index", help="build imputation indexes and report stats")
    _add_config_flags(p)
    p.add_argument("--repo", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--tune-u", action="store_true",
                   help="tune the cell size even if --u was given")
    p.set_defaults(fn=cmd_index)

    p = sub.add_parser("run", help="replay a stream and write answers + metrics")
    _add_config_flags(p)
    p.add_argument("--repo", default=None)
    p.add_argument("--stream", default=None)
    p.add_argument("--rules", default=None)
    p.add_argument("--truth", default=None, help="truth answers file for F-score")
    p.add_argument("--answers-out", default=None)
    p.add_argument("--metrics-out", default=None)
    p.add_argument("--paper-scale", action="store_true",
                   help="full-size defaults (|W_t|=20K, |R|=120K)")
    p.add_argument("--no-truth", action="store_true",
                   help="skip the ground-truth replay (no F-score)")
    p.add_argument("--macro", action="store_true",
                   help="per-tick (macro) F-score aggregation")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("eval", help="F-score of an answers file against truth")
    p.add_argument("--answers", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--macro", action="store_true")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("validate-dd", help="check a repository against its rules")
    p.add_argument("--repo", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--sample", type=int, default=None,
                   help="check a random subsample of this many rows")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_validate_dd)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
