"""Command-line runner for the figures, the theorem sweep and estimator runs.

Exit codes: 0 success, 1 usage or configuration error, 2 the theorem sweep
found a case where sufficiency and inheritance disagree.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .binormal import (
    coefficients,
    figure1_curves,
    figure2_curve,
    posterior,
    sample_source,
    sample_target_cs,
    sample_target_pps,
)
from .config import DEFAULTS, ConfigError, RunConfig
from .errors import UninformativeClassifierError
from .estimators import (
    EstimatorReport,
    ThresholdClassifier,
    acc_estimate,
    cc_estimate,
    discretized_estimate,
    mean_matching_estimate,
    pa_estimate,
)
from .finite_space import sweep_theorem1
from .probing import (
    FAMILIES,
    AnalyticBinormalLoss,
    CostGrid,
    EmpiricalLoss,
    estimate_prior,
    fit_ensemble,
    refine,
)
from .samples import LabeledSample, read_sample

EXIT_OK, EXIT_USAGE, EXIT_FALSIFIED = 0, 1, 2


def fmt(x: float) -> str:
    return f"{x:.10g}"


def write_csv(path: Path, header: str, rows, cfg: RunConfig):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")
        fh.write(f"# seed={cfg.seed} version={__version__}\n")


def cmd_figure1(cfg: RunConfig) -> int:
    rows = figure1_curves(cfg.params, cfg.grid("figure1", "q_min", "q_max", "q_step"), cfg.quad)
    path = cfg.out / "figure1.csv"
    write_csv(path, "q,pps_estimate,cs_estimate",
              (f"{fmt(r.q)},{fmt(r.pps_estimate)},{fmt(r.cs_estimate)}" for r in rows), cfg)
    print(f"wrote {len(rows)} rows to {path}")
    return EXIT_OK


def cmd_figure2(cfg: RunConfig) -> int:
    rows = figure2_curve(cfg.params, cfg.grid("figure2", "x_min", "x_max", "x_step"), cfg.quad)
    path = cfg.out / "figure2.csv"
    write_csv(path, "x,pseudo_prior,true_prior",
              (f"{fmt(r.x)},{fmt(r.pseudo_prior)},{fmt(r.true_prior)}" for r in rows), cfg)
    print(f"wrote {len(rows)} rows to {path}; true prior {rows[0].true_prior:.6f}, "
          f"max pseudo prior {max(r.pseudo_prior for r in rows):.6f}")
    return EXIT_OK


def cmd_theorem_check(cfg: RunConfig) -> int:
    rows = list(sweep_theorem1(max_size=cfg["theorem.max_size"], n_instances=cfg["theorem.n_instances"],
                               n_random=cfg["theorem.n_random"], seed=cfg.seed, tol=cfg["tol.predicate"]))
    path = cfg.out / "verdicts.csv"
    b = lambda v: str(v).lower()
    write_csv(path, "n,sufficient,inherited,agree,label",
              (f"{r.n},{b(r.sufficient)},{b(r.inherited)},{b(r.agree)},{r.label}" for r in rows), cfg)
    bad = [r for r in rows if not r.agree]
    n_suff = sum(r.sufficient for r in rows)
    print(f"{len(rows)} cases ({n_suff} sufficient, {len(rows) - n_suff} not); "
          f"{len(bad)} disagreements; wrote {path}")
    if bad:
        for r in bad[:10]:
            print(f"DISAGREEMENT n={r.n} {r.label}: sufficient={r.sufficient} inherited={r.inherited}",
                  file=sys.stderr)
        return EXIT_FALSIFIED
    return EXIT_OK


def _bayes_half_classifier(cfg: RunConfig) -> ThresholdClassifier:
    a, b = coefficients(cfg.params)
    return ThresholdClassifier(-b / a)  # {posterior > 1/2}


def _threshold_from(cfg: RunConfig) -> ThresholdClassifier:
    raw = cfg["estimate.threshold"]
    if raw == "auto":
        return _bayes_half_classifier(cfg)
    try:
        return ThresholdClassifier(float(raw))
    except ValueError:
        raise ConfigError(f"estimate.threshold: cannot read {raw!r}") from None


def cmd_probing(cfg: RunConfig) -> int:
    params = cfg.params
    family = cfg["probing.family"]
    if family not in FAMILIES:
        raise ConfigError(f"probing.family must be one of {FAMILIES}")
    seeds = np.random.SeedSequence(cfg.seed).spawn(3)
    source = sample_source(params, cfg["probing.n_source"], seeds[0])
    q = cfg["probing.pps_q"]
    targets = {
        "cs": sample_target_cs(params, cfg["probing.n_target"], seeds[1]),
        "pps": sample_target_pps(params, q, cfg["probing.n_target"], seeds[2]),
    }
    grid = CostGrid.uniform(cfg["probing.grid_n"], cfg["probing.t_max"])
    src = EmpiricalLoss(source) if family == "empirical-threshold" else AnalyticBinormalLoss(params)
    refined = refine(fit_ensemble(grid, src, family), src, cfg["probing.max_iter"])
    clf = _bayes_half_classifier(cfg)
    post = lambda x: posterior(x, params)

    rows = []
    for name, target in targets.items():
        result = estimate_prior(refined.ensemble, target, src=src,
                                iterations=refined.iterations, converged=refined.converged)
        write_csv(cfg.out / f"probing_result_{name}.csv", result.CSV_HEADER, [result.csv_row()], cfg)
        if cfg["probing.dump"]:
            write_csv(cfg.out / f"probing_dump_{name}.csv", result.DUMP_HEADER, result.dump_rows(), cfg)
        reports = [
            EstimatorReport(result.estimate, "probing", len(target),
                            {"raw": result.estimate, "clipped": False}),
            pa_estimate(post, target),
            cc_estimate(clf, target),
            acc_estimate(clf, source, target),
            mean_matching_estimate(params, target),
            discretized_estimate(params, cfg["probing.split_x"], target),
        ]
        rows.extend(f"{name},{r.csv_row()}" for r in reports)
        print(f"{name}: " + ", ".join(f"{r.method}={r.estimate:.4f}" for r in reports))
    write_csv(cfg.out / "probing.csv", "target," + EstimatorReport.CSV_HEADER, rows, cfg)
    return EXIT_OK


def cmd_estimate(cfg: RunConfig) -> int:
    method = cfg["estimate.method"]
    if not cfg["estimate.target"]:
        raise ConfigError("estimate needs a target sample file (--target)")
    try:
        target = read_sample(cfg["estimate.target"])
        source = read_sample(cfg["estimate.source"]) if cfg["estimate.source"] else None
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    target = target.unlabeled() if isinstance(target, LabeledSample) else target
    params = cfg.params
    if method == "pa":
        report = pa_estimate(lambda x: posterior(x, params), target)
    elif method == "cc":
        report = cc_estimate(_threshold_from(cfg), target)
    elif method == "acc":
        if not isinstance(source, LabeledSample):
            raise ConfigError("acc needs a labeled source sample file (--source)")
        report = acc_estimate(_threshold_from(cfg), source, target)
    elif method == "mean_matching":
        report = mean_matching_estimate(params, target)
    elif method == "discretized":
        report = discretized_estimate(params, cfg["probing.split_x"], target)
    elif method == "probing":
        grid = CostGrid.uniform(cfg["probing.grid_n"], cfg["probing.t_max"])
        family = cfg["probing.family"]
        if family == "empirical-threshold":
            if not isinstance(source, LabeledSample):
                raise ConfigError("empirical probing needs a labeled source sample file (--source)")
            src = EmpiricalLoss(source)
        else:
            src = AnalyticBinormalLoss(params)
        refined = refine(fit_ensemble(grid, src, family), src, cfg["probing.max_iter"])
        res = estimate_prior(refined.ensemble, target)
        report = EstimatorReport(res.estimate, "probing", len(target), {"raw": res.estimate, "clipped": False})
    else:
        raise ConfigError(f"unknown estimate.method {method!r}")
    write_csv(cfg.out / "estimate.csv", EstimatorReport.CSV_HEADER, [report.csv_row()], cfg)
    print(report.csv_row())
    return EXIT_OK


COMMANDS = {
    "figure1": cmd_figure1,
    "figure2": cmd_figure2,
    "theorem-check": cmd_theorem_check,
    "probing": cmd_probing,
    "estimate": cmd_estimate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat 'key = value' config file")
    common.add_argument("--seed", type=int, help="unsigned 64-bit seed")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any config key (repeatable)")
    keys = common.add_argument_group("config keys")
    for key in DEFAULTS:
        if key not in ("seed", "out"):
            keys.add_argument(f"--{key}", dest=f"key:{key}", metavar="V")

    parser = argparse.ArgumentParser(prog="covshift", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "estimate":
            p.add_argument("--method", dest="key:estimate.method",
                           choices=["pa", "cc", "acc", "mean_matching", "discretized", "probing"])
            p.add_argument("--source", dest="key:estimate.source", metavar="FILE")
            p.add_argument("--target", dest="key:estimate.target", metavar="FILE")
            p.add_argument("--threshold", dest="key:estimate.threshold", metavar="X")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    overrides = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            print(f"error: --set expects KEY=VALUE, got {item!r}", file=sys.stderr)
            return EXIT_USAGE
        overrides[key.strip()] = value
    for dest, value in vars(args).items():
        if dest.startswith("key:") and value is not None:
            overrides[dest[4:]] = value
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.out is not None:
        overrides["out"] = args.out
    try:
        cfg = RunConfig.build(args.config, overrides)
        return COMMANDS[args.command](cfg)
    except (ConfigError, UninformativeClassifierError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
