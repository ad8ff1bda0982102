"""Command-line entry point tying the pipeline together.

Subcommands: ingest, xrd, train, tune, evaluate, optimize, explain, stats,
serve.  Every failure exits nonzero with a one-line diagnostic on stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import bundle as bundle_mod
from . import stats as stats_mod
from .data import (DEFAULT_SCHEMA, DataError, Dataset, OutlierPolicy, kfold_split,
                   normalize, parse_dataset, remove_outliers, serialize_dataset)
from .explain import explanation_csv, summarize, summary_csv
from .metrics import evaluate_cv
from .models import (GprConfig, LsBoostConfig, MlpConfig, config_from_dict)
from .swarm import PsoParams
from .tuning import lsboost_space, tune
from .xrd import analyze_curve, parse_curve, parse_windows


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _load_dataset(path: str) -> Dataset:
    return parse_dataset(_read(path), DEFAULT_SCHEMA)


def _model_config(args) -> object:
    if args.config:
        return config_from_dict(json.loads(_read(args.config)))
    if args.family == "lsboost":
        return LsBoostConfig(max_splits=args.splits, min_leaf=args.leaf,
                             cycles=args.cycles, rate=args.rate)
    if args.family == "gpr":
        return GprConfig(lengthscale=args.lengthscale,
                         noise_variance=args.noise_variance)
    return MlpConfig(width=args.width, epochs=args.epochs,
                     step_size=args.step_size, seed=args.seed)


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=("lsboost", "gpr", "mlp"), default="lsboost")
    p.add_argument("--config", help="JSON config file (overrides family flags)")
    p.add_argument("--splits", type=int, default=6, help="lsboost: max splits per tree")
    p.add_argument("--leaf", type=int, default=5, help="lsboost: min rows per leaf")
    p.add_argument("--cycles", type=int, default=250, help="lsboost: boosting cycles")
    p.add_argument("--rate", type=float, default=0.295, help="lsboost: learning rate")
    p.add_argument("--lengthscale", type=float, default=0.5, help="gpr kernel lengthscale")
    p.add_argument("--noise-variance", type=float, default=1e-4, help="gpr noise variance")
    p.add_argument("--width", type=int, default=8, help="mlp hidden width")
    p.add_argument("--epochs", type=int, default=2000, help="mlp training epochs")
    p.add_argument("--step-size", type=float, default=0.5, help="mlp gradient step")


def cmd_ingest(args) -> int:
    ds = _load_dataset(args.data)
    policy = OutlierPolicy.parse(args.policy)
    cleaned, report = remove_outliers(ds, policy)
    _write(args.out, serialize_dataset(cleaned))
    if args.report:
        _write(args.report, report.text() + ("\n" if report.entries else ""))
    print(f"ingested {ds.n} rows, kept {cleaned.n} "
          f"({len(report.removed_rows)} removed by {args.policy})")
    return 0


def cmd_xrd(args) -> int:
    curve = parse_curve(_read(args.curve))
    windows = parse_windows(_read(args.windows))
    report = analyze_curve(curve, windows, shape_factor=args.shape_factor,
                           wavelength_nm=args.wavelength)
    _write(args.out, report.to_text() + "\n")
    if args.fragment:
        _write(args.fragment, report.fragment_csv())
    print(f"fit {len(report.peaks)} peaks: avg crystal size "
          f"{report.avg_size_nm:.3f} nm, crystallinity index {report.ci_percent:.2f}%")
    return 0


def cmd_train(args) -> int:
    ds = _load_dataset(args.data)
    policy = OutlierPolicy.parse(args.policy)
    ds, removal = remove_outliers(ds, policy)
    config = _model_config(args)
    plan = kfold_split(ds.n, args.folds, args.seed)
    report = evaluate_cv(config, ds, plan)
    mb = bundle_mod.train_bundle(ds, config, background_seed=args.seed)
    bundle_mod.save_bundle(mb, args.out)
    _write(os.path.join(args.out, "eval_report.txt"), report.to_text() + "\n")
    _write(os.path.join(args.out, "eval_folds.csv"), report.to_csv())
    print(f"trained {len(mb.artifacts)} artifacts on {ds.n} rows "
          f"({len(removal.removed_rows)} outliers removed) -> {args.out}")
    print(report.to_text())
    return 0


def cmd_tune(args) -> int:
    ds = _load_dataset(args.data)
    ds, _ = remove_outliers(ds, OutlierPolicy.parse(args.policy))
    plan = kfold_split(ds.n, args.folds, args.seed)
    space = lsboost_space(max_cycles=args.max_cycles)
    pso = PsoParams(lower=(0.0,) * space.dim, upper=(1.0,) * space.dim,
                    swarm_size=args.swarm, iterations=args.iters, seed=args.seed)
    result = tune(ds, space, pso, plan, target=args.target)
    _write(args.out, json.dumps(result.best_config.to_dict(), indent=1) + "\n")
    if args.trace:
        _write(args.trace, "\n".join(e.line() for e in result.trace) + "\n")
    print(f"best config {result.best_config.to_dict()} "
          f"with mean test RMSE {result.best_objective:.5f} -> {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    ds = _load_dataset(args.data)
    ds, _ = remove_outliers(ds, OutlierPolicy.parse(args.policy))
    config = _model_config(args)
    plan = kfold_split(ds.n, args.folds, args.seed)
    report = evaluate_cv(config, ds, plan)
    print(report.to_text())
    if args.report:
        _write(args.report, report.to_text() + "\n")
    if args.csv:
        _write(args.csv, report.to_csv())
    return 0


def cmd_optimize(args) -> int:
    mb = bundle_mod.load_bundle(args.model)
    bounds = json.loads(_read(args.bounds)) if args.bounds else None
    out = bundle_mod.optimize_bundle(mb, bounds=bounds, swarm_size=args.swarm,
                                     iterations=args.iters,
                                     archive_capacity=args.capacity, seed=args.seed)
    _write(args.out, bundle_mod.pareto_csv(out, mb.schema))
    print(f"archive holds {len(out.solutions)} non-dominated solutions -> {args.out}")
    for key, (lo, hi) in out.objective_ranges.items():
        print(f"  {key}: {lo:.3f} .. {hi:.3f}")
    return 0


def cmd_explain(args) -> int:
    mb = bundle_mod.load_bundle(args.model)
    os.makedirs(args.out, exist_ok=True)
    if args.instance:
        features = json.loads(_read(args.instance))
        explanations = bundle_mod.explain_named(mb, features, seed=args.seed)
        for e in explanations:
            key = mb.schema.targets[list(mb.schema.target_names).index(e.target)].key
            _write(os.path.join(args.out, f"explain_{key}.csv"),
                   explanation_csv(e, mb.schema))
        print(f"wrote {len(explanations)} per-target explanations -> {args.out}")
        return 0
    ds = _load_dataset(args.data)
    rows = range(ds.n) if args.rows is None else [int(r) for r in args.rows.split(",")]
    all_expl = {key: [] for key in mb.target_keys}
    for i in rows:
        features = dict(zip(mb.schema.feature_keys, ds.samples[i].features))
        for e, key in zip(bundle_mod.explain_named(mb, features, seed=args.seed),
                          mb.target_keys):
            all_expl[key].append(e)
    for key, explanations in all_expl.items():
        summary = summarize(explanations, mb.schema)
        _write(os.path.join(args.out, f"summary_{key}.csv"), summary_csv(summary))
    print(f"wrote attribution summaries for {len(all_expl)} targets -> {args.out}")
    return 0


def cmd_stats(args) -> int:
    ds = _load_dataset(args.data)
    os.makedirs(args.out, exist_ok=True)
    corr = stats_mod.spearman_matrix(ds)
    _write(os.path.join(args.out, "spearman.csv"), corr.to_csv())
    pca_report = stats_mod.pca(ds, standardize=not args.no_standardize)
    _write(os.path.join(args.out, "pca_loadings.csv"), pca_report.to_loadings_csv())
    _write(os.path.join(args.out, "pca_fractions.csv"), pca_report.to_fractions_csv())
    written = ["spearman.csv", "pca_loadings.csv", "pca_fractions.csv"]
    for pair in args.kde_pair or []:
        a, b = pair.split(",")
        keys = [c.key for c in ds.schema.columns]
        m = ds.matrix()
        ia, ib = keys.index(a), keys.index(b)
        grid = stats_mod.kde2d(m[:, ia], m[:, ib])
        fname = f"kde_{a}_{b}.csv"
        _write(os.path.join(args.out, fname), grid.to_csv())
        written.append(fname)
    if args.response_pair:
        if not args.model:
            raise DataError("--response-pair needs --model")
        mb = bundle_mod.load_bundle(args.model)
        from .models import predict_many
        a, b = args.response_pair.split(",")
        fkeys = mb.schema.feature_keys
        ia, ib = fkeys.index(a), fkeys.index(b)
        norm, _ = normalize(Dataset(mb.schema, ds.samples))
        medians = np.median(norm.features(), axis=0)
        x_axis = np.linspace(0.0, 1.0, args.grid)
        for j, tkey in enumerate(mb.target_keys):
            art = mb.artifacts[tkey]
            surface = stats_mod.response_grid(
                lambda G: mb.scaling.inverse_target(j, predict_many(art, G)),
                medians, ia, ib, x_axis, x_axis)
            lines = [",".join(repr(float(v)) for v in row) for row in surface]
            fname = f"response_{a}_{b}_{tkey}.csv"
            _write(os.path.join(args.out, fname), "\n".join(lines) + "\n")
            written.append(fname)
    print(f"wrote {', '.join(written)} -> {args.out}")
    return 0


def cmd_serve(args) -> int:
    from .service import bind_address, serve

    host, port = bind_address(args.host, args.port)
    serve(args.model, host=host, port=port, optimize_budget=args.budget)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reformlab",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse, validate, and filter a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="removal report path")
    p.add_argument("--policy", default="iqr:1.5")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("xrd", help="fit peak windows of a digitized curve")
    p.add_argument("--curve", required=True)
    p.add_argument("--windows", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--fragment", help="dataset row fragment path")
    p.add_argument("--shape-factor", type=float, default=0.9)
    p.add_argument("--wavelength", type=float, default=0.15406)
    p.set_defaults(func=cmd_xrd)

    p = sub.add_parser("train", help="train five per-target artifacts")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--policy", default="iqr:1.5")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    _add_model_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tune", help="swarm-search boosted-tree hyperparameters")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trace")
    p.add_argument("--policy", default="iqr:1.5")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--swarm", type=int, default=8)
    p.add_argument("--iters", type=int, default=6)
    p.add_argument("--max-cycles", type=int, default=250)
    p.add_argument("--target", help="tune for one target name instead of all five")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("evaluate", help="cross-validated scores for one config")
    p.add_argument("--data", required=True)
    p.add_argument("--report")
    p.add_argument("--csv")
    p.add_argument("--policy", default="iqr:1.5")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    _add_model_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("optimize", help="multi-objective search over the feature box")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bounds", help="JSON file: {feature_key: [lo, hi], ...}")
    p.add_argument("--swarm", type=int, default=40)
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--capacity", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("explain", help="attribution values for instances or a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--instance", help="JSON file with 11 named feature values")
    p.add_argument("--data", help="dataset to summarize")
    p.add_argument("--rows", help="comma-separated row indices (default: all)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("stats", help="correlation matrix, components, densities")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-standardize", action="store_true")
    p.add_argument("--kde-pair", action="append",
                   help="column key pair 'a,b'; repeatable")
    p.add_argument("--response-pair", help="feature key pair for model response grids")
    p.add_argument("--model", help="model dir for --response-pair")
    p.add_argument("--grid", type=int, default=41)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the prediction service")
    p.add_argument("--model", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--budget", type=int, default=40_000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # one-line diagnostic, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
