#!/usr/bin/env python3
"""End-to-end desk-scale experiment: generate data, tune the boosted-tree
model with the swarm, train the five-artifact bundle, search the Pareto
front, and summarize attributions.  Prints timings per stage."""
import argparse
import os
import time

import numpy as np

from reformlab.bundle import (explain_named, optimize_bundle, pareto_csv,
                              save_bundle, train_bundle)
from reformlab.data import kfold_split
from reformlab.explain import summarize
from reformlab.swarm import PsoParams
from reformlab.synth import synthetic_dataset
from reformlab.tuning import FLOAT, INT, ParamSpec, SearchSpace, tune


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=600)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--swarm", type=int, default=5)
    parser.add_argument("--iters", type=int, default=4)
    parser.add_argument("--out", default="benchmark_out")
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)

    t0 = time.time()
    ds = synthetic_dataset(args.rows, seed=args.seed)
    plan = kfold_split(ds.n, 5, seed=args.seed)
    print(f"[{time.time()-t0:7.1f}s] generated {ds.n} rows")

    space = SearchSpace("lsboost", (
        ParamSpec("max_splits", INT, 2, 8),
        ParamSpec("min_leaf", INT, 2, 8),
        ParamSpec("cycles", INT, 30, 100),
        ParamSpec("rate", FLOAT, 0.05, 0.45),
    ))
    pso = PsoParams(lower=(0.0,) * 4, upper=(1.0,) * 4, swarm_size=args.swarm,
                    iterations=args.iters, seed=args.seed)
    result = tune(ds, space, pso, plan)
    print(f"[{time.time()-t0:7.1f}s] tuned: {result.best_config.to_dict()}")
    for t in result.report.target_names:
        print(f"    {t}: test R2 {result.report.mean(t, 'test', 'r2'):.4f} "
              f"RMSE {result.report.mean(t, 'test', 'rmse'):.5f}")

    bundle = train_bundle(ds, result.best_config)
    save_bundle(bundle, os.path.join(args.out, "model"))
    print(f"[{time.time()-t0:7.1f}s] trained bundle -> {args.out}/model")

    outcome = optimize_bundle(bundle, swarm_size=40, iterations=150, seed=args.seed)
    with open(os.path.join(args.out, "pareto.csv"), "w", encoding="utf-8") as fh:
        fh.write(pareto_csv(outcome, bundle.schema))
    print(f"[{time.time()-t0:7.1f}s] {len(outcome.solutions)} non-dominated solutions")
    for key, (lo, hi) in outcome.objective_ranges.items():
        print(f"    {key}: {lo:.2f} .. {hi:.2f}")

    rng = np.random.default_rng(args.seed)
    rows = rng.choice(ds.n, size=32, replace=False)
    per_target = {k: [] for k in bundle.target_keys}
    for i in rows:
        features = dict(zip(bundle.schema.feature_keys, ds.samples[int(i)].features))
        for key, e in zip(bundle.target_keys, explain_named(bundle, features)):
            per_target[key].append(e)
    for key, explanations in per_target.items():
        s = summarize(explanations, bundle.schema)
        top = s.ranked_names()[:3]
        print(f"    {key}: top features {', '.join(top)}; "
              f"operating {s.group_percent['operating-condition']:.1f}% / "
              f"catalyst {s.group_percent['catalyst-property']:.1f}%")
    print(f"[{time.time()-t0:7.1f}s] done")


if __name__ == "__main__":
    main()
