import math

import numpy as np
import pytest

from reformlab.data import DEFAULT_SCHEMA, Dataset, kfold_split
from reformlab.metrics import evaluate_cv
from reformlab.models import LsBoostConfig
from reformlab.rng import default_rng
from reformlab.swarm import PsoParams
from reformlab.tuning import (CATEGORICAL, FLOAT, INT, ParamSpec, SearchSpace,
                              SearchSpaceError, decode, encode, tune)


def unit_pso(dim, swarm=4, iters=3, seed=0):
    return PsoParams(lower=(0.0,) * dim, upper=(1.0,) * dim,
                     swarm_size=swarm, iterations=iters, seed=seed)


def small_dataset(n=50, seed=0):
    rng = default_rng(seed)
    lo = np.array([c.lo for c in DEFAULT_SCHEMA.features])
    hi = np.array([c.hi for c in DEFAULT_SCHEMA.features])
    X = rng.uniform(lo, hi, size=(n, 11))
    U = (X - lo) / (hi - lo)
    step = np.where(U[:, 8] > 0.5, 80.0, 20.0)  # depth-1 rule on temperature
    Y = np.column_stack([step, step * 0.8 + 5, 30 * U[:, 6] + 5,
                         10 * U[:, 6] + 5, 8 * U[:, 9] + 3])
    return Dataset.from_arrays(DEFAULT_SCHEMA, X, Y)


# ---------------------------------------------------------------- decode

def test_decode_integer_endpoints():
    spec = ParamSpec("cycles", INT, 1, 250)
    assert spec.decode(0.0) == 1
    assert spec.decode(1.0) == 250


def test_decode_rate_affine_rule():
    spec = ParamSpec("rate", FLOAT, 0.001, 1.0)
    assert spec.decode(0.5) == pytest.approx(0.5005, abs=1e-12)


def test_decode_categorical_and_clamping():
    spec = ParamSpec("activation", CATEGORICAL, choices=("tanh", "logistic"))
    assert spec.decode(0.0) == "tanh"
    assert spec.decode(0.99) == "logistic"
    assert spec.decode(1.0) == "logistic"  # endpoint clamps into range
    assert ParamSpec("cycles", INT, 1, 9).decode(2.5) == 9


def test_decode_yields_valid_config():
    space = SearchSpace("lsboost", (
        ParamSpec("max_splits", INT, 1, 6),
        ParamSpec("min_leaf", INT, 2, 8),
        ParamSpec("cycles", INT, 5, 50),
        ParamSpec("rate", FLOAT, 0.05, 0.5),
    ))
    config = decode([0.3, 0.7, 0.2, 0.9], space)
    assert isinstance(config, LsBoostConfig)


def test_decode_encode_identity():
    space = SearchSpace("lsboost", (
        ParamSpec("max_splits", INT, 0, 8),
        ParamSpec("min_leaf", INT, 1, 9),
        ParamSpec("cycles", INT, 10, 210),
        ParamSpec("rate", FLOAT, 0.1, 0.9),
    ))
    config = LsBoostConfig(max_splits=4, min_leaf=5, cycles=110, rate=0.5)
    assert decode(encode(config, space), space) == config


def test_space_validation():
    with pytest.raises(SearchSpaceError):
        SearchSpace("lsboost", ())
    with pytest.raises(SearchSpaceError):
        ParamSpec("x", "enum")
    with pytest.raises(SearchSpaceError):
        ParamSpec("x", FLOAT, 2.0, 1.0)


# ---------------------------------------------------------------- tune

def paper_pinned_space():
    return SearchSpace("lsboost", (
        ParamSpec("max_splits", INT, 6, 6),
        ParamSpec("min_leaf", INT, 5, 5),
        ParamSpec("cycles", INT, 250, 250),
        ParamSpec("rate", FLOAT, 0.295, 0.295),
    ))


def test_tune_singleton_space_returns_pinned_config():
    ds = small_dataset(40, seed=1)
    plan = kfold_split(ds.n, 3, seed=0)
    space = paper_pinned_space()
    result = tune(ds, space, unit_pso(space.dim, swarm=2, iters=1), plan)
    assert result.best_config == LsBoostConfig(6, 5, 250, 0.295)


def test_tune_beats_constant_baseline_on_step_data():
    ds = small_dataset(60, seed=2)
    plan = kfold_split(ds.n, 3, seed=0)
    space = SearchSpace("lsboost", (
        ParamSpec("max_splits", INT, 0, 6),
        ParamSpec("min_leaf", INT, 2, 2),
        ParamSpec("cycles", INT, 10, 10),
        ParamSpec("rate", FLOAT, 1.0, 1.0),
    ))
    result = tune(ds, space, unit_pso(space.dim, swarm=6, iters=4, seed=1), plan)
    baseline = evaluate_cv(LsBoostConfig(0, 2, 10, 1.0), ds, plan)
    baseline_rmse = float(np.mean([baseline.mean(t, "test", "rmse")
                                   for t in baseline.target_names]))
    assert result.best_config.max_splits >= 1
    assert result.best_objective < baseline_rmse


def test_tune_trace_audit_and_cache():
    ds = small_dataset(40, seed=3)
    plan = kfold_split(ds.n, 3, seed=0)
    space = SearchSpace("lsboost", (
        ParamSpec("max_splits", INT, 1, 3),
        ParamSpec("min_leaf", INT, 2, 4),
        ParamSpec("cycles", INT, 5, 15),
        ParamSpec("rate", FLOAT, 0.2, 0.6),
    ))
    result = tune(ds, space, unit_pso(space.dim, swarm=5, iters=3, seed=2), plan)
    assert result.best_objective == min(e.objective for e in result.trace)
    by_config = {}
    for e in result.trace:
        key = tuple(sorted(e.config.items()))
        by_config.setdefault(key, set()).add(e.objective)
    assert all(len(v) == 1 for v in by_config.values())  # dedupe is consistent
    assert any(e.cached for e in result.trace)  # integer plateaus hit the cache


def test_tune_failures_score_infinite_but_do_not_abort():
    ds = small_dataset(24, seed=4)
    plan = kfold_split(ds.n, 3, seed=0)
    # min_leaf up to 40 -> many candidates cannot train on 16-row folds
    space = SearchSpace("lsboost", (
        ParamSpec("max_splits", INT, 1, 2),
        ParamSpec("min_leaf", INT, 2, 40),
        ParamSpec("cycles", INT, 5, 5),
        ParamSpec("rate", FLOAT, 0.5, 0.5),
    ))
    result = tune(ds, space, unit_pso(space.dim, swarm=8, iters=3, seed=0), plan)
    assert math.isfinite(result.best_objective)
    assert any(math.isinf(e.objective) for e in result.trace)
    assert result.best_config.min_leaf <= 8


def test_tune_single_target_mode():
    ds = small_dataset(40, seed=5)
    plan = kfold_split(ds.n, 3, seed=0)
    space = paper_pinned_space()
    result = tune(ds, space, unit_pso(space.dim, swarm=2, iters=1), plan,
                  target="H2 (mol%)")
    assert result.best_objective == result.report.mean("H2 (mol%)", "test", "rmse")
    with pytest.raises(SearchSpaceError):
        tune(ds, space, unit_pso(space.dim, swarm=2, iters=1), plan, target="He (mol%)")
