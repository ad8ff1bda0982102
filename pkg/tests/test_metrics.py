import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reformlab.data import DEFAULT_SCHEMA, Dataset, kfold_split
from reformlab.metrics import MetricError, evaluate_cv, mae, r2, rmse
from reformlab.models import LsBoostConfig
from reformlab.rng import default_rng

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def test_r2_examples():
    y = [1.0, 2.0, 3.0]
    assert r2(y, y) == 1.0
    assert r2(y, [2.0, 2.0, 2.0]) == 0.0
    assert r2(y, [1.0, 2.0, 4.0]) == pytest.approx(0.5, abs=1e-12)


def test_r2_constant_y_errors():
    with pytest.raises(MetricError):
        r2([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])


def test_mae_rmse_examples():
    y = [1.0, 2.0, 3.0]
    yhat = [1.0, 2.0, 4.0]
    assert mae(y, y) == 0.0 and rmse(y, y) == 0.0
    assert mae(y, yhat) == pytest.approx(1 / 3, abs=1e-12)
    assert rmse(y, yhat) == pytest.approx(math.sqrt(1 / 3), abs=1e-12)


def test_constant_error_makes_mae_equal_rmse():
    y = np.array([3.0, 7.0, -1.0, 4.0])
    assert mae(y, y + 2.5) == pytest.approx(rmse(y, y + 2.5), abs=1e-12)


def test_length_mismatch():
    with pytest.raises(MetricError):
        mae([1.0], [1.0, 2.0])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(finite_floats, finite_floats), min_size=1, max_size=40))
def test_rmse_at_least_mae(pairs):
    y = [p[0] for p in pairs]
    yhat = [p[1] for p in pairs]
    assert rmse(y, yhat) >= mae(y, yhat) - 1e-9 * max(1.0, rmse(y, yhat))


@settings(max_examples=40, deadline=None)
@given(finite_floats)
def test_shift_invariance(c):
    y = np.array([1.0, 4.0, 2.0, 8.0])
    yhat = np.array([1.5, 3.0, 2.5, 7.0])
    assert mae(y + c, yhat + c) == pytest.approx(mae(y, yhat), rel=1e-9, abs=1e-9)
    assert rmse(y + c, yhat + c) == pytest.approx(rmse(y, yhat), rel=1e-9, abs=1e-9)
    if np.ptp(y) > 0:
        assert r2(y + c, yhat + c) == pytest.approx(r2(y, yhat), rel=1e-9, abs=1e-9)


def _linear_dataset(n=120, seed=0):
    rng = default_rng(seed)
    lo = np.array([c.lo for c in DEFAULT_SCHEMA.features])
    hi = np.array([c.hi for c in DEFAULT_SCHEMA.features])
    X = rng.uniform(lo, hi, size=(n, 11))
    U = (X - lo) / (hi - lo)
    base = 20.0 + 50.0 * U[:, 8] + 25.0 * U[:, 6]
    Y = np.column_stack([base, base * 0.9, 40.0 * U[:, 6] + 10.0,
                         20.0 * U[:, 8] + 3.0, 15.0 * U[:, 9] + 2.0])
    return Dataset.from_arrays(DEFAULT_SCHEMA, X, Y)


def test_evaluate_cv_learns_linear_target():
    ds = _linear_dataset()
    plan = kfold_split(ds.n, 5, seed=0)
    report = evaluate_cv(LsBoostConfig(max_splits=4, min_leaf=3, cycles=60, rate=0.3),
                         ds, plan)
    for t in report.target_names:
        assert report.mean(t, "test", "r2") > 0.9
    # RMSE >= MAE in every recorded fold
    for t in report.target_names:
        for phase in ("train", "test"):
            for s in report.phase(phase)[t]:
                assert s.rmse >= s.mae - 1e-12


def test_evaluate_cv_leave_one_out():
    ds = _linear_dataset(n=10, seed=3)
    plan = kfold_split(10, 10, seed=0)
    report = evaluate_cv(LsBoostConfig(max_splits=2, min_leaf=2, cycles=10, rate=0.5),
                         ds, plan)
    t = report.target_names[0]
    test_scores = report.phase("test")[t]
    assert all(s.r2 is None for s in test_scores)  # undefined on size-1 folds
    assert all(np.isfinite(s.mae) for s in test_scores)
    assert report.mean(t, "test", "r2") is None
    assert report.mean(t, "test", "mae") is not None


def test_evaluate_cv_reproducible():
    ds = _linear_dataset(n=60, seed=5)
    plan = kfold_split(ds.n, 4, seed=2)
    config = LsBoostConfig(max_splits=3, min_leaf=2, cycles=15, rate=0.4)
    a = evaluate_cv(config, ds, plan)
    b = evaluate_cv(config, ds, plan)
    for t in a.target_names:
        for phase in ("train", "test"):
            assert a.phase(phase)[t] == b.phase(phase)[t]


def test_evaluate_cv_report_renders():
    ds = _linear_dataset(n=40, seed=6)
    plan = kfold_split(ds.n, 3, seed=1)
    report = evaluate_cv(LsBoostConfig(max_splits=2, min_leaf=2, cycles=8, rate=0.5),
                         ds, plan)
    text = report.to_text()
    assert "Toluene conversion (%)" in text and "test" in text
    csv_text = report.to_csv()
    assert csv_text.startswith("target,phase,fold,r2,mae,rmse")
    assert len(csv_text.splitlines()) == 1 + 5 * 2 * 3
