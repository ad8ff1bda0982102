"""Prediction scoring (R², MAE, RMSE) and cross-validated evaluation."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, FoldPlan, normalize


class MetricError(ValueError):
    pass


def _pair(y, yhat) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=float).ravel()
    yhat = np.asarray(yhat, dtype=float).ravel()
    if y.size != yhat.size:
        raise MetricError(f"length mismatch: {y.size} vs {yhat.size}")
    if y.size == 0:
        raise MetricError("empty inputs")
    return y, yhat


def r2(y, yhat) -> float:
    """Coefficient of determination 1 - SS_res/SS_tot; undefined for constant y."""
    y, yhat = _pair(y, yhat)
    if y.size < 2:
        raise MetricError("r2 needs at least 2 points")
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise MetricError("r2 undefined for constant y")
    return 1.0 - float(np.sum((y - yhat) ** 2)) / ss_tot


def mae(y, yhat) -> float:
    y, yhat = _pair(y, yhat)
    return float(np.mean(np.abs(y - yhat)))


def rmse(y, yhat) -> float:
    y, yhat = _pair(y, yhat)
    return float(np.sqrt(np.mean((y - yhat) ** 2)))


@dataclass(frozen=True)
class FoldScore:
    """Scores for one fold and phase; r2 is None where undefined (size-1 fold
    or constant truth)."""

    r2: float | None
    mae: float
    rmse: float


@dataclass
class EvalReport:
    """Per-target, per-fold scores for the train and test phases."""

    target_names: tuple[str, ...]
    k: int
    train: dict[str, list[FoldScore]] = field(default_factory=dict)
    test: dict[str, list[FoldScore]] = field(default_factory=dict)

    def phase(self, name: str) -> dict[str, list[FoldScore]]:
        if name not in ("train", "test"):
            raise MetricError(f"unknown phase {name!r}")
        return self.train if name == "train" else self.test

    def scores(self, target: str, phase: str, metric: str) -> list[float | None]:
        return [getattr(s, metric) for s in self.phase(phase)[target]]

    def mean(self, target: str, phase: str, metric: str) -> float | None:
        vals = [v for v in self.scores(target, phase, metric) if v is not None]
        return float(np.mean(vals)) if vals else None

    def std(self, target: str, phase: str, metric: str) -> float | None:
        vals = [v for v in self.scores(target, phase, metric) if v is not None]
        return float(np.std(vals)) if vals else None

    def to_text(self) -> str:
        lines = [f"{'target':<32}{'phase':<7}{'R2':>10}{'MAE':>12}{'RMSE':>12}"]
        for t in self.target_names:
            for phase in ("train", "test"):
                m_r2 = self.mean(t, phase, "r2")
                lines.append(
                    f"{t:<32}{phase:<7}"
                    f"{('n/a' if m_r2 is None else f'{m_r2:.4f}'):>10}"
                    f"{self.mean(t, phase, 'mae'):>12.5f}"
                    f"{self.mean(t, phase, 'rmse'):>12.5f}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        """Structured-document form of the report."""
        def pack(scores: list[FoldScore]) -> list[dict]:
            return [{"r2": s.r2, "mae": s.mae, "rmse": s.rmse} for s in scores]

        return {"k": self.k, "targets": list(self.target_names),
                "train": {t: pack(v) for t, v in self.train.items()},
                "test": {t: pack(v) for t, v in self.test.items()}}

    def to_csv(self) -> str:
        """Per-fold score rows (violin-plot source data)."""
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["target", "phase", "fold", "r2", "mae", "rmse"])
        for t in self.target_names:
            for phase in ("train", "test"):
                for f, s in enumerate(self.phase(phase)[t]):
                    w.writerow([t, phase, f,
                                "" if s.r2 is None else repr(s.r2),
                                repr(s.mae), repr(s.rmse)])
        return out.getvalue()


def _score(y: np.ndarray, yhat: np.ndarray) -> FoldScore:
    try:
        r = r2(y, yhat)
    except MetricError:
        r = None
    return FoldScore(r, mae(y, yhat), rmse(y, yhat))


def evaluate_cv(config, dataset: Dataset, plan: FoldPlan) -> EvalReport:
    """Train one model per target on each fold's complement and score both
    phases.  Data is normalized to [0,1] once, so MAE/RMSE are reported in
    normalized units; R² is scale-free.
    """
    from .models import train, predict_many

    if plan.n != dataset.n:
        raise MetricError(f"fold plan covers {plan.n} rows, dataset has {dataset.n}")
    norm, _ = normalize(dataset)
    X, Y = norm.features(), norm.targets()
    report = EvalReport(dataset.schema.target_names, plan.k)
    for t, name in enumerate(dataset.schema.target_names):
        report.train[name] = []
        report.test[name] = []
        for f in range(plan.k):
            tr = np.array(plan.train_indices(f), dtype=int)
            te = np.array(plan.test_indices(f), dtype=int)
            art = train(config, X[tr], Y[tr, t])
            report.train[name].append(_score(Y[tr, t], predict_many(art, X[tr])))
            report.test[name].append(_score(Y[te, t], predict_many(art, X[te])))
    return report
