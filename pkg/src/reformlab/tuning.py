"""Swarm-driven hyperparameter search: a configuration space encoded as a
unit box, scored by mean cross-validated test RMSE."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .data import Dataset, FoldPlan
from .metrics import EvalReport, evaluate_cv
from .models import RegressorConfig, config_from_dict
from .swarm import PsoParams, pso_minimize

log = logging.getLogger(__name__)

INT = "int"
FLOAT = "float"
CATEGORICAL = "categorical"


class SearchSpaceError(ValueError):
    pass


@dataclass(frozen=True)
class ParamSpec:
    """One hyperparameter: continuous range, integer range, or categorical set.

    Unit-interval points map through lo + p*(hi - lo); integer ranges round
    to the nearest integer and categorical points index into choices.
    A spec with lo == hi (or one choice) pins the parameter.
    """

    name: str
    kind: str
    lo: float = 0.0
    hi: float = 0.0
    choices: tuple = ()

    def __post_init__(self):
        if self.kind not in (INT, FLOAT, CATEGORICAL):
            raise SearchSpaceError(f"unknown parameter kind {self.kind!r}")
        if self.kind == CATEGORICAL:
            if not self.choices:
                raise SearchSpaceError(f"{self.name}: categorical needs choices")
        elif self.lo > self.hi:
            raise SearchSpaceError(f"{self.name}: lo must not exceed hi")

    def decode(self, p: float) -> object:
        p = min(max(p, 0.0), 1.0)
        if self.kind == CATEGORICAL:
            return self.choices[min(int(p * len(self.choices)), len(self.choices) - 1)]
        raw = self.lo + p * (self.hi - self.lo)
        if self.kind == INT:
            return int(math.floor(raw + 0.5))
        return raw

    def encode(self, value) -> float:
        if self.kind == CATEGORICAL:
            return (self.choices.index(value) + 0.5) / len(self.choices)
        if self.hi == self.lo:
            return 0.0
        return (float(value) - self.lo) / (self.hi - self.lo)


@dataclass(frozen=True)
class SearchSpace:
    family: str
    params: tuple[ParamSpec, ...]

    def __post_init__(self):
        if not self.params:
            raise SearchSpaceError("search space must not be empty")
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise SearchSpaceError("duplicate parameter names in search space")

    @property
    def dim(self) -> int:
        return len(self.params)


def decode(point: Sequence[float], space: SearchSpace) -> RegressorConfig:
    """Map a unit-box point to a valid configuration (out-of-box coordinates
    are clamped, never rejected)."""
    values = {spec.name: spec.decode(float(p)) for spec, p in zip(space.params, point)}
    values["family"] = space.family
    return config_from_dict(values)


def encode(config: RegressorConfig, space: SearchSpace) -> np.ndarray:
    d = config.to_dict()
    return np.array([spec.encode(d[spec.name]) for spec in space.params])


#: Search box used by the command-line tuner for the boosted-tree family.
def lsboost_space(max_cycles: int = 250) -> SearchSpace:
    return SearchSpace("lsboost", (
        ParamSpec("max_splits", INT, 1, 8),
        ParamSpec("min_leaf", INT, 2, 10),
        ParamSpec("cycles", INT, 20, max_cycles),
        ParamSpec("rate", FLOAT, 0.02, 0.5),
    ))


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    config: dict
    objective: float
    cached: bool

    def line(self) -> str:
        cfg = " ".join(f"{k}={v}" for k, v in sorted(self.config.items()))
        tag = " (cached)" if self.cached else ""
        return f"eval {self.iteration}: {cfg} -> {self.objective!r}{tag}"


@dataclass
class TuneResult:
    best_config: RegressorConfig
    best_objective: float
    report: EvalReport
    trace: list[TraceEntry] = field(default_factory=list)


def _objective_from_report(report: EvalReport, target: str | None) -> float:
    names = [target] if target else list(report.target_names)
    vals = [report.mean(t, "test", "rmse") for t in names]
    return float(np.mean(vals))


def tune(dataset: Dataset, space: SearchSpace, pso_params: PsoParams,
         plan: FoldPlan, target: str | None = None) -> TuneResult:
    """Search the space with the single-objective swarm; candidates score by
    mean test RMSE over folds (normalized units), averaged across the five
    targets unless one target is selected.  A failed training scores +inf and
    the search continues."""
    if pso_params.dim != space.dim:
        raise SearchSpaceError(
            f"swarm box has {pso_params.dim} dimensions, space has {space.dim}")
    if target is not None and target not in dataset.schema.target_names:
        raise SearchSpaceError(f"unknown target {target!r}")

    cache: dict[tuple, tuple[float, EvalReport | None]] = {}
    trace: list[TraceEntry] = []
    counter = {"n": 0}

    def objective(point: np.ndarray) -> float:
        config = decode(point, space)
        key = tuple(sorted(config.to_dict().items()))
        cached = key in cache
        if not cached:
            try:
                report = evaluate_cv(config, dataset, plan)
                value = _objective_from_report(report, target)
            except Exception as exc:  # training failures are not fatal
                log.warning("candidate %s failed: %s", dict(key), exc)
                value, report = math.inf, None
            cache[key] = (value, report)
        value, _ = cache[key]
        counter["n"] += 1
        trace.append(TraceEntry(counter["n"], dict(key), value, cached))
        return value

    result = pso_minimize(objective, pso_params)
    best_config = decode(result.best_position, space)
    key = tuple(sorted(best_config.to_dict().items()))
    best_value, report = cache[key]
    if report is None:  # every evaluation failed
        raise SearchSpaceError("no candidate configuration trained successfully")
    return TuneResult(best_config, best_value, report, trace)
