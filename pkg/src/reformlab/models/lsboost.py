"""Least-squares boosted tree ensemble: F_m = F_{m-1} + rate * tree_m where
each tree fits the current residuals by greedy variance-reduction splits."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .trees import Tree, build_tree


class TrainingError(ValueError):
    pass


@dataclass(frozen=True)
class LsBoostConfig:
    max_splits: int = 6
    min_leaf: int = 5
    cycles: int = 250
    rate: float = 0.295

    family = "lsboost"

    def __post_init__(self):
        if self.max_splits < 0:
            raise TrainingError(f"max_splits must be >= 0, got {self.max_splits}")
        if self.min_leaf < 1 or self.cycles < 1:
            raise TrainingError("min_leaf and cycles must be >= 1")
        if not (0.0 < self.rate <= 1.0):
            raise TrainingError(f"learning rate must lie in (0, 1], got {self.rate}")

    def to_dict(self) -> dict:
        return {"family": self.family, "max_splits": self.max_splits,
                "min_leaf": self.min_leaf, "cycles": self.cycles, "rate": self.rate}


@dataclass(frozen=True)
class LsBoostArtifact:
    family: str
    n_features: int
    init: float
    rate: float
    trees: tuple[Tree, ...]
    scaling: object | None = None
    fingerprint: str | None = None
    metadata: dict = field(default_factory=dict)

    def predict_one(self, x: np.ndarray) -> float:
        out = self.init
        for tree in self.trees:
            out += self.rate * tree.predict_one(x)
        return out

    def predict_many(self, X: np.ndarray) -> np.ndarray:
        out = np.full(X.shape[0], self.init)
        for tree in self.trees:
            out += self.rate * tree.predict_many(X)
        return out

    def model_payload(self) -> dict:
        return {"init": self.init, "rate": self.rate,
                "trees": [t.to_rows() for t in self.trees]}

    @staticmethod
    def from_payload(n_features: int, model: dict, scaling, fingerprint,
                     metadata) -> "LsBoostArtifact":
        trees = tuple(Tree.from_rows(rows) for rows in model["trees"])
        return LsBoostArtifact("lsboost", n_features, float(model["init"]),
                               float(model["rate"]), trees, scaling, fingerprint, metadata)


def train_lsboost(config: LsBoostConfig, X: np.ndarray, y: np.ndarray,
                  scaling=None, fingerprint=None, metadata: dict | None = None
                  ) -> LsBoostArtifact:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise TrainingError("X must be n×d and y length n")
    if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
        raise TrainingError("training data contains non-finite values")
    n = X.shape[0]
    if n < 2 * config.min_leaf:
        raise TrainingError(
            f"need at least {2 * config.min_leaf} rows for min_leaf={config.min_leaf}, got {n}")

    init = float(np.mean(y))
    pred = np.full(n, init)
    trees = []
    mse_per_cycle = []
    for _ in range(config.cycles):
        resid = y - pred
        tree = build_tree(X, resid, config.max_splits, config.min_leaf)
        pred = pred + config.rate * tree.predict_many(X)
        trees.append(tree)
        mse_per_cycle.append(float(np.mean((y - pred) ** 2)))

    meta = dict(metadata or {})
    meta.setdefault("config", config.to_dict())
    meta["train_mse_per_cycle"] = mse_per_cycle
    meta["final_train_mse"] = mse_per_cycle[-1]
    return LsBoostArtifact("lsboost", X.shape[1], init, config.rate, tuple(trees),
                           scaling, fingerprint, meta)
