"""Shapley-value attribution against a background dataset.

The boosted-tree path is exact: for each tree and background row, every leaf
is classified by the features that must take the instance's value and those
that must take the background's value; the classic unanimity-game weights
(a-1)!c!/(a+c)! and a!(c-1)!/(a+c)! then give each feature's contribution in
closed form.  A permutation estimator doubles as the oracle for the tree
path and as the model-agnostic route for the kernel and network families.

Every explanation satisfies efficiency: base value plus the attribution sum
equals the model prediction at the instance.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .data import CATALYST_PROPERTY, OPERATING_CONDITION, FeatureSchema
from .models import LsBoostArtifact, predict, predict_many
from .models.trees import LEAF, Tree
from .rng import default_rng


class ExplainError(ValueError):
    pass


@dataclass(frozen=True)
class ShapExplanation:
    instance: tuple[float, ...]
    base_value: float
    values: tuple[float, ...]
    target: str
    prediction: float

    def scaled(self, factor: float, offset: float = 0.0) -> "ShapExplanation":
        """Affine change of the model output (for original-unit reporting):
        attributions scale by the factor, the base shifts with the offset."""
        return ShapExplanation(self.instance,
                               self.base_value * factor + offset,
                               tuple(v * factor for v in self.values),
                               self.target,
                               self.prediction * factor + offset)


@lru_cache(maxsize=None)
def _w_in(a: int, c: int) -> float:
    return math.factorial(a - 1) * math.factorial(c) / math.factorial(a + c)


@lru_cache(maxsize=None)
def _w_out(a: int, c: int) -> float:
    return math.factorial(a) * math.factorial(c - 1) / math.factorial(a + c)


def _walk(tree: Tree, node: int, x_left: dict, b_left: dict,
          amount: float, a_feats: dict, c_feats: dict, phi: np.ndarray) -> None:
    feat = int(tree.feature[node])
    if feat == LEAF:
        v = float(tree.value[node]) * amount
        a, c = len(a_feats), len(c_feats)
        if a:
            w = v * _w_in(a, c)
            for j in a_feats:
                phi[j] += w
        if c:
            w = v * _w_out(a, c)
            for j in c_feats:
                phi[j] -= w
        return
    xl, bl = x_left[node], b_left[node]
    left, right = int(tree.left[node]), int(tree.right[node])
    if xl == bl:
        _walk(tree, left if xl else right, x_left, b_left, amount, a_feats, c_feats, phi)
    elif feat in a_feats:
        _walk(tree, left if xl else right, x_left, b_left, amount, a_feats, c_feats, phi)
    elif feat in c_feats:
        _walk(tree, left if bl else right, x_left, b_left, amount, a_feats, c_feats, phi)
    else:
        a_feats[feat] = True
        _walk(tree, left if xl else right, x_left, b_left, amount, a_feats, c_feats, phi)
        del a_feats[feat]
        c_feats[feat] = True
        _walk(tree, left if bl else right, x_left, b_left, amount, a_feats, c_feats, phi)
        del c_feats[feat]


def tree_shap_values(tree: Tree, x: np.ndarray, background: np.ndarray,
                     n_features: int) -> np.ndarray:
    """Exact interventional Shapley values of one raw tree (no shrinkage),
    averaged over the background rows."""
    phi = np.zeros(n_features)
    internal = tree.internal_nodes()
    if internal.size == 0:
        return phi
    feats = tree.feature[internal]
    thrs = tree.threshold[internal]
    x_dirs = x[feats] <= thrs
    bg_dirs = background[:, feats] <= thrs
    patterns, counts = np.unique(bg_dirs, axis=0, return_counts=True)
    x_left = {int(n): bool(x_dirs[i]) for i, n in enumerate(internal)}
    total = background.shape[0]
    for pat, cnt in zip(patterns, counts):
        b_left = {int(n): bool(pat[i]) for i, n in enumerate(internal)}
        _walk(tree, 0, x_left, b_left, cnt / total, {}, {}, phi)
    return phi


def _check_inputs(model, x, background) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float).ravel()
    background = np.atleast_2d(np.asarray(background, dtype=float))
    if background.size == 0:
        raise ExplainError("background set must not be empty")
    if x.size != model.n_features or background.shape[1] != model.n_features:
        raise ExplainError(
            f"instance/background width must equal model width {model.n_features}")
    return x, background


def shap_tree(model: LsBoostArtifact, x, background, target: str = "") -> ShapExplanation:
    """Exact interventional attribution for the boosted-tree family: per-tree
    values summed across the ensemble, scaled by the learning rate."""
    if getattr(model, "family", None) != "lsboost":
        raise ExplainError("shap_tree applies to the boosted-tree family only; "
                           "use shap_sampling for other families")
    x, background = _check_inputs(model, x, background)
    phi = np.zeros(model.n_features)
    for tree in model.trees:
        phi += model.rate * tree_shap_values(tree, x, background, model.n_features)
    base = float(np.mean(predict_many(model, background)))
    pred = predict(model, x)
    return ShapExplanation(tuple(map(float, x)), base, tuple(map(float, phi)),
                           target, pred)


def shap_sampling(model, x, background, n_permutations: int = 2048, seed: int = 0,
                  exhaustive: bool = False, target: str = "") -> ShapExplanation:
    """Permutation Shapley with background-imputed absent features.

    Monte-Carlo mode pairs each sampled permutation with one sampled
    background row; the base value is the mean prediction over those sampled
    rows, which keeps efficiency exact.  Exhaustive mode enumerates every
    permutation against every background row and is exact.
    """
    x, background = _check_inputs(model, x, background)
    n = model.n_features
    if exhaustive:
        if n > 8:
            raise ExplainError("exhaustive enumeration is limited to 8 features")
        perms = list(itertools.permutations(range(n)))
        rows = list(range(background.shape[0]))
        pairs = [(p, r) for p in perms for r in rows]
    else:
        if n_permutations < 1:
            raise ExplainError("permutation count must be >= 1")
        rng = default_rng(seed)
        pairs = [(tuple(rng.permutation(n)), int(rng.integers(background.shape[0])))
                 for _ in range(n_permutations)]

    # one batched evaluation over all hybrid points: for each pair the chain
    # b -> ... -> x adds one instance feature at a time
    chains = np.empty((len(pairs), n + 1, n))
    for k, (perm, row) in enumerate(pairs):
        vec = background[row].copy()
        chains[k, 0] = vec
        for step, j in enumerate(perm, start=1):
            vec = vec.copy()
            vec[j] = x[j]
            chains[k, step] = vec
    flat = predict_many(model, chains.reshape(-1, n)).reshape(len(pairs), n + 1)

    phi = np.zeros(n)
    for k, (perm, _) in enumerate(pairs):
        deltas = np.diff(flat[k])
        for step, j in enumerate(perm):
            phi[j] += deltas[step]
    phi /= len(pairs)
    base = float(np.mean(flat[:, 0]))
    pred = predict(model, x)
    return ShapExplanation(tuple(map(float, x)), base, tuple(map(float, phi)),
                           target, pred)


@dataclass(frozen=True)
class ShapSummary:
    feature_names: tuple[str, ...]
    max_abs: tuple[float, ...]
    mean_abs: tuple[float, ...]
    order: tuple[int, ...]  # descending max |value|, ties by schema index
    group_percent: dict

    def ranked_names(self) -> tuple[str, ...]:
        return tuple(self.feature_names[i] for i in self.order)


def summarize(explanations: list[ShapExplanation], schema: FeatureSchema) -> ShapSummary:
    """Rank features by max |value| over a dataset and split total mean
    attribution between operating conditions and catalyst properties."""
    if not explanations:
        raise ExplainError("no explanations supplied")
    values = np.array([e.values for e in explanations], dtype=float)
    if values.shape[1] != len(schema.features):
        raise ExplainError("explanation width does not match schema")
    max_abs = np.max(np.abs(values), axis=0)
    mean_abs = np.mean(np.abs(values), axis=0)
    order = sorted(range(values.shape[1]), key=lambda j: (-max_abs[j], j))
    total = float(np.sum(mean_abs))
    if total <= 0.0:
        raise ExplainError("all attributions are zero; the group split is undefined")
    groups = {}
    for kind in (OPERATING_CONDITION, CATALYST_PROPERTY):
        idx = list(schema.group_indices(kind))
        groups[kind] = 100.0 * float(np.sum(mean_abs[idx])) / total
    return ShapSummary(schema.feature_names, tuple(map(float, max_abs)),
                       tuple(map(float, mean_abs)), tuple(order), groups)


def explanation_csv(explanation: ShapExplanation, schema: FeatureSchema) -> str:
    lines = ["feature,value,shap_value"]
    for name, v, phi in zip(schema.feature_names, explanation.instance, explanation.values):
        lines.append(f"\"{name}\",{v!r},{phi!r}")
    lines.append(f"base_value,,{explanation.base_value!r}")
    lines.append(f"prediction,,{explanation.prediction!r}")
    return "\n".join(lines) + "\n"


def summary_csv(summary: ShapSummary) -> str:
    lines = ["rank,feature,max_abs_shap,mean_abs_shap"]
    for rank, i in enumerate(summary.order, start=1):
        lines.append(f"{rank},\"{summary.feature_names[i]}\","
                     f"{summary.max_abs[i]!r},{summary.mean_abs[i]!r}")
    for kind, pct in summary.group_percent.items():
        lines.append(f"group,\"{kind}\",{pct!r},")
    return "\n".join(lines) + "\n"
