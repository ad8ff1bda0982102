"""A trained model directory: five per-target artifacts sharing one schema
fingerprint, the scaling spec, and a background sample for attribution.

On-disk layout:  <dir>/<target_key>.v1  (one artifact per target response),
<dir>/schema (schema + fingerprint + version tag), <dir>/background.v1
(seeded background rows, normalized units).
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, FeatureSchema, ScalingSpec, normalize
from .explain import ShapExplanation, shap_sampling, shap_tree
from .models import (LsBoostConfig, RegressorConfig, load_artifact, predict,
                     predict_many, save_artifact, train)
from .rng import default_rng
from .swarm import (MAXIMIZE, MINIMIZE, MopsoParams, ParetoSolution, PsoParams,
                    mopso)

SCHEMA_FILE = "schema"
BACKGROUND_FILE = "background.v1"
BACKGROUND_CAP = 256
SAMPLING_PERMUTATIONS = 2048

#: Optimization pulls toward high conversion and hydrogen, low CO/CO2/CH4.
OBJECTIVE_SENSES = (MAXIMIZE, MAXIMIZE, MINIMIZE, MINIMIZE, MINIMIZE)


class BundleError(ValueError):
    pass


@dataclass(frozen=True)
class ModelBundle:
    schema: FeatureSchema
    fingerprint: str
    scaling: ScalingSpec
    artifacts: dict  # target key -> artifact
    background: np.ndarray  # normalized feature rows
    version_tag: str

    @property
    def target_keys(self) -> tuple[str, ...]:
        return self.schema.target_keys


def train_bundle(dataset: Dataset, config: RegressorConfig | None = None,
                 background_seed: int = 0,
                 background_cap: int = BACKGROUND_CAP,
                 provenance: str = "full dataset") -> ModelBundle:
    """Refresh schema bounds from the data, normalize, and train one model
    per target; the background sample is a seeded subset of the training rows."""
    config = config or LsBoostConfig()
    schema = dataset.schema.with_bounds_from(dataset)
    rebound = Dataset(schema, dataset.samples)
    norm, scaling = normalize(rebound)
    fp = schema.fingerprint()
    X, Y = norm.features(), norm.targets()
    artifacts = {}
    for t, spec in enumerate(schema.targets):
        meta = {"target": spec.name, "fold_provenance": provenance,
                "seed": background_seed}
        artifacts[spec.key] = train(config, X, Y[:, t], scaling=scaling,
                                    fingerprint=fp, metadata=meta)
    if X.shape[0] > background_cap:
        pick = default_rng(background_seed).choice(X.shape[0], background_cap,
                                                   replace=False)
        background = X[np.sort(pick)]
    else:
        background = X.copy()
    return ModelBundle(schema, fp, scaling, artifacts, background, f"v1:{fp[:12]}")


def save_bundle(bundle: ModelBundle, dirpath: str) -> None:
    os.makedirs(dirpath, exist_ok=True)
    for key, artifact in bundle.artifacts.items():
        save_artifact(artifact, os.path.join(dirpath, f"{key}.v1"))
    with open(os.path.join(dirpath, SCHEMA_FILE), "w", encoding="utf-8") as fh:
        json.dump({"version": "v1", "fingerprint": bundle.fingerprint,
                   "version_tag": bundle.version_tag,
                   "schema": bundle.schema.to_dict(),
                   "scaling": bundle.scaling.to_dict()}, fh, indent=1)
    with open(os.path.join(dirpath, BACKGROUND_FILE), "w", encoding="utf-8") as fh:
        json.dump({"version": "v1", "rows": bundle.background.tolist()}, fh)


def load_bundle(dirpath: str) -> ModelBundle:
    schema_path = os.path.join(dirpath, SCHEMA_FILE)
    if not os.path.exists(schema_path):
        raise BundleError(f"no schema file in {dirpath!r}")
    with open(schema_path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("version") != "v1":
        raise BundleError(f"unsupported bundle version {doc.get('version')!r}")
    schema = FeatureSchema.from_dict(doc["schema"])
    fp = doc["fingerprint"]
    scaling = ScalingSpec.from_dict(doc["scaling"])
    artifacts = {}
    for spec in schema.targets:
        path = os.path.join(dirpath, f"{spec.key}.v1")
        if not os.path.exists(path):
            raise BundleError(f"missing artifact for target {spec.name!r}: {path}")
        art = load_artifact(path)
        if art.fingerprint != fp:
            raise BundleError(
                f"artifact {spec.key!r} carries fingerprint {art.fingerprint!r}, "
                f"bundle expects {fp!r}")
        artifacts[spec.key] = art
    bg_path = os.path.join(dirpath, BACKGROUND_FILE)
    if os.path.exists(bg_path):
        with open(bg_path, encoding="utf-8") as fh:
            background = np.array(json.load(fh)["rows"], dtype=float)
    else:
        background = np.empty((0, len(schema.features)))
    return ModelBundle(schema, fp, scaling, artifacts, background,
                       doc.get("version_tag", f"v1:{fp[:12]}"))


def _feature_vector(bundle: ModelBundle, features: dict) -> np.ndarray:
    keys = bundle.schema.feature_keys
    unknown = sorted(set(features) - set(keys))
    if unknown:
        raise BundleError(f"unknown feature key {unknown[0]!r}")
    missing = [k for k in keys if k not in features]
    if missing:
        raise BundleError(f"missing feature key {missing[0]!r}")
    x = np.array([float(features[k]) for k in keys])
    if not np.all(np.isfinite(x)):
        raise BundleError("feature values must be finite")
    return x


@dataclass(frozen=True)
class PredictOutcome:
    features: dict
    predictions: dict
    extrapolation: dict
    model_version: str


def predict_named(bundle: ModelBundle, features: dict) -> PredictOutcome:
    """Predict the five responses in original units; a feature is flagged as
    extrapolating iff it falls outside the training bounds."""
    x = _feature_vector(bundle, features)
    flags = {}
    for i, spec in enumerate(bundle.schema.features):
        flags[spec.key] = bool(x[i] < spec.lo or x[i] > spec.hi)
    xn = bundle.scaling.transform_features(x)[0]
    predictions = {}
    for j, spec in enumerate(bundle.schema.targets):
        yn = predict(bundle.artifacts[spec.key], xn, expected_fingerprint=bundle.fingerprint)
        predictions[spec.key] = float(bundle.scaling.inverse_target(j, yn))
    echo = {k: float(features[k]) for k in bundle.schema.feature_keys}
    return PredictOutcome(echo, predictions, flags, bundle.version_tag)


def explain_named(bundle: ModelBundle, features: dict,
                  seed: int = 0) -> list[ShapExplanation]:
    """Per-target attributions in original target units: the exact tree path
    for the boosted family, the seeded sampling estimator otherwise."""
    x = _feature_vector(bundle, features)
    if bundle.background.size == 0:
        raise BundleError("bundle has no background rows; retrain or supply data")
    xn = bundle.scaling.transform_features(x)[0]
    out = []
    for j, spec in enumerate(bundle.schema.targets):
        artifact = bundle.artifacts[spec.key]
        if artifact.family == "lsboost":
            exp = shap_tree(artifact, xn, bundle.background, target=spec.name)
        else:
            exp = shap_sampling(artifact, xn, bundle.background,
                                n_permutations=SAMPLING_PERMUTATIONS, seed=seed,
                                target=spec.name)
        lo, hi = bundle.scaling.target_scale(j)
        factor = hi - lo
        out.append(ShapExplanation(tuple(map(float, x)),
                                   exp.base_value * factor + lo,
                                   tuple(v * factor for v in exp.values),
                                   spec.name,
                                   exp.prediction * factor + lo))
    return out


@dataclass(frozen=True)
class OptimizeOutcome:
    solutions: list[ParetoSolution]
    decision_ranges: dict
    objective_ranges: dict
    model_version: str


def optimize_bundle(bundle: ModelBundle, bounds: dict | None = None,
                    swarm_size: int = 40, iterations: int = 200,
                    archive_capacity: int = 100, seed: int = 0) -> OptimizeOutcome:
    """Search the feature box for non-dominated operating/catalyst windows.

    Decision variables and objectives are in original units; bounds default
    to the training bounds and may be narrowed per feature key.
    """
    keys = bundle.schema.feature_keys
    lo = [spec.lo for spec in bundle.schema.features]
    hi = [spec.hi for spec in bundle.schema.features]
    if bounds:
        unknown = sorted(set(bounds) - set(keys))
        if unknown:
            raise BundleError(f"unknown feature key {unknown[0]!r} in bounds")
        for k, pair in bounds.items():
            i = keys.index(k)
            lo[i], hi[i] = float(pair[0]), float(pair[1])
            if not lo[i] < hi[i]:
                raise BundleError(f"bounds for {k!r} need lo < hi")

    arts = [bundle.artifacts[k] for k in bundle.target_keys]

    def objectives(X: np.ndarray) -> np.ndarray:
        Xn = bundle.scaling.transform_features(X)
        cols = []
        for j, art in enumerate(arts):
            yn = predict_many(art, Xn)
            cols.append(bundle.scaling.inverse_target(j, yn))
        return np.column_stack(cols)

    params = MopsoParams(
        pso=PsoParams(lower=tuple(lo), upper=tuple(hi), swarm_size=swarm_size,
                      iterations=iterations, seed=seed),
        senses=OBJECTIVE_SENSES, archive_capacity=archive_capacity)
    solutions = mopso(objectives, params, vectorized=True)

    dec = np.array([s.decision for s in solutions])
    obj = np.array([s.objectives for s in solutions])
    decision_ranges = {k: (float(dec[:, i].min()), float(dec[:, i].max()))
                       for i, k in enumerate(keys)}
    objective_ranges = {k: (float(obj[:, j].min()), float(obj[:, j].max()))
                        for j, k in enumerate(bundle.target_keys)}
    return OptimizeOutcome(solutions, decision_ranges, objective_ranges,
                           bundle.version_tag)


def pareto_csv(outcome: OptimizeOutcome, schema: FeatureSchema) -> str:
    """Delimiter-separated solutions: 11 decision columns + 5 objectives."""
    import csv as _csv
    import io as _io

    out = _io.StringIO()
    w = _csv.writer(out, lineterminator="\n")
    w.writerow(list(schema.feature_names) + list(schema.target_names))
    for s in outcome.solutions:
        w.writerow([repr(v) for v in s.decision] + [repr(v) for v in s.objectives])
    return out.getvalue()
