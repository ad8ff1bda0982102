"""Trainable regressors behind one contract: train → immutable artifact →
deterministic predict; artifacts round-trip through a versioned text format
with bit-identical predictions."""
from __future__ import annotations

import json
from typing import IO, Union

import numpy as np

from ..data import ScalingSpec
from .lsboost import LsBoostArtifact, LsBoostConfig, TrainingError, train_lsboost
from .gpr import GprArtifact, GprConfig, train_gpr
from .mlp import (MlpArtifact, MlpConfig, MlpParams, forward, init_params,
                  loss_and_gradients, train_mlp)
from .trees import Tree, build_tree

ARTIFACT_VERSION = "v1"

RegressorConfig = Union[LsBoostConfig, GprConfig, MlpConfig]
RegressorArtifact = Union[LsBoostArtifact, GprArtifact, MlpArtifact]

FAMILIES = ("lsboost", "gpr", "mlp")

_LOADERS = {
    "lsboost": LsBoostArtifact.from_payload,
    "gpr": GprArtifact.from_payload,
    "mlp": MlpArtifact.from_payload,
}
_CONFIG_TYPES = {"lsboost": LsBoostConfig, "gpr": GprConfig, "mlp": MlpConfig}


class ArtifactError(ValueError):
    pass


class PredictError(ValueError):
    pass


def config_from_dict(d: dict) -> RegressorConfig:
    d = dict(d)
    family = d.pop("family", None)
    if family not in _CONFIG_TYPES:
        raise ArtifactError(f"unknown model family {family!r}")
    if family == "gpr" and isinstance(d.get("lengthscale"), list):
        d["lengthscale"] = tuple(d["lengthscale"])
    return _CONFIG_TYPES[family](**d)


def train(config: RegressorConfig, X: np.ndarray, y: np.ndarray,
          **kwargs) -> RegressorArtifact:
    if isinstance(config, LsBoostConfig):
        return train_lsboost(config, X, y, **kwargs)
    if isinstance(config, GprConfig):
        return train_gpr(config, X, y, **kwargs)
    if isinstance(config, MlpConfig):
        return train_mlp(config, X, y, **kwargs)
    raise TrainingError(f"unknown config type {type(config).__name__}")


def _check_input(artifact, x: np.ndarray, expected_fingerprint: str | None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    width = x.shape[-1] if x.ndim else 0
    if x.ndim not in (1, 2) or width != artifact.n_features:
        raise PredictError(f"input width {width} does not match model width "
                           f"{artifact.n_features}")
    if not np.all(np.isfinite(x)):
        raise PredictError("input contains non-finite values")
    if expected_fingerprint is not None and artifact.fingerprint != expected_fingerprint:
        raise PredictError("schema fingerprint mismatch between caller and artifact")
    return x


def predict(artifact: RegressorArtifact, x,
            expected_fingerprint: str | None = None) -> float:
    """Deterministic point prediction for one input row (the posterior mean
    for GPR; use artifact.predict_interval for its variance)."""
    x = _check_input(artifact, x, expected_fingerprint)
    if x.ndim != 1:
        raise PredictError("predict expects a single row; use predict_many")
    return artifact.predict_one(x)


def predict_many(artifact: RegressorArtifact, X,
                 expected_fingerprint: str | None = None) -> np.ndarray:
    X = _check_input(artifact, X, expected_fingerprint)
    if X.ndim != 2:
        X = np.atleast_2d(X)
    return artifact.predict_many(X)


def artifact_to_text(artifact: RegressorArtifact) -> str:
    scaling = artifact.scaling.to_dict() if artifact.scaling is not None else None
    doc = {
        "version": ARTIFACT_VERSION,
        "family": artifact.family,
        "n_features": artifact.n_features,
        "schema_fingerprint": artifact.fingerprint,
        "scaling": scaling,
        "metadata": artifact.metadata,
        "model": artifact.model_payload(),
    }
    return json.dumps(doc, indent=1)


def artifact_from_text(text: str) -> RegressorArtifact:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"corrupt artifact stream: {exc}") from None
    if not isinstance(doc, dict):
        raise ArtifactError("corrupt artifact stream: not a document")
    version = doc.get("version")
    if version != ARTIFACT_VERSION:
        raise ArtifactError(f"unsupported artifact version {version!r}; "
                            f"this build reads {ARTIFACT_VERSION!r}")
    family = doc.get("family")
    if family not in _LOADERS:
        raise ArtifactError(f"unknown model family {family!r}")
    scaling = doc.get("scaling")
    spec = ScalingSpec.from_dict(scaling) if scaling is not None else None
    try:
        return _LOADERS[family](int(doc["n_features"]), doc["model"], spec,
                                doc.get("schema_fingerprint"), doc.get("metadata") or {})
    except (KeyError, TypeError, ValueError) as exc:
        raise ArtifactError(f"corrupt artifact stream: {exc}") from None


def save_artifact(artifact: RegressorArtifact, target: Union[str, IO[str]]) -> None:
    text = artifact_to_text(artifact)
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)


def load_artifact(source: Union[str, IO[str]]) -> RegressorArtifact:
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    if not text.strip():
        raise ArtifactError("empty artifact stream")
    return artifact_from_text(text)
