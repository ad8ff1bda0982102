"""Single-hidden-layer network trained by full-batch gradient descent on MSE.

Initialization is seeded through the package generator, so training is
deterministic; analytic gradients are exposed separately so they can be
checked against finite differences.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..rng import default_rng
from .lsboost import TrainingError

ACTIVATIONS = ("tanh", "logistic")


@dataclass(frozen=True)
class MlpConfig:
    width: int = 8
    activation: str = "tanh"
    epochs: int = 2000
    step_size: float = 0.5
    seed: int = 0

    family = "mlp"

    def __post_init__(self):
        if self.width < 1:
            raise TrainingError(f"hidden width must be >= 1, got {self.width}")
        if self.epochs < 1:
            raise TrainingError(f"epochs must be >= 1, got {self.epochs}")
        if self.activation not in ACTIVATIONS:
            raise TrainingError(f"activation must be one of {ACTIVATIONS}")
        if self.step_size <= 0:
            raise TrainingError(f"step size must be positive, got {self.step_size}")

    def to_dict(self) -> dict:
        return {"family": self.family, "width": self.width, "activation": self.activation,
                "epochs": self.epochs, "step_size": self.step_size, "seed": self.seed}


@dataclass
class MlpParams:
    W1: np.ndarray  # width × d
    b1: np.ndarray  # width
    w2: np.ndarray  # width
    b2: float
    activation: str

    def copy(self) -> "MlpParams":
        return MlpParams(self.W1.copy(), self.b1.copy(), self.w2.copy(),
                         self.b2, self.activation)


def _activate(z: np.ndarray, kind: str) -> tuple[np.ndarray, np.ndarray]:
    """Return activation values and derivative wrt pre-activation."""
    if kind == "tanh":
        a = np.tanh(z)
        return a, 1.0 - a ** 2
    a = 1.0 / (1.0 + np.exp(-z))
    return a, a * (1.0 - a)


def forward(params: MlpParams, X: np.ndarray) -> np.ndarray:
    z = X @ params.W1.T + params.b1
    a, _ = _activate(z, params.activation)
    return a @ params.w2 + params.b2


def loss_and_gradients(params: MlpParams, X: np.ndarray, y: np.ndarray
                       ) -> tuple[float, MlpParams]:
    """MSE loss and its analytic gradients, packed in an MlpParams shell."""
    n = X.shape[0]
    with np.errstate(over="ignore", invalid="ignore"):  # divergence surfaces as
        z = X @ params.W1.T + params.b1                 # a non-finite loss
        a, da = _activate(z, params.activation)
        out = a @ params.w2 + params.b2
        err = out - y
        loss = float(np.mean(err ** 2))
        e = (2.0 / n) * err
        g_w2 = a.T @ e
        g_b2 = float(np.sum(e))
        dz = (e[:, None] * params.w2[None, :]) * da
        g_W1 = dz.T @ X
        g_b1 = dz.sum(axis=0)
    return loss, MlpParams(g_W1, g_b1, g_w2, g_b2, params.activation)


@dataclass(frozen=True)
class MlpArtifact:
    family: str
    n_features: int
    params: MlpParams
    scaling: object | None = None
    fingerprint: str | None = None
    metadata: dict = field(default_factory=dict)

    def predict_one(self, x: np.ndarray) -> float:
        return float(forward(self.params, np.atleast_2d(x))[0])

    def predict_many(self, X: np.ndarray) -> np.ndarray:
        return forward(self.params, X)

    def model_payload(self) -> dict:
        p = self.params
        return {"w1": p.W1.tolist(), "b1": p.b1.tolist(), "w2": p.w2.tolist(),
                "b2": p.b2, "activation": p.activation}

    @staticmethod
    def from_payload(n_features: int, model: dict, scaling, fingerprint,
                     metadata) -> "MlpArtifact":
        params = MlpParams(np.array(model["w1"], dtype=float),
                           np.array(model["b1"], dtype=float),
                           np.array(model["w2"], dtype=float),
                           float(model["b2"]), model["activation"])
        return MlpArtifact("mlp", n_features, params, scaling, fingerprint, metadata)


def init_params(config: MlpConfig, d: int) -> MlpParams:
    rng = default_rng(config.seed)
    s1 = 1.0 / np.sqrt(d)
    s2 = 1.0 / np.sqrt(config.width)
    return MlpParams(
        rng.uniform(-s1, s1, size=(config.width, d)),
        np.zeros(config.width),
        rng.uniform(-s2, s2, size=config.width),
        0.0,
        config.activation,
    )


def train_mlp(config: MlpConfig, X: np.ndarray, y: np.ndarray,
              scaling=None, fingerprint=None, metadata: dict | None = None) -> MlpArtifact:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise TrainingError("X must be n×d and y length n")
    if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
        raise TrainingError("training data contains non-finite values")

    params = init_params(config, X.shape[1])
    loss = None
    for epoch in range(config.epochs):
        loss, grads = loss_and_gradients(params, X, y)
        if not np.isfinite(loss):
            raise TrainingError(
                f"training diverged at epoch {epoch} with step size {config.step_size}")
        params.W1 -= config.step_size * grads.W1
        params.b1 -= config.step_size * grads.b1
        params.w2 -= config.step_size * grads.w2
        params.b2 -= config.step_size * grads.b2
    final_loss = float(np.mean((forward(params, X) - y) ** 2))
    if not np.isfinite(final_loss):
        raise TrainingError(f"training diverged with step size {config.step_size}")

    meta = dict(metadata or {})
    meta.setdefault("config", config.to_dict())
    meta["final_train_mse"] = final_loss
    return MlpArtifact("mlp", X.shape[1], params, scaling, fingerprint, meta)
