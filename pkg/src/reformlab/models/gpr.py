"""Gaussian process regression with a squared-exponential kernel.

k(a, b) = v * exp(-sum_d (a_d - b_d)^2 / (2 l_d^2)); the Gram solve uses a
Cholesky factorization with jitter escalation 1e-10 -> 1e-6 before failing.
Predictions return the posterior mean; predict_interval adds the predictive
variance.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .lsboost import TrainingError

JITTERS = (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6)


@dataclass(frozen=True)
class GprConfig:
    output_variance: float = 1.0
    lengthscale: float | tuple[float, ...] = 0.5
    noise_variance: float = 1e-4

    family = "gpr"

    def __post_init__(self):
        ells = self.lengthscale if isinstance(self.lengthscale, tuple) else (self.lengthscale,)
        if self.output_variance <= 0 or self.noise_variance <= 0 or any(l <= 0 for l in ells):
            raise TrainingError("GPR variances and lengthscales must be positive")

    def lengthscales(self, d: int) -> np.ndarray:
        if isinstance(self.lengthscale, tuple):
            if len(self.lengthscale) != d:
                raise TrainingError(
                    f"per-dimension lengthscale has {len(self.lengthscale)} entries, need {d}")
            return np.array(self.lengthscale, dtype=float)
        return np.full(d, float(self.lengthscale))

    def to_dict(self) -> dict:
        ls = list(self.lengthscale) if isinstance(self.lengthscale, tuple) else self.lengthscale
        return {"family": self.family, "output_variance": self.output_variance,
                "lengthscale": ls, "noise_variance": self.noise_variance}


def _kernel(A: np.ndarray, B: np.ndarray, v: float, ell: np.ndarray) -> np.ndarray:
    As = A / ell
    Bs = B / ell
    sq = (np.sum(As ** 2, axis=1)[:, None] + np.sum(Bs ** 2, axis=1)[None, :]
          - 2.0 * As @ Bs.T)
    return v * np.exp(-0.5 * np.maximum(sq, 0.0))


@dataclass(frozen=True)
class GprArtifact:
    family: str
    n_features: int
    X: np.ndarray
    y_mean: float
    alpha: np.ndarray
    output_variance: float
    lengthscale: np.ndarray
    noise_variance: float
    jitter: float
    scaling: object | None = None
    fingerprint: str | None = None
    metadata: dict = field(default_factory=dict)
    _chol: list = field(default_factory=list, repr=False, compare=False)

    def _factor(self) -> np.ndarray:
        if not self._chol:
            K = _kernel(self.X, self.X, self.output_variance, self.lengthscale)
            A = K + (self.noise_variance + self.jitter) * np.eye(self.X.shape[0])
            self._chol.append(np.linalg.cholesky(A))
        return self._chol[0]

    def _cross(self, X: np.ndarray) -> np.ndarray:
        return _kernel(np.atleast_2d(X), self.X, self.output_variance, self.lengthscale)

    def predict_one(self, x: np.ndarray) -> float:
        return float(self.y_mean + self._cross(x)[0] @ self.alpha)

    def predict_many(self, X: np.ndarray) -> np.ndarray:
        return self.y_mean + self._cross(X) @ self.alpha

    def predict_interval(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and predictive variance (>= 0 after clipping the
        tiny negative values Cholesky arithmetic can produce)."""
        Kx = self._cross(X)
        mean = self.y_mean + Kx @ self.alpha
        L = self._factor()
        w = solve_triangular(L, Kx.T, lower=True)
        var = self.output_variance - np.sum(w ** 2, axis=0)
        return mean, np.maximum(var, 0.0)

    def model_payload(self) -> dict:
        return {"x": self.X.tolist(), "y_mean": self.y_mean,
                "alpha": self.alpha.tolist(),
                "output_variance": self.output_variance,
                "lengthscale": self.lengthscale.tolist(),
                "noise_variance": self.noise_variance, "jitter": self.jitter}

    @staticmethod
    def from_payload(n_features: int, model: dict, scaling, fingerprint,
                     metadata) -> "GprArtifact":
        return GprArtifact("gpr", n_features, np.array(model["x"], dtype=float),
                           float(model["y_mean"]), np.array(model["alpha"], dtype=float),
                           float(model["output_variance"]),
                           np.array(model["lengthscale"], dtype=float),
                           float(model["noise_variance"]), float(model["jitter"]),
                           scaling, fingerprint, metadata)


def train_gpr(config: GprConfig, X: np.ndarray, y: np.ndarray,
              scaling=None, fingerprint=None, metadata: dict | None = None) -> GprArtifact:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise TrainingError("X must be n×d and y length n")
    if X.shape[0] < 1:
        raise TrainingError("GPR needs at least one training point")
    if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
        raise TrainingError("training data contains non-finite values")

    ell = config.lengthscales(X.shape[1])
    y_mean = float(np.mean(y))
    K = _kernel(X, X, config.output_variance, ell)
    resid = y - y_mean
    n = X.shape[0]
    L = None
    used_jitter = 0.0
    for jitter in JITTERS:
        A = K + (config.noise_variance + jitter) * np.eye(n)
        try:
            L = np.linalg.cholesky(A)
            used_jitter = jitter
            break
        except np.linalg.LinAlgError:
            continue
    if L is None:
        raise TrainingError("Gram matrix not positive definite after jitter escalation to 1e-6")
    alpha = solve_triangular(L.T, solve_triangular(L, resid, lower=True), lower=False)
    if not np.all(np.isfinite(alpha)):
        raise TrainingError("Gram solve produced non-finite coefficients")

    meta = dict(metadata or {})
    meta.setdefault("config", config.to_dict())
    meta["jitter"] = used_jitter
    art = GprArtifact("gpr", X.shape[1], X.copy(), y_mean, alpha,
                      config.output_variance, ell, config.noise_variance, used_jitter,
                      scaling, fingerprint, meta)
    art._chol.append(L)
    return art
