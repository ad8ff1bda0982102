"""Synthetic benchmark data: schema-shaped features with smooth nonlinear
responses plus proportional noise, for tests and desk-scale experiments."""
from __future__ import annotations

import numpy as np

from .data import DEFAULT_SCHEMA, Dataset, FeatureSchema
from .rng import default_rng


def _sigma(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


def synthetic_dataset(n: int = 600, seed: int = 0, noise: float = 0.02,
                      schema: FeatureSchema = DEFAULT_SCHEMA) -> Dataset:
    """Draw features uniformly inside the schema bounds and derive the five
    responses from smooth saturating interactions of the dominant drivers
    (temperature, steam ratio, time, and catalyst texture), contaminated with
    zero-mean noise scaled to ``noise`` of each response's spread."""
    rng = default_rng(seed)
    lo = np.array([c.lo for c in schema.features])
    hi = np.array([c.hi for c in schema.features])
    X = rng.uniform(lo, hi, size=(n, len(schema.features)))
    U = (X - lo) / (hi - lo)
    cs, ci, bet, pv, load, flow, sc, git, rt, tme, dia = U.T

    signals = np.column_stack([
        100.0 * _sigma(2.5 * rt + 1.6 * sc + 0.9 * ci - 2.0 * tme - 0.8 * bet
                       + 0.5 * np.sin(np.pi * pv) - 1.1),
        5.0 + 85.0 * _sigma(1.8 * rt + 1.4 * sc + 1.0 * ci + 0.6 * pv
                            - 1.2 * tme * sc - 1.0),
        2.0 + 45.0 * _sigma(1.5 * rt - 1.8 * sc - 0.5 * ci + 0.2),
        1.0 + 24.0 * _sigma(1.2 * sc + 0.8 * rt - 0.5 * load - 0.3),
        22.0 * _sigma(-1.6 * rt + 0.9 * tme + 0.5 * git + 0.2),
    ])
    Y = signals + noise * signals.std(axis=0) * rng.standard_normal(signals.shape)
    Y = np.clip(Y, 0.0, 100.0)
    return Dataset.from_arrays(schema, X, Y, ["synthetic"] * n)
