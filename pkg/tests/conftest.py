import numpy as np
import pytest

from reformlab.data import DEFAULT_SCHEMA, Dataset
from reformlab.rng import default_rng
from reformlab.synth import synthetic_dataset


@pytest.fixture(scope="session")
def small_ds() -> Dataset:
    return synthetic_dataset(80, seed=11)


def dataset_with_targets(target_columns: dict[int, list[float]], n: int | None = None,
                         seed: int = 0) -> Dataset:
    """Random valid dataset with chosen target columns pinned to given values."""
    n = n or len(next(iter(target_columns.values())))
    rng = default_rng(seed)
    lo = np.array([c.lo for c in DEFAULT_SCHEMA.features])
    hi = np.array([c.hi for c in DEFAULT_SCHEMA.features])
    X = rng.uniform(lo, hi, size=(n, 11))
    Y = rng.uniform(10.0, 20.0, size=(n, 5))
    for j, vals in target_columns.items():
        Y[:, j] = vals
    return Dataset.from_arrays(DEFAULT_SCHEMA, X, Y)
