"""Experiment data layer: column schema, CSV ingestion, scaling, outlier
filtering, and cross-validation folds.

Column spellings, the file format, and the shuffle generator are documented
in docs/data_format.md.  All operations are pure functions on immutable
values.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .rng import default_rng

CATALYST_PROPERTY = "catalyst-property"
OPERATING_CONDITION = "operating-condition"
TARGET = "target"

N_FEATURES = 11
N_TARGETS = 5

SOURCE_COLUMN = "source"


class DataError(ValueError):
    """Schema violation, malformed cell, or invalid policy."""


@dataclass(frozen=True)
class ColumnSpec:
    """One column: canonical header name, short key, unit, kind, observed bounds."""

    name: str
    key: str
    unit: str
    kind: str
    lo: float
    hi: float

    def __post_init__(self):
        if self.kind not in (CATALYST_PROPERTY, OPERATING_CONDITION, TARGET):
            raise DataError(f"unknown column kind {self.kind!r} for {self.name!r}")
        if not np.isfinite(self.lo) or not np.isfinite(self.hi) or self.lo > self.hi:
            raise DataError(f"bad bounds [{self.lo}, {self.hi}] for {self.name!r}")

    @property
    def is_percentage(self) -> bool:
        return self.unit in ("%", "mol%")


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered descriptors for the 11 input features and 5 target responses."""

    features: tuple[ColumnSpec, ...]
    targets: tuple[ColumnSpec, ...]

    def __post_init__(self):
        if len(self.features) != N_FEATURES:
            raise DataError(f"schema needs exactly {N_FEATURES} features, got {len(self.features)}")
        if len(self.targets) != N_TARGETS:
            raise DataError(f"schema needs exactly {N_TARGETS} targets, got {len(self.targets)}")
        kinds = [c.kind for c in self.features]
        if kinds.count(CATALYST_PROPERTY) != 4 or kinds.count(OPERATING_CONDITION) != 7:
            raise DataError("features must split 4 catalyst-property / 7 operating-condition")
        if any(c.kind != TARGET for c in self.targets):
            raise DataError("target descriptors must have kind 'target'")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DataError("duplicate column names in schema")

    @property
    def columns(self) -> tuple[ColumnSpec, ...]:
        return self.features + self.targets

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.features)

    @property
    def target_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.targets)

    @property
    def feature_keys(self) -> tuple[str, ...]:
        return tuple(c.key for c in self.features)

    @property
    def target_keys(self) -> tuple[str, ...]:
        return tuple(c.key for c in self.targets)

    def feature_index(self, key_or_name: str) -> int:
        for i, c in enumerate(self.features):
            if key_or_name in (c.key, c.name):
                return i
        raise DataError(f"unknown feature {key_or_name!r}")

    def feature_bounds(self) -> np.ndarray:
        return np.array([[c.lo, c.hi] for c in self.features], dtype=float)

    def group_indices(self, kind: str) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.features) if c.kind == kind)

    def with_bounds_from(self, dataset: "Dataset") -> "FeatureSchema":
        """Refresh every column's observed bounds from the dataset's values."""
        m = dataset.matrix()
        lo, hi = m.min(axis=0), m.max(axis=0)
        cols = [replace(c, lo=float(lo[i]), hi=float(hi[i])) for i, c in enumerate(self.columns)]
        return FeatureSchema(tuple(cols[:N_FEATURES]), tuple(cols[N_FEATURES:]))

    def to_dict(self) -> dict:
        def enc(c: ColumnSpec) -> dict:
            return {"name": c.name, "key": c.key, "unit": c.unit, "kind": c.kind,
                    "lo": c.lo, "hi": c.hi}

        return {"features": [enc(c) for c in self.features],
                "targets": [enc(c) for c in self.targets]}

    @staticmethod
    def from_dict(d: dict) -> "FeatureSchema":
        def dec(e: dict) -> ColumnSpec:
            return ColumnSpec(e["name"], e["key"], e["unit"], e["kind"],
                              float(e["lo"]), float(e["hi"]))

        return FeatureSchema(tuple(dec(e) for e in d["features"]),
                             tuple(dec(e) for e in d["targets"]))

    def fingerprint(self) -> str:
        """Hex digest over the canonical schema serialization (names, units,
        kinds, and observed bounds), used to tie artifacts to the schema they
        were trained against."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _col(name, key, unit, kind, lo, hi):
    return ColumnSpec(name, key, unit, kind, lo, hi)


#: Canonical schema.  Bounds marked in docs/data_format.md as published
#: observation envelopes where available, broad placeholders elsewhere;
#: pipelines refresh them from the loaded dataset via with_bounds_from().
DEFAULT_SCHEMA = FeatureSchema(
    features=(
        _col("Average crystal size (nm)", "crystal_size", "nm", CATALYST_PROPERTY, 3.33, 25.3),
        _col("Crystallinity index (%)", "crystallinity_index", "%", CATALYST_PROPERTY, 4.44, 94.03),
        _col("BET surface area (m²/g)", "bet_area", "m²/g", CATALYST_PROPERTY, 5.7, 322.0),
        _col("Pore volume (cm³/g)", "pore_volume", "cm³/g", CATALYST_PROPERTY, 0.02, 0.91),
        _col("Catalyst loading (g)", "catalyst_loading", "g", OPERATING_CONDITION, 0.1, 100.0),
        _col("Carrier gas flow rate (mL/min)", "gas_flow", "mL/min", OPERATING_CONDITION, 5.0, 1000.0),
        _col("Steam-to-carbon molar ratio (-)", "steam_carbon_ratio", "-", OPERATING_CONDITION, 0.5, 8.0),
        _col("Carrier gas initial temperature (°C)", "gas_initial_temp", "°C", OPERATING_CONDITION, 20.0, 400.0),
        _col("Reaction temperature (°C)", "reaction_temp", "°C", OPERATING_CONDITION, 300.0, 900.0),
        _col("Reaction time (min)", "reaction_time", "min", OPERATING_CONDITION, 5.0, 1000.0),
        _col("Reactor inner diameter (mm)", "reactor_diameter", "mm", OPERATING_CONDITION, 4.0, 100.0),
    ),
    targets=(
        _col("Toluene conversion (%)", "conversion", "%", TARGET, 0.82, 99.85),
        _col("H2 (mol%)", "h2", "mol%", TARGET, 0.70, 98.8),
        _col("CO (mol%)", "co", "mol%", TARGET, 0.10, 63.3),
        _col("CO2 (mol%)", "co2", "mol%", TARGET, 0.36, 28.2),
        _col("CH4 (mol%)", "ch4", "mol%", TARGET, 0.0, 28.0),
    ),
)


@dataclass(frozen=True)
class Sample:
    """One experiment row: 11 features, 5 targets, provenance tag."""

    features: tuple[float, ...]
    targets: tuple[float, ...]
    source: str = ""


@dataclass(frozen=True)
class Dataset:
    schema: FeatureSchema
    samples: tuple[Sample, ...]

    @property
    def n(self) -> int:
        return len(self.samples)

    def features(self) -> np.ndarray:
        return np.array([s.features for s in self.samples], dtype=float)

    def targets(self) -> np.ndarray:
        return np.array([s.targets for s in self.samples], dtype=float)

    def matrix(self) -> np.ndarray:
        return np.hstack([self.features(), self.targets()])

    def sources(self) -> tuple[str, ...]:
        return tuple(s.source for s in self.samples)

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset(self.schema, tuple(self.samples[i] for i in indices))

    @staticmethod
    def from_arrays(schema: FeatureSchema, X: np.ndarray, Y: np.ndarray,
                    sources: Sequence[str] | None = None) -> "Dataset":
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        if X.ndim != 2 or X.shape[1] != N_FEATURES or Y.shape != (X.shape[0], N_TARGETS):
            raise DataError(f"arrays must be n×{N_FEATURES} and n×{N_TARGETS}")
        if sources is None:
            sources = [""] * X.shape[0]
        samples = tuple(Sample(tuple(map(float, X[i])), tuple(map(float, Y[i])), sources[i])
                        for i in range(X.shape[0]))
        ds = Dataset(schema, samples)
        _validate_values(ds)
        return ds


def _validate_values(ds: Dataset) -> None:
    cols = ds.schema.columns
    m = ds.matrix()
    for j, spec in enumerate(cols):
        col = m[:, j]
        bad = np.flatnonzero(~np.isfinite(col))
        if bad.size:
            raise DataError(f"row {bad[0] + 1}, column {spec.name!r}: non-finite value")
        if spec.is_percentage:
            out = np.flatnonzero((col < 0.0) | (col > 100.0))
            if out.size:
                raise DataError(
                    f"row {out[0] + 1}, column {spec.name!r}: "
                    f"value {col[out[0]]!r} outside [0, 100]")


def parse_dataset(text: str, schema: FeatureSchema = DEFAULT_SCHEMA) -> Dataset:
    """Parse delimiter-separated values with a header row into a Dataset.

    The header must name all 16 canonical columns (any order); a trailing
    ``source`` column is optional.  Rows with missing or non-numeric cells
    are rejected with their row/column position.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty input: no header row") from None
    header = [h.strip() for h in header]

    names = schema.column_names
    positions: dict[str, int] = {}
    for i, h in enumerate(header):
        if h in names or h == SOURCE_COLUMN:
            if h in positions:
                raise DataError(f"duplicate column {h!r} in header")
            positions[h] = i
        else:
            raise DataError(f"unexpected column {h!r} in header")
    missing = [n for n in names if n not in positions]
    if missing:
        raise DataError(f"missing required column {missing[0]!r}")

    src_pos = positions.get(SOURCE_COLUMN)
    samples = []
    for row_no, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"row {row_no}: expected {len(header)} cells, got {len(row)}")
        values = []
        for spec in schema.columns:
            cell = row[positions[spec.name]].strip()
            try:
                v = float(cell)
            except ValueError:
                raise DataError(
                    f"row {row_no}, column {spec.name!r}: could not parse {cell!r}") from None
            values.append(v)
        source = row[src_pos].strip() if src_pos is not None else ""
        samples.append(Sample(tuple(values[:N_FEATURES]), tuple(values[N_FEATURES:]), source))
    if not samples:
        raise DataError("empty body: no data rows")
    ds = Dataset(schema, tuple(samples))
    _validate_values(ds)
    return ds


def serialize_dataset(ds: Dataset) -> str:
    """Inverse of parse_dataset; float cells use shortest round-trip repr."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(list(ds.schema.column_names) + [SOURCE_COLUMN])
    for s in ds.samples:
        writer.writerow([repr(v) for v in s.features + s.targets] + [s.source])
    return out.getvalue()


@dataclass(frozen=True)
class ScalingSpec:
    """Per-column affine map to [0, 1]: observed min -> 0, max -> 1.

    Columns are ordered features-then-targets, matching the schema.
    """

    columns: tuple[str, ...]
    mins: tuple[float, ...]
    maxs: tuple[float, ...]
    n_features: int = N_FEATURES

    def _check(self, width: int, offset: int = 0) -> None:
        if offset + width > len(self.columns):
            raise DataError("scaling spec narrower than requested slice")

    def transform_matrix(self, m: np.ndarray) -> np.ndarray:
        if m.shape[1] != len(self.columns):
            raise DataError(
                f"scaling spec has {len(self.columns)} columns, data has {m.shape[1]}")
        lo = np.array(self.mins)
        hi = np.array(self.maxs)
        return (m - lo) / (hi - lo)

    def inverse_matrix(self, m: np.ndarray) -> np.ndarray:
        if m.shape[1] != len(self.columns):
            raise DataError(
                f"scaling spec has {len(self.columns)} columns, data has {m.shape[1]}")
        lo = np.array(self.mins)
        hi = np.array(self.maxs)
        return m * (hi - lo) + lo

    def transform_features(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        self._check(X.shape[1])
        lo = np.array(self.mins[: X.shape[1]])
        hi = np.array(self.maxs[: X.shape[1]])
        return (X - lo) / (hi - lo)

    def target_scale(self, j: int) -> tuple[float, float]:
        idx = self.n_features + j
        self._check(1, idx)
        return self.mins[idx], self.maxs[idx]

    def transform_target(self, j: int, y: np.ndarray) -> np.ndarray:
        lo, hi = self.target_scale(j)
        return (np.asarray(y, dtype=float) - lo) / (hi - lo)

    def inverse_target(self, j: int, y: np.ndarray | float):
        lo, hi = self.target_scale(j)
        return np.asarray(y, dtype=float) * (hi - lo) + lo

    def to_dict(self) -> dict:
        return {"columns": list(self.columns), "mins": list(self.mins),
                "maxs": list(self.maxs), "n_features": self.n_features}

    @staticmethod
    def from_dict(d: dict) -> "ScalingSpec":
        return ScalingSpec(tuple(d["columns"]), tuple(float(v) for v in d["mins"]),
                           tuple(float(v) for v in d["maxs"]), int(d["n_features"]))


def normalize(ds: Dataset) -> tuple[Dataset, ScalingSpec]:
    """Affinely map every column to [0, 1]; errors on constant columns.

    The returned dataset keeps the original schema object (bounds stay in
    original units); the ScalingSpec records the exact mapping.
    """
    m = ds.matrix()
    lo, hi = m.min(axis=0), m.max(axis=0)
    constant = [ds.schema.column_names[j] for j in np.flatnonzero(hi == lo)]
    if constant:
        raise DataError(f"constant column(s) {constant}: no scale for [0,1] mapping; "
                        "drop them or supply more varied data")
    spec = ScalingSpec(ds.schema.column_names, tuple(map(float, lo)), tuple(map(float, hi)))
    scaled = spec.transform_matrix(m)
    out = Dataset.from_arrays(ds.schema, scaled[:, :N_FEATURES], scaled[:, N_FEATURES:],
                              ds.sources())
    return out, spec


def denormalize(ds: Dataset, spec: ScalingSpec) -> Dataset:
    """Exact inverse of normalize; errors if the spec's columns mismatch."""
    if spec.columns != ds.schema.column_names:
        raise DataError("scaling spec columns do not match dataset schema")
    m = spec.inverse_matrix(ds.matrix())
    return Dataset.from_arrays(ds.schema, m[:, :N_FEATURES], m[:, N_FEATURES:], ds.sources())


@dataclass(frozen=True)
class OutlierPolicy:
    """Row-removal rule over target columns: none, iqr(multiplier), zscore(threshold)."""

    kind: str
    value: float = 1.5

    def __post_init__(self):
        if self.kind not in ("none", "iqr", "zscore"):
            raise DataError(f"unknown outlier policy {self.kind!r}")
        if self.kind != "none" and self.value <= 0:
            raise DataError(f"outlier policy parameter must be positive, got {self.value}")

    @staticmethod
    def none() -> "OutlierPolicy":
        return OutlierPolicy("none", 1.0)

    @staticmethod
    def iqr(multiplier: float = 1.5) -> "OutlierPolicy":
        return OutlierPolicy("iqr", multiplier)

    @staticmethod
    def zscore(threshold: float = 3.0) -> "OutlierPolicy":
        return OutlierPolicy("zscore", threshold)

    @staticmethod
    def parse(text: str) -> "OutlierPolicy":
        """Parse CLI notation: 'none', 'iqr:1.5', 'zscore:3.0'."""
        kind, _, arg = text.partition(":")
        if kind == "none":
            return OutlierPolicy.none()
        if kind in ("iqr", "zscore"):
            default = 1.5 if kind == "iqr" else 3.0
            return OutlierPolicy(kind, float(arg) if arg else default)
        raise DataError(f"unknown outlier policy {text!r}")


@dataclass(frozen=True)
class RemovalEntry:
    row: int
    column: str
    value: float
    lo: float
    hi: float


@dataclass(frozen=True)
class RemovalReport:
    entries: tuple[RemovalEntry, ...]

    @property
    def removed_rows(self) -> tuple[int, ...]:
        return tuple(sorted({e.row for e in self.entries}))

    def text(self) -> str:
        return "\n".join(
            f"row {e.row} removed: {e.column} = {e.value!r} outside [{e.lo!r}, {e.hi!r}]"
            for e in self.entries)


def _fences(col: np.ndarray, policy: OutlierPolicy) -> tuple[float, float] | None:
    if policy.kind == "iqr":
        q1, q3 = np.quantile(col, [0.25, 0.75])  # linear-interpolation quantiles
        spread = q3 - q1
        return float(q1 - policy.value * spread), float(q3 + policy.value * spread)
    mean = float(np.mean(col))
    sd = float(np.std(col, ddof=1)) if col.size > 1 else 0.0
    if sd == 0.0:
        return None
    return mean - policy.value * sd, mean + policy.value * sd


def remove_outliers(ds: Dataset, policy: OutlierPolicy) -> tuple[Dataset, RemovalReport]:
    """Drop rows whose value in any target column falls strictly outside the
    policy's fences; equality with a fence is inside."""
    if policy.kind == "none":
        return ds, RemovalReport(())
    Y = ds.targets()
    entries = []
    flagged = np.zeros(ds.n, dtype=bool)
    for j, spec in enumerate(ds.schema.targets):
        fence = _fences(Y[:, j], policy)
        if fence is None:
            continue
        lo, hi = fence
        for i in np.flatnonzero((Y[:, j] < lo) | (Y[:, j] > hi)):
            entries.append(RemovalEntry(int(i), spec.name, float(Y[i, j]), lo, hi))
            flagged[i] = True
    kept = np.flatnonzero(~flagged)
    entries.sort(key=lambda e: (e.row, e.column))
    return ds.subset(kept), RemovalReport(tuple(entries))


@dataclass(frozen=True)
class FoldPlan:
    """Disjoint index folds covering {0..n-1}, sizes differing by at most 1."""

    k: int
    seed: int
    folds: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return sum(len(f) for f in self.folds)

    def test_indices(self, fold: int) -> tuple[int, ...]:
        return self.folds[fold]

    def train_indices(self, fold: int) -> tuple[int, ...]:
        return tuple(i for f, idx in enumerate(self.folds) if f != fold for i in idx)


def kfold_split(n: int, k: int, seed: int) -> FoldPlan:
    """Shuffle 0..n-1 with the package generator, partition contiguously."""
    if k < 2:
        raise DataError(f"k must be at least 2, got {k}")
    if k > n:
        raise DataError(f"k={k} exceeds row count n={n}")
    perm = default_rng(seed).permutation(n)
    base, rem = divmod(n, k)
    folds = []
    pos = 0
    for f in range(k):
        size = base + (1 if f < rem else 0)
        folds.append(tuple(int(i) for i in perm[pos:pos + size]))
        pos += size
    return FoldPlan(k, seed, tuple(folds))
