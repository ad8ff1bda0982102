"""Descriptive analytics: Spearman rank correlations with a clustered
variable order, principal components, and 2-D kernel density grids."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import leaves_list, linkage

from .data import Dataset


class StatsError(ValueError):
    pass


def average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties averaged (the standard rank-correlation rule)."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=float)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation of average ranks; undefined for constant input."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 3:
        raise StatsError("spearman needs two equal columns of at least 3 values")
    rx, ry = average_ranks(x), average_ranks(y)
    a = rx - rx.mean()
    b = ry - ry.mean()
    dx2, dy2 = float(a @ a), float(b @ b)
    if dx2 == 0.0 or dy2 == 0.0:
        raise StatsError("spearman undefined for a constant column")
    return float(a @ b) / np.sqrt(dx2 * dy2)


@dataclass(frozen=True)
class CorrelationReport:
    names: tuple[str, ...]
    matrix: np.ndarray  # nan where a constant column makes the pair undefined
    order: tuple[int, ...]  # clustered ordering; constant columns appended last
    constant: tuple[str, ...]

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        ordered = list(self.order)
        w.writerow([""] + [self.names[j] for j in ordered])
        for i in ordered:
            w.writerow([self.names[i]] +
                       ["" if np.isnan(self.matrix[i, j]) else repr(float(self.matrix[i, j]))
                        for j in ordered])
        return out.getvalue()


def spearman_matrix(dataset: Dataset) -> CorrelationReport:
    """All-pairs Spearman matrix over the 16 columns with a hierarchical
    clustering row order (average linkage on Euclidean distances between
    correlation rows).  Pairs involving a constant column are reported absent."""
    if dataset.n < 3:
        raise StatsError("need at least 3 rows for rank correlations")
    m = dataset.matrix()
    names = dataset.schema.column_names
    p = m.shape[1]
    const = [j for j in range(p) if np.ptp(m[:, j]) == 0.0]
    live = [j for j in range(p) if j not in const]
    ranks = {j: average_ranks(m[:, j]) for j in live}

    matrix = np.full((p, p), np.nan)
    for j in live:
        matrix[j, j] = 1.0
    for a_pos, a in enumerate(live):
        for b in live[a_pos + 1:]:
            r = spearman(ranks[a], ranks[b])  # ranks of ranks are the ranks
            matrix[a, b] = matrix[b, a] = r

    if len(live) > 2:
        sub = matrix[np.ix_(live, live)]
        order_live = [live[i] for i in leaves_list(linkage(sub, method="average",
                                                           metric="euclidean"))]
    else:
        order_live = live
    order = tuple(order_live + const)
    return CorrelationReport(names, matrix, order, tuple(names[j] for j in const))


@dataclass(frozen=True)
class PcaReport:
    loadings: np.ndarray      # columns are orthonormal component vectors
    fractions: np.ndarray     # explained-variance fractions, descending
    scores: np.ndarray        # per-sample scores for the top components
    standardized: bool
    names: tuple[str, ...] = ()

    def to_loadings_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        p = self.loadings.shape[1]
        w.writerow(["variable"] + [f"PC{i+1}" for i in range(p)])
        names = self.names or tuple(f"var{i+1}" for i in range(self.loadings.shape[0]))
        for i, name in enumerate(names):
            w.writerow([name] + [repr(float(v)) for v in self.loadings[i]])
        return out.getvalue()

    def to_fractions_csv(self) -> str:
        lines = ["component,explained_fraction"]
        lines += [f"PC{i+1},{float(f)!r}" for i, f in enumerate(self.fractions)]
        return "\n".join(lines) + "\n"


def pca_matrix(X: np.ndarray, standardize: bool = True, n_scores: int = 3,
               names: tuple[str, ...] = ()) -> PcaReport:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2 or X.shape[1] < 2:
        raise StatsError("PCA needs at least 2 rows and 2 columns")
    if not np.all(np.isfinite(X)):
        raise StatsError("PCA input contains non-finite values")
    centered = X - X.mean(axis=0)
    if standardize:
        sd = X.std(axis=0, ddof=1)
        if np.any(sd == 0.0):
            j = int(np.flatnonzero(sd == 0.0)[0])
            raise StatsError(f"cannot standardize constant column {j}")
        centered = centered / sd
    cov = (centered.T @ centered) / (X.shape[0] - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.maximum(eigvals[order], 0.0)  # clip eigh round-off on rank-deficient input
    eigvecs = eigvecs[:, order]
    for j in range(eigvecs.shape[1]):  # sign convention: largest-magnitude loading positive
        k = int(np.argmax(np.abs(eigvecs[:, j])))
        if eigvecs[k, j] < 0:
            eigvecs[:, j] = -eigvecs[:, j]
    total = float(np.sum(eigvals))
    if total <= 0.0:
        raise StatsError("zero total variance")
    fractions = eigvals / total
    scores = centered @ eigvecs[:, :max(1, min(n_scores, eigvecs.shape[1]))]
    return PcaReport(eigvecs, fractions, scores, standardize, names)


def pca(dataset: Dataset, standardize: bool = True, n_scores: int = 3) -> PcaReport:
    return pca_matrix(dataset.matrix(), standardize, n_scores,
                      dataset.schema.column_names)


@dataclass(frozen=True)
class KdeGrid:
    x_axis: np.ndarray
    y_axis: np.ndarray
    density: np.ndarray  # density[i, j] at (x_axis[i], y_axis[j])
    bandwidth_x: float
    bandwidth_y: float

    def integral(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.density, self.y_axis, axis=1),
                                  self.x_axis))

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["x\\y"] + [repr(float(v)) for v in self.y_axis])
        for i, xv in enumerate(self.x_axis):
            w.writerow([repr(float(xv))] + [repr(float(v)) for v in self.density[i]])
        return out.getvalue()


def silverman_bandwidth(values: np.ndarray) -> float:
    """1.06 * sigma * n^(-1/5) with the sample standard deviation."""
    values = np.asarray(values, dtype=float)
    sd = float(values.std(ddof=1))
    if sd == 0.0:
        raise StatsError("zero variance: no automatic bandwidth")
    return 1.06 * sd * values.size ** (-0.2)


def kde2d(x: np.ndarray, y: np.ndarray, x_axis: np.ndarray | None = None,
          y_axis: np.ndarray | None = None, grid_size: int = 64,
          pad_sigmas: float = 3.0,
          bandwidth_x: float | None = None, bandwidth_y: float | None = None) -> KdeGrid:
    """Product-Gaussian kernel density on a rectangular grid.

    Bandwidths default to the smooth-kernel rule per axis; grid axes default
    to the data range padded by ``pad_sigmas`` standard deviations.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size or x.size < 2:
        raise StatsError("kde2d needs two equal columns of at least 2 values")
    hx = bandwidth_x if bandwidth_x is not None else silverman_bandwidth(x)
    hy = bandwidth_y if bandwidth_y is not None else silverman_bandwidth(y)
    if hx <= 0 or hy <= 0:
        raise StatsError("bandwidths must be positive")
    if x_axis is None:
        pad = pad_sigmas * x.std(ddof=1)
        x_axis = np.linspace(x.min() - pad, x.max() + pad, grid_size)
    if y_axis is None:
        pad = pad_sigmas * y.std(ddof=1)
        y_axis = np.linspace(y.min() - pad, y.max() + pad, grid_size)
    ux = (np.asarray(x_axis)[:, None] - x[None, :]) / hx
    uy = (np.asarray(y_axis)[:, None] - y[None, :]) / hy
    gx = np.exp(-0.5 * ux ** 2)
    gy = np.exp(-0.5 * uy ** 2)
    density = gx @ gy.T / (x.size * 2.0 * np.pi * hx * hy)
    return KdeGrid(np.asarray(x_axis, dtype=float), np.asarray(y_axis, dtype=float),
                   density, float(hx), float(hy))


def response_grid(predict_fn, base: np.ndarray, i: int, j: int,
                  x_axis: np.ndarray, y_axis: np.ndarray) -> np.ndarray:
    """Model response over a 2-D slice: vary features i and j across the axes
    while the remaining features stay at the base vector (typically medians)."""
    base = np.asarray(base, dtype=float)
    grid = np.tile(base, (len(x_axis) * len(y_axis), 1))
    xv, yv = np.meshgrid(x_axis, y_axis, indexing="ij")
    grid[:, i] = xv.ravel()
    grid[:, j] = yv.ravel()
    out = np.asarray(predict_fn(grid), dtype=float)
    return out.reshape(len(x_axis), len(y_axis))
