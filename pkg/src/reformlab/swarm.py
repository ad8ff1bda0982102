"""Particle swarm engines: single-objective minimization and multi-objective
search with a bounded non-dominated archive.

Velocity update: v <- w*v + c1*r1*(pbest - x) + c2*r2*(leader - x), with the
inertia weight decayed linearly across iterations.  Positions are clamped to
the box and the violating velocity component zeroed.  All randomness comes
from the package generator, and every draw for an iteration happens before
any objective evaluation, so trajectories are bit-reproducible for a fixed
seed regardless of how evaluations are dispatched.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .rng import default_rng

MINIMIZE = "minimize"
MAXIMIZE = "maximize"


class SwarmError(ValueError):
    pass


@dataclass(frozen=True)
class PsoParams:
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    swarm_size: int = 40
    iterations: int = 500
    inertia_start: float = 0.9
    inertia_end: float = 0.4
    cognitive: float = 2.0
    social: float = 2.0
    velocity_clamp: float = 0.2
    seed: int = 0

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", tuple(map(float, lo)))
        object.__setattr__(self, "upper", tuple(map(float, hi)))
        if lo.size == 0 or lo.shape != hi.shape:
            raise SwarmError("bounds must be non-empty and equal length")
        if np.any(lo >= hi):
            raise SwarmError("every lower bound must be below its upper bound")
        if self.swarm_size < 2:
            raise SwarmError(f"swarm size must be >= 2, got {self.swarm_size}")
        if self.iterations < 1:
            raise SwarmError("iterations must be >= 1")
        for w in (self.inertia_start, self.inertia_end):
            if not (0.0 <= w <= 1.0):
                raise SwarmError(f"inertia weight must lie in [0, 1], got {w}")
        if self.cognitive < 0 or self.social < 0:
            raise SwarmError("cognitive/social coefficients must be >= 0")
        if not (0.0 < self.velocity_clamp <= 1.0):
            raise SwarmError("velocity clamp fraction must lie in (0, 1]")

    @property
    def dim(self) -> int:
        return len(self.lower)

    def box(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.lower), np.array(self.upper)

    def inertia(self, iteration: int) -> float:
        if self.iterations == 1:
            return self.inertia_start
        frac = iteration / (self.iterations - 1)
        return self.inertia_start + (self.inertia_end - self.inertia_start) * frac


@dataclass(frozen=True)
class PsoResult:
    best_position: np.ndarray
    best_value: float
    trace: tuple[float, ...]  # best-ever value after init and each iteration

    def trace_text(self) -> str:
        """Two-column convergence trace: iteration, best-ever value."""
        return "\n".join(f"{i} {v!r}" for i, v in enumerate(self.trace))


def _evaluate(objective: Callable, X: np.ndarray, vectorized: bool, width: int | None
              ) -> np.ndarray:
    if vectorized:
        out = np.asarray(objective(X), dtype=float)
    else:
        out = np.array([objective(x) for x in X], dtype=float)
    expected = (X.shape[0],) if width is None else (X.shape[0], width)
    if out.shape != expected:
        raise SwarmError(f"objective returned shape {out.shape}, expected {expected}")
    # +inf is a legal "worst" value (failure-to-infinity callers); nan and
    # -inf would poison comparisons
    bad = np.isnan(out) | np.isneginf(out)
    if bad.any():
        i = int(np.flatnonzero(bad.reshape(out.shape[0], -1).any(axis=1))[0])
        raise SwarmError(f"objective returned a non-finite value at {X[i].tolist()}")
    return out


def _step(X, V, pbest_pos, leaders, w, params, rng_r1, rng_r2, lo, hi, vmax):
    V = (w * V + params.cognitive * rng_r1 * (pbest_pos - X)
         + params.social * rng_r2 * (leaders - X))
    V = np.clip(V, -vmax, vmax)
    X = X + V
    below, above = X < lo, X > hi
    X = np.clip(X, lo, hi)
    V = np.where(below | above, 0.0, V)
    return X, V


def pso_minimize(objective: Callable, params: PsoParams, *, vectorized: bool = False,
                 init_positions: np.ndarray | None = None) -> PsoResult:
    """Minimize a total objective over the box; returns the best-ever point,
    its value, and the per-iteration best-ever trace (non-increasing)."""
    rng = default_rng(params.seed)
    lo, hi = params.box()
    vmax = params.velocity_clamp * (hi - lo)
    m, d = params.swarm_size, params.dim

    if init_positions is not None:
        X = np.array(init_positions, dtype=float)
        if X.shape != (m, d):
            raise SwarmError(f"init positions must be {m}×{d}")
        X = np.clip(X, lo, hi)
    else:
        X = rng.uniform(lo, hi, size=(m, d))
    V = np.zeros((m, d))

    f = _evaluate(objective, X, vectorized, None)
    pbest_pos, pbest_val = X.copy(), f.copy()
    g = int(np.argmin(f))
    gbest_pos, gbest_val = X[g].copy(), float(f[g])
    trace = [gbest_val]

    for it in range(params.iterations):
        r1 = rng.uniform(size=(m, d))
        r2 = rng.uniform(size=(m, d))
        X, V = _step(X, V, pbest_pos, gbest_pos[None, :], params.inertia(it),
                     params, r1, r2, lo, hi, vmax)
        f = _evaluate(objective, X, vectorized, None)
        improved = f < pbest_val
        pbest_pos[improved] = X[improved]
        pbest_val[improved] = f[improved]
        g = int(np.argmin(pbest_val))
        if pbest_val[g] < gbest_val:
            gbest_val = float(pbest_val[g])
            gbest_pos = pbest_pos[g].copy()
        trace.append(gbest_val)

    return PsoResult(gbest_pos, gbest_val, tuple(trace))


def dominates(a: Sequence[float], b: Sequence[float],
              senses: Sequence[str] | None = None) -> bool:
    """True iff a is no worse than b in every objective (per sense) and
    strictly better in at least one."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise SwarmError(f"objective vectors differ in length: {a.shape} vs {b.shape}")
    if senses is None:
        senses = [MINIMIZE] * a.size
    if len(senses) != a.size:
        raise SwarmError("senses length must match objective count")
    sign = np.array([1.0 if s == MINIMIZE else -1.0 for s in senses])
    av, bv = a * sign, b * sign
    return bool(np.all(av <= bv) and np.any(av < bv))


@dataclass(frozen=True)
class MopsoParams:
    pso: PsoParams
    senses: tuple[str, ...]
    archive_capacity: int = 100

    def __post_init__(self):
        if len(self.senses) < 2:
            raise SwarmError("multi-objective search needs at least 2 objectives")
        if any(s not in (MINIMIZE, MAXIMIZE) for s in self.senses):
            raise SwarmError(f"senses must be {MINIMIZE!r} or {MAXIMIZE!r}")
        if self.archive_capacity < 1:
            raise SwarmError("archive capacity must be >= 1")

    @property
    def n_objectives(self) -> int:
        return len(self.senses)

    def signs(self) -> np.ndarray:
        return np.array([1.0 if s == MINIMIZE else -1.0 for s in self.senses])


@dataclass(frozen=True)
class ParetoSolution:
    """One non-dominated point: decision values in original units plus its
    objective vector (raw senses, not internal minimization form)."""

    decision: tuple[float, ...]
    objectives: tuple[float, ...]
    feasible: bool = True


def crowding_distances(F: np.ndarray) -> np.ndarray:
    """Per-row crowding distance of an objective matrix; boundary rows get inf."""
    n, k = F.shape
    if n <= 2:
        return np.full(n, np.inf)
    dist = np.zeros(n)
    for j in range(k):
        order = np.argsort(F[:, j], kind="stable")
        span = F[order[-1], j] - F[order[0], j]
        dist[order[0]] = dist[order[-1]] = np.inf
        if span <= 0:
            continue
        gaps = (F[order[2:], j] - F[order[:-2], j]) / span
        dist[order[1:-1]] += gaps
    return dist


class _Archive:
    """Bounded non-dominated store (objectives kept in minimization form)."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.positions: list[np.ndarray] = []
        self.objectives: list[np.ndarray] = []

    def __len__(self) -> int:
        return len(self.positions)

    def matrix(self) -> np.ndarray:
        return np.array(self.objectives)

    def insert(self, x: np.ndarray, f: np.ndarray) -> None:
        if self.objectives:
            O = np.array(self.objectives)
            if np.any(np.all(O <= f, axis=1) & np.any(O < f, axis=1)):
                return  # dominated by an existing member
            equal = np.flatnonzero(np.all(O == f, axis=1))
            if any(np.array_equal(self.positions[i], x) for i in equal):
                return  # exact duplicate
            beaten = np.all(O >= f, axis=1) & np.any(O > f, axis=1)
            if beaten.any():
                keep = np.flatnonzero(~beaten)
                self.positions = [self.positions[i] for i in keep]
                self.objectives = [self.objectives[i] for i in keep]
        self.positions.append(x.copy())
        self.objectives.append(f.copy())
        while len(self.positions) > self.capacity:
            dist = crowding_distances(self.matrix())
            drop = int(np.argmin(dist))  # most crowded member goes first
            del self.positions[drop]
            del self.objectives[drop]

    def leaders(self, pick: np.ndarray) -> np.ndarray:
        """Binary-tournament leaders: pick holds uniform draws in [0,1) of
        shape (m, 2); the larger crowding distance wins each tournament."""
        dist = crowding_distances(self.matrix())
        idx = np.minimum((pick * len(self)).astype(int), len(self) - 1)
        first, second = idx[:, 0], idx[:, 1]
        winners = np.where(dist[first] >= dist[second], first, second)
        return np.array([self.positions[i] for i in winners])


def mopso(objectives: Callable, params: MopsoParams, *,
          vectorized: bool = False) -> list[ParetoSolution]:
    """Multi-objective swarm search; returns the mutually non-dominated
    archive with objective vectors in their requested senses."""
    pso = params.pso
    rng = default_rng(pso.seed)
    lo, hi = pso.box()
    vmax = pso.velocity_clamp * (hi - lo)
    m, d = pso.swarm_size, pso.dim
    signs = params.signs()

    X = rng.uniform(lo, hi, size=(m, d))
    V = np.zeros((m, d))
    F = _evaluate(objectives, X, vectorized, params.n_objectives) * signs

    archive = _Archive(params.archive_capacity)
    for i in range(m):
        archive.insert(X[i], F[i])
    pbest_pos, pbest_obj = X.copy(), F.copy()

    for it in range(pso.iterations):
        r1 = rng.uniform(size=(m, d))
        r2 = rng.uniform(size=(m, d))
        pick = rng.uniform(size=(m, 2))
        coin = rng.uniform(size=m)

        leaders = archive.leaders(pick)
        X, V = _step(X, V, pbest_pos, leaders, pso.inertia(it), pso, r1, r2, lo, hi, vmax)
        F = _evaluate(objectives, X, vectorized, params.n_objectives) * signs

        for i in range(m):
            archive.insert(X[i], F[i])
            if dominates(F[i], pbest_obj[i]):
                pbest_pos[i], pbest_obj[i] = X[i].copy(), F[i].copy()
            elif not dominates(pbest_obj[i], F[i]) and coin[i] < 0.5:
                pbest_pos[i], pbest_obj[i] = X[i].copy(), F[i].copy()

    return [ParetoSolution(tuple(map(float, p)), tuple(map(float, o * signs)))
            for p, o in zip(archive.positions, archive.objectives)]
