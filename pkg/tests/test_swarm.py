import numpy as np
import pytest

from reformlab.swarm import (MAXIMIZE, MINIMIZE, MopsoParams, PsoParams,
                             SwarmError, crowding_distances, dominates, mopso,
                             pso_minimize)


def sphere(X):
    return np.sum(X ** 2, axis=1)


# ---------------------------------------------------------------- pso

def test_pso_sphere_converges():
    hits = 0
    for seed in range(3):
        params = PsoParams(lower=(-5.0,) * 10, upper=(5.0,) * 10,
                           swarm_size=40, iterations=500, seed=seed)
        res = pso_minimize(sphere, params, vectorized=True)
        if res.best_value < 1e-4:
            hits += 1
    assert hits == 3


def test_pso_1d_quadratic():
    params = PsoParams(lower=(0.0,), upper=(10.0,), swarm_size=30,
                       iterations=200, seed=1)
    res = pso_minimize(lambda X: (X[:, 0] - 3.0) ** 2, params, vectorized=True)
    assert abs(res.best_position[0] - 3.0) < 1e-3


def test_pso_fixed_point_at_optimum():
    params = PsoParams(lower=(-2.0, -2.0), upper=(2.0, 2.0), swarm_size=5,
                       iterations=50, seed=0)
    start = np.zeros((5, 2))
    res = pso_minimize(sphere, params, vectorized=True, init_positions=start)
    assert res.best_value == 0.0
    assert res.best_position.tolist() == [0.0, 0.0]


def test_pso_trace_non_increasing_and_bounds():
    params = PsoParams(lower=(-3.0,) * 4, upper=(1.0,) * 4, swarm_size=12,
                       iterations=80, seed=3)
    seen = []

    def objective(X):
        seen.append(X.copy())
        return sphere(X)

    res = pso_minimize(objective, params, vectorized=True)
    assert all(b <= a for a, b in zip(res.trace, res.trace[1:]))
    allX = np.vstack(seen)
    assert np.all(allX >= -3.0) and np.all(allX <= 1.0)
    assert res.trace[-1] == res.best_value


def test_pso_bit_reproducible():
    params = PsoParams(lower=(-1.0,) * 3, upper=(1.0,) * 3, swarm_size=8,
                       iterations=40, seed=11)
    a = pso_minimize(sphere, params, vectorized=True)
    b = pso_minimize(sphere, params, vectorized=True)
    assert a.trace == b.trace
    assert a.best_position.tolist() == b.best_position.tolist()
    # scalar-objective path must walk the same trajectory
    c = pso_minimize(lambda x: float(np.sum(x ** 2)), params)
    assert c.trace == a.trace


def test_pso_rejects_non_finite_objective():
    params = PsoParams(lower=(-1.0,), upper=(1.0,), swarm_size=4,
                       iterations=5, seed=0)
    with pytest.raises(SwarmError, match="non-finite"):
        pso_minimize(lambda X: np.full(X.shape[0], np.nan), params, vectorized=True)


def test_pso_params_validation():
    with pytest.raises(SwarmError):
        PsoParams(lower=(0.0,), upper=(0.0,))
    with pytest.raises(SwarmError):
        PsoParams(lower=(0.0,), upper=(1.0,), swarm_size=1)
    with pytest.raises(SwarmError):
        PsoParams(lower=(0.0,), upper=(1.0,), inertia_start=1.5)


# ---------------------------------------------------------------- dominance

def test_dominates_examples():
    assert dominates((1.0, 1.0), (2.0, 2.0))
    assert not dominates((1.0, 2.0), (2.0, 1.0))
    assert not dominates((2.0, 1.0), (1.0, 2.0))
    assert not dominates((1.0, 1.0), (1.0, 1.0))


def test_dominates_senses_and_errors():
    assert dominates((5.0, 1.0), (4.0, 1.0), senses=(MAXIMIZE, MINIMIZE))
    assert not dominates((5.0, 2.0), (4.0, 1.0), senses=(MAXIMIZE, MINIMIZE))
    with pytest.raises(SwarmError):
        dominates((1.0,), (1.0, 2.0))


# ---------------------------------------------------------------- mopso

def two_objectives(X):
    x = X[:, 0]
    return np.column_stack([x ** 2, (x - 2.0) ** 2])


def test_mopso_finds_convex_front():
    params = MopsoParams(
        pso=PsoParams(lower=(-5.0,), upper=(5.0,), swarm_size=40,
                      iterations=200, seed=0),
        senses=(MINIMIZE, MINIMIZE), archive_capacity=100)
    sols = mopso(two_objectives, params, vectorized=True)
    xs = np.array([s.decision[0] for s in sols])
    f1 = np.array([s.objectives[0] for s in sols])
    f2 = np.array([s.objectives[1] for s in sols])
    assert xs.min() >= -0.05 and xs.max() <= 2.05
    assert f1.min() < 0.01 and f2.min() < 0.01
    for i, a in enumerate(sols):
        for j, b in enumerate(sols):
            if i != j:
                assert not dominates(a.objectives, b.objectives)


def test_mopso_identical_objectives_collapse():
    params = MopsoParams(
        pso=PsoParams(lower=(-5.0,), upper=(5.0,), swarm_size=30,
                      iterations=150, seed=2),
        senses=(MINIMIZE, MINIMIZE), archive_capacity=50)
    sols = mopso(lambda X: np.column_stack([X[:, 0] ** 2, X[:, 0] ** 2]),
                 params, vectorized=True)
    objs = np.array([s.objectives for s in sols])
    assert np.ptp(objs, axis=0).max() < 1e-2


def test_mopso_maximize_equals_negated_minimize():
    pso = PsoParams(lower=(-5.0,), upper=(5.0,), swarm_size=25, iterations=60, seed=4)
    smin = mopso(two_objectives, MopsoParams(pso=pso, senses=(MINIMIZE, MINIMIZE)),
                 vectorized=True)
    smax = mopso(lambda X: -two_objectives(X),
                 MopsoParams(pso=pso, senses=(MAXIMIZE, MAXIMIZE)), vectorized=True)
    assert sorted(s.decision for s in smin) == sorted(s.decision for s in smax)


def test_mopso_capacity_respected():
    params = MopsoParams(
        pso=PsoParams(lower=(-5.0,), upper=(5.0,), swarm_size=30,
                      iterations=100, seed=1),
        senses=(MINIMIZE, MINIMIZE), archive_capacity=7)
    sols = mopso(two_objectives, params, vectorized=True)
    assert 1 <= len(sols) <= 7


def test_mopso_params_validation():
    pso = PsoParams(lower=(0.0,), upper=(1.0,))
    with pytest.raises(SwarmError):
        MopsoParams(pso=pso, senses=("minimize",))
    with pytest.raises(SwarmError):
        MopsoParams(pso=pso, senses=("minimize", "sideways"))
    with pytest.raises(SwarmError):
        MopsoParams(pso=pso, senses=("minimize", "minimize"), archive_capacity=0)


def test_crowding_distance_boundaries_infinite():
    F = np.array([[0.0, 3.0], [1.0, 2.0], [2.0, 1.0], [3.0, 0.0]])
    d = crowding_distances(F)
    assert np.isinf(d[0]) and np.isinf(d[3])
    assert np.isfinite(d[1]) and np.isfinite(d[2])
