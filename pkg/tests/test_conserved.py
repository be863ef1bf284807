import numpy as np
import pytest

from screwon_lab.conserved import (SubmanifoldTag, classify_submanifold, conserved_set, drift,
                                   hamiltonian, wedge4)
from screwon_lab.core_types import ModelParams, PhaseState, random_state
from screwon_lab.dynamics import circular_solution, integrate, static_trajectory

P = ModelParams()


def test_vacuum():
    q = conserved_set(PhaseState([0, 0, 0], [0, 0, 0]), P)
    assert (q.c, q.m, q.s, q.h) == (0, 0, 0, 0)
    assert q.E == pytest.approx(0.5)


def test_sphere_radius():
    q = conserved_set(PhaseState([0, 0, 0], [3, 2, 1]), P)
    assert q.s ** 2 == pytest.approx(14.0)


def test_energy_matches_hamiltonian():
    rng = np.random.default_rng(3)
    params = ModelParams(k=1.3, lam=0.8)
    for _ in range(1000):
        x = random_state(rng)
        Hd = hamiltonian(x, params)
        Ec = conserved_set(x, params).E * params.k ** 2
        assert Ec == pytest.approx(Hd, rel=1e-12, abs=1e-12)


def test_static_drift_zero():
    x = PhaseState([0, 0, -1], [0, 0, 0.5])
    d = drift(static_trajectory(x, P, np.linspace(0, 10, 11)), P)
    assert all(v == 0.0 for v in d.values())


def test_generic_drift():
    x = random_state(np.random.default_rng(11))
    d = drift(integrate(x, P, 100.0, 1e-10), P)
    assert max(d[k] for k in ("c", "m", "s", "h")) < 1e-7


def test_drift_grows_with_tolerance():
    x = random_state(np.random.default_rng(12))
    worst = []
    for tol in (1e-9, 1e-6, 1e-3):
        d = drift(integrate(x, P, 20.0, tol), P)
        worst.append(max(d[k] for k in ("c", "s", "h")))
    assert worst[0] < worst[1] < worst[2]


def test_wedge4():
    assert wedge4(PhaseState([1, 2, 3], [0, 0, 0]), P) == 0.0
    X = circular_solution(0.4, 1.0, 1.0, 1.0, 0.0, P)[0]
    assert wedge4(X, P) < 1e-10
    x = random_state(np.random.default_rng(5))
    assert wedge4(x, P) / (1 + np.abs(x.as_vector()).max()) ** 6 > 1e-6


def test_classify_submanifold():
    assert classify_submanifold(PhaseState([1, 2, 3], [0, 0, 0]), P) == SubmanifoldTag.Sigma3
    assert classify_submanifold(PhaseState([0, 0, -1], [0, 0, 1]), P) == SubmanifoldTag.HornCenter
    assert classify_submanifold(PhaseState([0, 0, -1], [0, 0, -1]), P) == SubmanifoldTag.Sigma2
    X = circular_solution(0.3, 1.0, 1.0, 1.0, 0.0, P)[0]
    assert classify_submanifold(X, P) == SubmanifoldTag.CircularC
    x = random_state(np.random.default_rng(9))
    assert classify_submanifold(x, P) == SubmanifoldTag.Generic


def test_negative_s_rejected():
    from screwon_lab.conserved import ConservedSet
    with pytest.raises(ValueError):
        ConservedSet(0, 0, -1, 0, 0)
