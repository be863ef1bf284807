import numpy as np
import pytest

from screwon_lab.conserved import conserved_set, hamiltonian
from screwon_lab.core_types import ModelParams, random_state
from screwon_lab.poisson import (EUCLIDEAN, NILPOTENT, bracket, bracket_fn, jacobi_residual,
                                 pencil, pencil_casimirs)

P = ModelParams()
rng = np.random.default_rng(7)


def H(x):
    return hamiltonian(x, P)


def test_nilpotent_LL_zero():
    for _ in range(5):
        x = random_state(rng)
        assert bracket(NILPOTENT, 0, 1, x, P) == 0.0


def test_nilpotent_S1S2():
    x = np.array([0, 0, -1, 0.3, 0.2, 0.1])
    assert bracket(NILPOTENT, 3, 4, x, P) == pytest.approx(-1.0)


def test_euclidean_L1L2():
    x = np.array([0, 0, 1, 0.3, 0.2, 0.1])
    assert bracket(EUCLIDEAN, 0, 1, x, P) == pytest.approx(-1.0)


def test_bad_index():
    with pytest.raises(IndexError):
        bracket(NILPOTENT, 6, 0, np.zeros(6), P)


def test_antisymmetry():
    x = random_state(rng)

    def f(y):
        return np.sin(y[0]) * y[4] + y[2] ** 2 * np.cos(y[5])
    assert abs(bracket_fn(NILPOTENT, f, f, x, P)) < 1e-10


def test_casimirs_commute_with_H():
    x = random_state(rng)

    def c(y):
        return conserved_set(y, P).c

    def m(y):
        return conserved_set(y, P).m

    def s2(y):
        return conserved_set(y, P).s ** 2
    assert abs(bracket_fn(NILPOTENT, H, c, x, P)) < 1e-8
    assert abs(bracket_fn(NILPOTENT, H, m, x, P)) < 1e-8
    assert abs(bracket_fn(EUCLIDEAN, H, s2, x, P)) < 1e-8


def test_jacobi():
    x = random_state(rng)
    assert jacobi_residual(NILPOTENT, x, P) == 0.0
    assert jacobi_residual(EUCLIDEAN, x, P) == 0.0
    assert jacobi_residual(pencil(0.37), x, P) < 1e-12


def test_pencil_casimirs_limits():
    x = random_state(rng)
    q = conserved_set(x, P)
    assert pencil_casimirs(0.0, x, P) == pytest.approx((q.m / P.lam, q.c))
    assert pencil_casimirs(1.0, x, P) == pytest.approx((q.h, -q.s ** 2 / 2))


def test_pencil_casimirs_kernel():
    x = random_state(rng)
    kind = pencil(0.5)
    for idx in range(2):
        def C(y, idx=idx):
            return pencil_casimirs(0.5, y, P)[idx]
        for a in range(6):
            val = bracket_fn(kind, C, lambda y, a=a: y[a], x, P)
            assert abs(val) < 1e-8
