import math

import numpy as np
import pytest

from screwon_lab.conserved import conserved_set, hamiltonian
from screwon_lab.core_types import ModelParams, PhaseState, random_state
from screwon_lab.dynamics import (circular_solution, eom_rhs, horn_gradient_check, horn_solution,
                                  horn_state, horn_tau, horn_velocity, integrate, linearize_static,
                                  sigma2_eigen_closed, theta_phi_rates)
from screwon_lab.elliptic import chi, discriminant, torus_roots
from screwon_lab.conserved import ConservedSet
from screwon_lab.poisson import NILPOTENT, gradient, tensor

P = ModelParams()
rng = np.random.default_rng(31)

def test_static_points():
    assert np.all(eom_rhs(PhaseState([0, 0, -2], [0, 0, 0.4]), P) == 0)
    assert np.all(eom_rhs(PhaseState([1, 2, 3], [0, 0, 0]), P) == 0)

def test_rhs_is_hamiltonian_vector_field():
    params = ModelParams(k=1.4, lam=0.6)
    for _ in range(5):
        x = random_state(rng).as_vector()
        vf = tensor(NILPOTENT, x, params) @ gradient(lambda y: hamiltonian(y, params), x, 1e-4)
        # H is quadratic, so the central difference is exact up to roundoff
        assert np.allclose(eom_rhs(x, params), vf, rtol=1e-9, atol=1e-9)

def test_static_integration():
    x = PhaseState([0, 0, -1], [0, 0, 0.5])
    tr = integrate(x, P, 5.0)
    assert np.abs(tr.states - x.as_vector()).max() < 1e-14

def test_self_convergence():
    x = random_state(rng)
    a = integrate(x, P, 10.0, 1e-10).states[-1]
    b = integrate(x, P, 10.0, 1e-12).states[-1]
    assert np.abs(a - b).max() < 1e-7

def test_bad_tolerance():
    with pytest.raises(ValueError):
        integrate(np.ones(6), P, 1.0, tol=1.0)

def test_rates_at_root_and_polynomial_identity():
    q = ConservedSet.from_cmsh(3, 1, 1, 2)
    u1 = torus_roots(q, 1)[0]
    assert theta_phi_rates(u1, q, 1, 1)[0] == pytest.approx(0, abs=1e-12)
    for u in (-0.5, 0.0, 0.3):
        du2, _, _ = theta_phi_rates(u, q, 1, 1)
        assert du2 == pytest.approx(2 * chi(u, q, 1), abs=1e-12)

def test_rates_on_circle():
    omega, m = 0.6, 0.3
    X = circular_solution(0.0, omega, 0.8, 0.4, m, P)[0]
    q = conserved_set(X, P)
    u = X[5]
    assert u == pytest.approx(-omega * (m + omega))
    _, dth, dph = theta_phi_rates(u, q, 1, 1)
    assert dth == pytest.approx(-omega, abs=1e-10)
    assert dph == pytest.approx(-omega, abs=1e-10)

def test_circular_solution():
    omega, A, B, m = 0.7, 1.1, -0.4, 0.5
    ts = np.linspace(0, 10, 50)
    X = circular_solution(ts, omega, A, B, m, P)
    dS = P.k * omega * np.column_stack([X[:, 4], -X[:, 3]])
    for x, d in zip(X, dS):
        exact = np.array([d[0] / omega, d[1] / omega, 0, d[0], d[1], 0])
        assert np.abs(eom_rhs(x, P) - exact).max() < 1e-12
    q = conserved_set(X[0], P)
    assert discriminant(q, 1) == pytest.approx(0, abs=1e-10 * (1 + q.c ** 2) ** 3)
    Y = circular_solution(ts, omega, 0.0, 0.0, m, P)
    assert np.all(np.abs(Y[:, [0, 1, 3, 4]]) == 0)
    assert np.abs(eom_rhs(Y[0], P)).max() == 0

def test_horn_solution():
    m, s = -1.0, 1.0
    assert horn_tau(m, s, P) == pytest.approx(1 / math.sqrt(3))
    u, _, _ = horn_solution(0.0, m, s, P)
    assert u == pytest.approx(-s + m * m / 2)
    tau = horn_tau(m, s, P)
    u_far, _, _ = horn_solution(np.array([-40 * tau, 40 * tau]), m, s, P)
    assert np.allclose(u_far, s, atol=1e-12)
    ts = np.linspace(-5, 5, 201)
    X = horn_state(ts, m, s, P)
    V = horn_velocity(ts, m, s, P)
    for x, v in zip(X, V):
        assert np.abs(eom_rhs(x, P) - v).max() < 1e-10

def test_horn_gradient_structure():
    rep = horn_gradient_check(np.linspace(-10, 10, 1000), 1.0, 1.0, P)
    assert rep["W_strictly_decreasing"]
    assert rep["min_metric_det"] > 0
    assert rep["thetadot_constant"] and rep["thetadot"] == pytest.approx(0.5)

def test_sigma2_stability():
    rep = linearize_static(PhaseState([0, 0, 0], [0, 0, -1]), P)
    ev = rep.eigenvalues
    assert np.sum(np.abs(ev - 1j) < 1e-10) == 2
    assert np.sum(np.abs(ev + 1j) < 1e-10) == 2
    assert np.sum(np.abs(ev) < 1e-10) == 2
    assert rep.classification == "Center+Flat"

def test_sigma3_stability():
    a, b, m = 0.6, -0.8, 1.2
    rep = linearize_static(PhaseState([a, b, -m], [0, 0, 0]), P)
    w = math.sqrt(a * a + b * b + m * m)
    ev = rep.eigenvalues
    assert np.sum(np.abs(ev - 1j * w) < 1e-10) == 1
    assert np.sum(np.abs(ev + 1j * w) < 1e-10) == 1
    assert rep.reduced_defect == 1
    assert rep.classification == "CenterFlatLinearGrowth"

@pytest.mark.parametrize("m,a", [(0.5, -1.0), (1.0, 0.1), (-0.7, -0.3)])
def test_sigma2_closed_form(m, a):
    rep = linearize_static(PhaseState([0, 0, -m], [0, 0, a]), P)
    nz = [z for z in rep.eigenvalues if abs(z) > 1e-8]
    closed = sigma2_eigen_closed(m, a, P)
    for z in closed:
        assert min(abs(z - w) for w in nz) < 1e-10

def test_not_static_rejected():
    with pytest.raises(ValueError):
        linearize_static(random_state(rng), P)
