import math

import numpy as np
import pytest
from scipy.optimize import brentq

from screwon_lab.actionangle import (canonical_check, circle_action, circle_action_derivative,
                                     circle_h, circle_s2, energy_from_actions, real_half_period,
                                     theta1, theta2, theta_omega_bracket, torus_actions)
from screwon_lab.conserved import ConservedSet, conserved_set, hamiltonian
from screwon_lab.core_types import ModelParams
from screwon_lab.dynamics import integrate, theta_phi_rates
from screwon_lab.elliptic import chi_roots, discriminant, torus_roots

from _helpers import state_on_level

P = ModelParams()
Q = ConservedSet.from_cmsh
QA = Q(3, 1, 1, 2)


def test_theta1_endpoints():
    u1, u2, _ = torus_roots(QA, 1)
    wR = real_half_period(QA, 1, 1)
    assert theta1(u1, QA, 1, 1) == pytest.approx(0, abs=1e-12)
    assert theta1(u2, QA, 1, 1) == pytest.approx(wR, rel=1e-10)
    assert theta1(u2, QA, 1, 1, "falling") == pytest.approx(wR, rel=1e-10)


def _sample(q, t0, t1, n=15, branch_sign=1):
    u1 = torus_roots(q, 1)[0]
    x = state_on_level(q, u1, 0.3, branch_sign)
    ts = np.linspace(t0, t1, n)
    X = integrate(x, P, t1, 1e-12, t_eval=ts).states
    th = np.unwrap(np.arctan2(X[:, 1], X[:, 0]))
    udot = X[:, 3] * X[:, 1] - X[:, 4] * X[:, 0]
    return ts, X[:, 5], th, udot


def test_theta1_linear_over_a_period():
    wR = real_half_period(QA, 1, 1)
    ts, u, _, udot = _sample(QA, 0.05 * wR, 1.95 * wR, 30)
    vals = [theta1(a, QA, 1, 1, "rising" if d > 0 else "falling") for a, d in zip(u, udot)]
    assert np.ptp(np.array(vals) - ts) < 1e-6


@pytest.mark.parametrize("patch", ["rising", "falling"])
def test_theta2_linear_within_patch(patch):
    # rising and falling charts of theta2 differ by a constant, so each fit stays in one patch
    wR = real_half_period(QA, 1, 1)
    t0, t1 = (0.05 * wR, 0.95 * wR) if patch == "rising" else (1.05 * wR, 1.95 * wR)
    ts, u, th, udot = _sample(QA, t0, t1)
    assert np.all(udot > 0) if patch == "rising" else np.all(udot < 0)
    vals = np.array([theta2(a, b, QA, 1, 1, patch) for a, b in zip(u, th)])
    slope, icpt = np.polyfit(ts, vals, 1)
    assert slope == pytest.approx(1.0, rel=1e-5)
    assert np.abs(slope * ts + icpt - vals).max() < 1e-5


def test_theta2_linear_in_theta():
    a = theta2(-0.4, 0.3, QA, 1, 1)
    b = theta2(-0.4, 1.3, QA, 1, 1)
    assert b - a == pytest.approx(1.0, rel=1e-12)


def test_theta2_u_derivative_closed_form():
    u1, u2, _ = torus_roots(QA, 1)
    worst = 0.0
    for br in ("rising", "falling"):
        for u in np.linspace(u1, u2, 12)[1:-1]:
            d = 1e-4
            fd = (theta2(u + d, 0.3, QA, 1, 1, br) - theta2(u - d, 0.3, QA, 1, 1, br)) / (2 * d)
            du2, thd, _ = theta_phi_rates(u, QA, 1, 1)
            ud = math.sqrt(du2) * (1 if br == "rising" else -1)
            worst = max(worst, abs(fd - (1 - thd) / ud))
    assert worst < 1e-6


def test_actions():
    I1, I2 = torus_actions(Q(2, 0.5, 1.5, 0), 1, 1)
    assert I2 == 0 and I1 == pytest.approx(1.5 ** 2 / 2)
    q = Q(3, -1, 1, 1)
    u1 = torus_roots(q, 1)[0]
    x = state_on_level(q, u1 + 0.1, 0.4)
    assert conserved_set(x, P).h == pytest.approx(1.0, abs=1e-12)
    I1, I2 = torus_actions(q, 1, 1)
    assert energy_from_actions(I1, I2, q.c, 1, 1) == pytest.approx(hamiltonian(x, P), rel=1e-12)


def test_frequencies():
    k, lam, c, m = 1.3, 0.8, 3.0, -1.0

    def H(s, h):
        I1, I2 = torus_actions(Q(c, m, s, h, lam), lam, k)
        return energy_from_actions(I1, I2, c, lam, k), I1, I2
    s, h, e = 1.0, 1.0, 1e-5
    # dH/dI via the chain rule through (s, h): I1 = k s^2/2 + k h, I2 = -k h
    J = np.array([[k * s, k], [0.0, -k]])
    dH = np.array([(H(s + e, h)[0] - H(s - e, h)[0]) / (2 * e),
                   (H(s, h + e)[0] - H(s, h - e)[0]) / (2 * e)])
    omega = np.linalg.solve(J.T, dH)
    assert omega == pytest.approx([k, k], rel=1e-6)


def test_canonical_table():
    rep = canonical_check(QA, 1, 1, -0.4)
    r = rep["residuals"]
    assert r["{theta1,I1}"] < 1e-5
    assert r["{I1,I2}"] == 0.0
    assert r["{theta1,theta2}"] < 1e-4
    assert rep["max_residual"] < 1e-4
    assert canonical_check(QA, 1, 1, 0.0, branch="falling")["max_residual"] < 1e-4


def test_circle_action_small_omega():
    assert abs(circle_action(1e-9, 3, 1, 1, 1).action) < 1e-8


def test_circle_bracket_identity():
    for om in np.linspace(-2, 2, 20):
        b = theta_omega_bracket(om, 3, 1, 1, 1.4)
        if not math.isfinite(b):
            continue
        assert b * circle_action_derivative(om, 3, 1, 1, 1.4) == pytest.approx(1.0, rel=1e-12)


def test_circular_limit():
    c, m, h, k = 3.0, 1.0, 2.0, 1.0
    s_min = brentq(lambda s: discriminant(Q(c, m, s, h), 1), 0.77, 0.781, xtol=1e-15)
    omega = brentq(lambda w: circle_h(w, c, m, 1) - h, 0.0, 1.0, xtol=1e-15)
    assert circle_s2(omega, c, m, 1) == pytest.approx(s_min ** 2, rel=1e-9)
    # the band collapses onto the double root u = -omega (m + omega)
    roots = chi_roots(Q(c, m, s_min, h), 1)
    ud = [r for r, mu in roots if mu == 2][0]
    assert ud == pytest.approx(-omega * (m + omega), abs=1e-6)
    circ = circle_action(omega, c, m, 1, k, theta=0.3)
    for eps in (1e-3, 1e-5):
        _, I2 = torus_actions(Q(c, m, s_min * (1 + eps), h), 1, k)
        assert I2 == pytest.approx(circ.action, abs=1e-4)
        assert I2 == pytest.approx(-k * h)
    # theta2 is theta plus a function of (u, s, h) on the shrinking band
    s = s_min * (1 + 1e-3)
    u1, u2, _ = torus_roots(Q(c, m, s, h), 1)
    um = 0.5 * (u1 + u2)
    d = theta2(um, 1.3, Q(c, m, s, h), 1, k) - theta2(um, 0.3, Q(c, m, s, h), 1, k)
    assert d == pytest.approx(1.0, abs=1e-10)
