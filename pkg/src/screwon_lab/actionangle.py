"""Action-angle variables on toroidal and circular level sets.

Coordinates on the union of tori inside a leaf (c, m) are (s, h, u, theta).
With the simple choice f(h) = -I2(h) = k h and eta = 0:

    I1 = k s^2/2 + k h,  I2 = -k h,
    theta1 = k * (time elapsed since u last passed u_min),
    theta2 = theta + theta1 + int_s^inf s' d_h theta1(u; s', h) ds'.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy import special
from scipy.special import ellipk

from .conserved import ConservedSet
from .dynamics import theta_phi_rates
from .elliptic import DegenerateError, chi, chi_coeffs, ellip_F, torus_roots


@dataclass(frozen=True)
class TorusAA:
    I1: float
    I2: float
    theta1: float
    theta2: float
    Omega1: float
    Omega2: float
    choice: str = "simple"


@dataclass(frozen=True)
class CircleAA:
    action: float
    angle: float | None
    omega: float
    h: float


def _q(c, m, s, h, lam):
    return ConservedSet.from_cmsh(c, m, s, h, lam)


def _tau_parts(u, q, lam, k):
    u1, u2, u3 = torus_roots(q, lam)
    span = u2 - u1
    mod = math.sqrt(span / (u3 - u1))
    pref = 2.0 / math.sqrt(2 * lam * k * k * (u3 - u1))
    x = (u - u1) / span
    if x < -1e-9 or x > 1 + 1e-9:
        raise ValueError(f"u = {u} outside the latitude band [{u1}, {u2}]")
    gamma = math.asin(math.sqrt(min(max(x, 0.0), 1.0)))
    return pref * ellip_F(gamma, mod), pref * float(ellipk(mod * mod))


def time_from_min(u, q, lam: float, k: float) -> float:
    """Time for u to climb from u_min to u: 2 F(gamma, q) / sqrt(2 lam k^2 (u3 - u_min))."""
    return _tau_parts(u, q, lam, k)[0]


def real_half_period(q, lam: float, k: float) -> float:
    return _tau_parts(torus_roots(q, lam)[0], q, lam, k)[1]


def theta1(u, q, lam: float, k: float, branch: str = "rising") -> float:
    """k * t with t the time since u_min; 'falling' is the half with udot < 0."""
    tau, wR = _tau_parts(u, q, lam, k)
    if branch == "rising":
        return k * tau
    if branch == "falling":
        return k * (2 * wR - tau)
    raise ValueError("branch must be 'rising' or 'falling'")


def torus_actions(q, lam: float, k: float):
    return k * q.s ** 2 / 2 + k * q.h, -k * q.h


def energy_from_actions(I1, I2, c, lam, k):
    return k * (I1 + I2) + k * k * (c + 1 / (2 * lam * lam))


def _legendre_FE(sn, cn, mpar):
    d2 = 1 - mpar * sn * sn
    rf = float(special.elliprf(cn * cn, d2, 1.0))
    rd = float(special.elliprd(cn * cn, d2, 1.0))
    F = sn * rf
    return F, F - mpar / 3 * sn ** 3 * rd


def _dh_theta1(u, c, m, s, h, lam, k, branch, dh=None):
    """Exact d theta1 / dh at fixed (u, s): chain rule through the roots of chi.

    dh is accepted for call compatibility and ignored.
    """
    q = _q(c, m, s, h, lam)
    u1, u2, u3 = torus_roots(q, lam)
    coeffs = chi_coeffs(q, lam)
    dcoef = np.polyder(coeffs)
    # implicit derivative of each root: d_h chi = -lam (m u + h)
    du = [lam * (m * r + h) / np.polyval(dcoef, r) for r in (u1, u2, u3)]
    span, big = u2 - u1, u3 - u1
    mpar = span / big
    P = 2.0 / math.sqrt(2 * lam * k * k * big)
    x = min(max((u - u1) / span, 0.0), 1.0)
    sn, cn = math.sqrt(x), math.sqrt(1 - x)
    dlt = math.sqrt(1 - mpar * sn * sn)
    F, E = _legendre_FE(sn, cn, mpar)
    one_m = 1 - mpar
    dF_dm = (E - one_m * F) / (2 * mpar * one_m) - sn * cn / (2 * one_m * dlt)
    # d x, d m and d P along h
    dspan, dbig = du[1] - du[0], du[2] - du[0]
    dx = (-du[0] * span - (u - u1) * dspan) / span ** 2
    dm = (dspan * big - span * dbig) / big ** 2
    dP = -0.5 * P * dbig / big
    dgamma = dx / (2 * sn * cn) if 0 < x < 1 else 0.0
    dtau = dP * F + P * (dgamma / dlt + dF_dm * dm)
    if branch == "rising":
        return k * dtau
    if branch != "falling":
        raise ValueError("branch must be 'rising' or 'falling'")
    K = float(special.ellipk(mpar))
    Ek = float(special.ellipe(mpar))
    dK_dm = (Ek - one_m * K) / (2 * mpar * one_m)
    dwR = dP * K + P * dK_dm * dm
    return k * (2 * dwR - dtau)


S_CUTOFF = 1000.0


def _u_ref(q, lam):
    # a latitude inside every band once s' is large: the bands tend to
    # [-s', lam (c - m^2/2)] from inside
    return lam * (q.c - q.m * q.m / 2) - 1.0


def theta2_correction(u, q, lam: float, k: float, branch: str = "rising",
                      s_cutoff: float | None = None):
    """Regularized int_s^inf s' d_h theta1(u; s', h) ds'.

    Only the u-dependent part of the integrand decays like 1/s'^2; the
    u-independent remainder decays slowly and integrates to a function of
    h alone, which is absorbed into eta(h) (it commutes with everything
    relevant). So the integral is cut at a fixed S (never tied to s, which
    would leak s-dependence into theta2) and the u-dependent tail is
    added as S * (f(S; u) - f(S; u_ref)).
    Returns (value, tail_estimate).
    """
    c, m, s, h = q.c, q.m, q.s, q.h
    S = S_CUTOFF if s_cutoff is None else float(s_cutoff)
    if S < 10 * s:
        raise ValueError(f"s_cutoff = {S} must exceed 10 s = {10 * s}")

    def f(sp, uu=u):
        return sp * _dh_theta1(uu, c, m, sp, h, lam, k, branch)

    # s' = s + w^2 spreads the quadrature nodes toward the lower end
    w_max = math.sqrt(S - s)
    val, _ = quad(lambda w: 2 * w * f(s + w * w), 0.0, w_max, limit=400,
                  epsabs=1e-12, epsrel=1e-11)
    tail = S * (f(S) - f(S, _u_ref(q, lam)))
    return val + tail, abs(tail)


def theta2(u, theta, q, lam: float, k: float, branch: str = "rising",
           s_cutoff: float | None = None, Omega2: float | None = None,
           fprime: float | None = None, eta: float = 0.0) -> float:
    """theta2 = Omega2 (theta/f' + theta1/k - (1/f') int_inf^s s' d_h theta1 ds' + eta).

    Defaults are the simple choice f' = Omega2 = k.
    """
    if Omega2 is None:
        Omega2 = k
    if fprime is None:
        fprime = k
    corr, _ = theta2_correction(u, q, lam, k, branch, s_cutoff)
    t1 = theta1(u, q, lam, k, branch)
    return Omega2 * (theta / fprime + t1 / k + corr / fprime + eta)


def torus_aa(u, theta, q, lam: float, k: float, branch: str = "rising") -> TorusAA:
    I1, I2 = torus_actions(q, lam, k)
    return TorusAA(I1, I2, theta1(u, q, lam, k, branch), theta2(u, theta, q, lam, k, branch),
                   k, k)


def udot(u, q, lam, k, branch):
    du2, _, _ = theta_phi_rates(u, q, lam, k)
    v = math.sqrt(max(du2, 0.0))
    return v if branch == "rising" else -v


def coordinate_brackets(u, q, lam: float, k: float, branch: str = "rising") -> np.ndarray:
    """Poisson brackets among (s, h, u, theta) on the union of tori."""
    s = q.s
    ud = udot(u, q, lam, k, branch)
    _, thd, _ = theta_phi_rates(u, q, lam, k)
    B = np.zeros((4, 4))
    B[1, 3] = 1 / k                    # {h, theta}
    B[0, 3] = -thd / (k * k * s)       # {s, theta}
    B[0, 2] = -ud / (k * k * s)        # {s, u}
    return B - B.T


def canonical_check(q, lam: float, k: float, u: float, theta: float = 0.3,
                    branch: str = "rising", fd: float = 1e-5) -> dict:
    """Residuals of {theta^i, I_j} = delta_ij, {theta1, theta2} = 0, {I1, I2} = 0."""
    c, m = q.c, q.m
    x0 = np.array([q.s, q.h, u, theta])

    def funcs(x):
        s, h, uu, th = x
        qq = _q(c, m, s, h, lam)
        I1, I2 = torus_actions(qq, lam, k)
        return np.array([theta1(uu, qq, lam, k, branch),
                         theta2(uu, th, qq, lam, k, branch), I1, I2])

    J = np.zeros((4, 4))
    for a in range(4):
        e = np.zeros(4)
        e[a] = fd * (1 + abs(x0[a]))
        J[:, a] = (funcs(x0 + e) - funcs(x0 - e)) / (2 * e[a])
    B = coordinate_brackets(u, q, lam, k, branch)
    P = J @ B @ J.T  # rows/cols: theta1, theta2, I1, I2
    table = {
        "{theta1,I1}": P[0, 2], "{theta1,I2}": P[0, 3],
        "{theta2,I1}": P[1, 2], "{theta2,I2}": P[1, 3],
        "{theta1,theta2}": P[0, 1], "{I1,I2}": P[2, 3],
    }
    target = {"{theta1,I1}": 1.0, "{theta2,I2}": 1.0}
    resid = {key: abs(v - target.get(key, 0.0)) for key, v in table.items()}
    return {"brackets": {key: float(v) for key, v in table.items()},
            "residuals": {key: float(v) for key, v in resid.items()},
            "max_residual": float(max(resid.values()))}


# circular level sets

def circle_h(omega: float, c: float, m: float, lam: float) -> float:
    return omega * (2 * c + 3 * m * omega / lam + 2 * omega ** 2 / lam ** 2)


def circle_s2(omega: float, c: float, m: float, lam: float) -> float:
    """s^2 on the circle labelled by omega, from u = -omega (m + omega/lam) and r = rho/|omega|."""
    u = -omega * (m + omega / lam)
    r2 = 2 * c - m * m - 2 * u / lam
    return omega * omega * r2 + u * u


def circle_action(omega: float, c: float, m: float, lam: float, k: float,
                  theta: float | None = None) -> CircleAA:
    h = circle_h(omega, c, m, lam)
    action = -k * omega * (2 * c + 3 * m * omega / lam + 2 * omega ** 2 / lam ** 2)
    return CircleAA(action, theta, omega, h)


def theta_omega_bracket(omega: float, c: float, m: float, lam: float, k: float) -> float:
    return -1.0 / (2 * k * (c + 3 * omega / lam * (m + omega / lam)))


def circle_action_derivative(omega: float, c: float, m: float, lam: float, k: float) -> float:
    return -k * (2 * c + 6 * m * omega / lam + 6 * omega ** 2 / lam ** 2)
