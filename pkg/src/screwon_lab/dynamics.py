"""Time evolution: the L-S equations, adaptive integration, closed-form
special solutions, reduced rates and linear stability of static points."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .conserved import SubmanifoldTag, classify_submanifold, conserved_set, invariant_array
from .core_types import ModelParams, PhaseState


def _vec(state):
    if isinstance(state, PhaseState):
        return state.as_vector()
    return np.asarray(state, dtype=float).reshape(6)


def eom_rhs(state, params: ModelParams) -> np.ndarray:
    """dL/dt = [K, S] and dS/dt = lam S x L written in components."""
    x = _vec(state)
    k, lam = params.k, params.lam
    L1, L2, L3, S1, S2, S3 = x
    return np.array([
        k * S2,
        -k * S1,
        0.0,
        lam * (S2 * L3 - S3 * L2),
        lam * (S3 * L1 - S1 * L3),
        lam * (S1 * L2 - S2 * L1),
    ])


def eom_jacobian(state, params: ModelParams) -> np.ndarray:
    x = _vec(state)
    k, lam = params.k, params.lam
    L1, L2, L3, S1, S2, S3 = x
    J = np.zeros((6, 6))
    J[0, 4] = k
    J[1, 3] = -k
    J[3] = lam * np.array([0, -S3, S2, 0, L3, -L2])
    J[4] = lam * np.array([S3, 0, -S1, -L3, 0, L1])
    J[5] = lam * np.array([-S2, S1, 0, L2, -L1, 0])
    return J


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (N, 6)
    params: ModelParams
    tol: float
    nfev: int = 0
    steps: int = 0
    method: str = "DOP853"
    _dense: object = field(default=None, repr=False)

    def sample(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        if self._dense is None:
            return np.array([np.interp(ts, self.times, self.states[:, i]) for i in range(6)]).T
        return self._dense(ts).T

    def invariants(self) -> np.ndarray:
        return invariant_array(self.states, self.params)

    def u(self) -> np.ndarray:
        return self.states[:, 5] / self.params.k


def integrate(state0, params: ModelParams, t_end: float, tol: float = 1e-10,
              n_samples: int = 1001, t_eval=None, method: str = "DOP853") -> Trajectory:
    """Adaptive embedded Runge-Kutta integration (scipy solve_ivp).

    rtol = tol and atol = tol * (1 + |x0|); dense output is kept so the
    trajectory can be resampled for finite-difference checks.
    """
    if not 1e-13 <= tol <= 1e-2:
        raise ValueError("tol must lie in [1e-13, 1e-2]")
    x0 = _vec(state0)
    if t_eval is None:
        t_eval = np.linspace(0.0, t_end, n_samples)
    atol = tol * (1.0 + float(np.abs(x0).max()))
    sol = solve_ivp(lambda t, x: eom_rhs(x, params), (0.0, t_end), x0, method=method,
                    rtol=tol, atol=atol, t_eval=t_eval, dense_output=True)
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    states = sol.y.T.copy()
    states[:, 2] = x0[2]  # the L3 rate is structurally zero
    return Trajectory(sol.t, states, params, tol, sol.nfev, len(sol.sol.ts) - 1, method, sol.sol)


def static_trajectory(state0, params: ModelParams, times) -> Trajectory:
    times = np.asarray(times, dtype=float)
    x0 = _vec(state0)
    return Trajectory(times, np.tile(x0, (len(times), 1)), params, 0.0, 0, 0, "static")


def write_csv(traj: Trajectory, path) -> None:
    Q = traj.invariants()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "L1", "L2", "L3", "S1", "S2", "S3", "c", "m", "s", "h", "E"])
        for t, x, q in zip(traj.times, traj.states, Q):
            w.writerow([repr(float(v)) for v in (t, *x, *q)])


# reduced dynamics on a level set

def theta_phi_rates(u, q, lam: float, k: float, tol: float = 1e-12):
    """(du^2, dtheta, dphi) at latitude u on the level set q.

    Where r^2 = 2c - m^2 - 2u/lam or rho^2 = s^2 - u^2 vanishes the
    numerator h + m u vanishes with it on any level set, and the ratio
    is replaced by its limit along the level set.
    """
    c, m, s, h = q.c, q.m, q.s, q.h
    r2 = 2 * c - m * m - 2 * u / lam
    rho2 = s * s - u * u
    hm = h + m * u
    du2 = lam ** 2 * k ** 2 * (rho2 * r2 - hm * hm)
    scale = 1 + abs(c) + m * m + s * s + abs(h) + abs(u) * (1 + abs(m))
    if abs(r2) < tol * scale:
        if abs(hm) > math.sqrt(tol) * scale:
            raise ValueError("r = 0 with h + m u != 0 is not on a level set")
        ratio_r = -m * lam / 2
    else:
        ratio_r = hm / r2
    if abs(rho2) < tol * scale:
        if abs(hm) > math.sqrt(tol) * scale:
            raise ValueError("rho = 0 with h + m u != 0 is not on a level set")
        # h + m u = m (u - u_p) and s^2 - u^2 = -(u - u_p)(u + u_p)
        up = s if u > 0 else -s
        ratio_rho = -m / (2 * up) if up != 0 else 0.0
    else:
        ratio_rho = hm / rho2
    dtheta = -k * ratio_r
    dphi = k * m * lam + k * lam * u * ratio_rho
    return du2, dtheta, dphi


# special solutions

def circular_solution(t, omega: float, A: float, B: float, m: float, params: ModelParams):
    """Uniform rotation with S_{1,2} = omega L_{1,2}. Returns (N, 6) states."""
    if omega == 0:
        raise ValueError("omega = 0 is the static Sigma3 family")
    k, lam = params.k, params.lam
    t = np.atleast_1d(np.asarray(t, dtype=float))
    ph = k * omega * t
    S1 = k * (A * np.sin(ph) + B * np.cos(ph))
    S2 = k * (A * np.cos(ph) - B * np.sin(ph))
    u = -omega * (m + omega / lam)
    X = np.column_stack([S1 / omega, S2 / omega, np.full_like(t, -m * k),
                         S1, S2, np.full_like(t, k * u)])
    return X


def horn_tau(m: float, s: float, params: ModelParams) -> float:
    lam, k = params.lam, params.k
    if 4 * s <= lam * m * m:
        raise ValueError("horn torus needs 4 s > lam m^2")
    return 1.0 / math.sqrt(lam * k * k * (4 * s - lam * m * m))


def horn_solution(t, m: float, s: float, params: ModelParams, theta0: float = 0.0,
                  phi0: float | None = None):
    """(u, theta, phi) on the horn torus h = -m s, c = m^2/2 + s/lam.

    u dips from s to u1 = -s + lam m^2/2 at t = 0 and returns. The
    default phi0 makes r rho cos(theta - phi) = h + m u at t = 0.
    """
    lam, k = params.lam, params.k
    tau = horn_tau(m, s, params)
    t = np.asarray(t, dtype=float)
    u1 = -s + lam * m * m / 2
    th = np.tanh(t / (2 * tau))
    u = u1 + (s - u1) * th * th
    if phi0 is None:
        phi0 = theta0 - (math.pi if m > 0 else 0.0)
    theta = theta0 + k * m * lam * t / 2
    if m == 0:
        # the orbit passes through the south pole at t = 0
        phi = phi0 + math.pi / 2 * np.sign(t)
    else:
        phi = phi0 + k * m * lam * t / 2 + np.arctan(th / (k * tau * m * lam))
    return u, theta, phi


def horn_state(t, m: float, s: float, params: ModelParams, theta0: float = 0.0) -> np.ndarray:
    """Full (N, 6) states along the horn-torus homoclinic orbit."""
    lam, k = params.lam, params.k
    u, theta, phi = horn_solution(t, m, s, params, theta0)
    u = np.atleast_1d(u)
    theta = np.atleast_1d(theta)
    phi = np.atleast_1d(phi)
    r = np.sqrt(np.maximum(2 * (s - u) / lam, 0.0))
    rho = np.sqrt(np.maximum(s * s - u * u, 0.0))
    return np.column_stack([k * r * np.cos(theta), k * r * np.sin(theta), np.full_like(u, -m * k),
                            k * rho * np.cos(phi), k * rho * np.sin(phi), k * u])


def horn_velocity(t, m: float, s: float, params: ModelParams, theta0: float = 0.0) -> np.ndarray:
    """Exact time derivative of horn_state (valid where r, rho > 0)."""
    lam, k = params.lam, params.k
    tau = horn_tau(m, s, params)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    u, theta, phi = horn_solution(t, m, s, params, theta0)
    u1 = -s + lam * m * m / 2
    th = np.tanh(t / (2 * tau))
    sech2 = 1 - th * th
    udot = (s - u1) * th * sech2 / tau
    a = k * tau * m * lam
    thdot = k * m * lam / 2
    phdot = k * m * lam / 2 + (sech2 / (2 * tau * a)) / (1 + (th / a) ** 2)
    r = np.sqrt(2 * (s - u) / lam)
    rho = np.sqrt(s * s - u * u)
    rdot = -udot / (lam * r)
    rhodot = -u * udot / rho
    ct, st, cp, sp = np.cos(theta), np.sin(theta), np.cos(phi), np.sin(phi)
    return k * np.column_stack([
        rdot * ct - r * st * thdot,
        rdot * st + r * ct * thdot,
        np.zeros_like(t),
        rhodot * cp - rho * sp * phdot,
        rhodot * sp + rho * cp * phdot,
        udot,
    ])


def horn_gradient_check(times, m: float, s: float, params: ModelParams, eps: float = 1.0) -> dict:
    """Gradient-flow structure on the horn torus.

    W = -sign(km) theta must decrease, and the inverse metric
    sign(km) [[Y, phidot], [phidot, thetadot]] with
    Y = phidot^2/thetadot + sign(km) eps must be positive definite.
    """
    k, lam = params.k, params.lam
    times = np.asarray(times, dtype=float)
    sg = math.copysign(1.0, k * m)
    tau = horn_tau(m, s, params)
    _, theta, _ = horn_solution(times, m, s, params)
    th = np.tanh(times / (2 * tau))
    thetadot = np.full_like(times, k * m * lam / 2)
    # d/dt of arctan(tanh(t/2tau)/(k tau m lam))
    a = k * tau * m * lam
    sech2 = 1 - th * th
    phidot = k * m * lam / 2 + (sech2 / (2 * tau * a)) / (1 + (th / a) ** 2)
    W = -sg * theta
    dets = []
    mins = []
    for pd, tdot in zip(phidot, thetadot):
        Y = pd * pd / tdot + sg * eps
        G = sg * np.array([[Y, pd], [pd, tdot]])
        dets.append(np.linalg.det(G))
        mins.append(np.linalg.eigvalsh(G).min())
    dW = np.diff(W)
    return {
        "W_strictly_decreasing": bool(np.all(dW < 0)),
        "min_metric_det": float(np.min(dets)),
        "min_metric_eig": float(np.min(mins)),
        "metric_positive_definite": bool(np.min(mins) > 0),
        "thetadot_constant": bool(np.ptp(thetadot) == 0.0),
        "thetadot": float(thetadot[0]),
    }


# linear stability of static points

@dataclass
class StabilityReport:
    tag: str
    eigenvalues: np.ndarray
    multiplicities: list  # (eigenvalue, algebraic, geometric)
    defect: int
    classification: str
    reduced_defect: int | None = None


def clustered_eigenvalues(A: np.ndarray, cluster_tol: float = 1e-6):
    """Eigenvalues with multiplicities.

    Nearby eigenvalues of a defective block are O(eps^(1/p)) apart; their
    mean is accurate to O(eps), so each cluster is replaced by its mean.
    """
    ev = np.linalg.eigvals(A)
    scale = 1.0 + np.abs(A).max()
    used = np.zeros(len(ev), bool)
    clusters = []
    for i in range(len(ev)):
        if used[i]:
            continue
        grp = [j for j in range(len(ev)) if not used[j] and abs(ev[j] - ev[i]) < cluster_tol * scale]
        for j in grp:
            used[j] = True
        clusters.append((complex(np.mean(ev[grp])), len(grp)))
    out = []
    norm = np.linalg.norm(A, 2) or 1.0
    n = A.shape[0]
    for mu, alg in clusters:
        sv = np.linalg.svd(A - mu * np.eye(n), compute_uv=False)
        rank = int(np.sum(sv > 1e-8 * max(norm, 1.0)))
        out.append((mu, alg, n - rank))
    return out


def linearize_static(point, params: ModelParams, tol: float = 1e-8) -> StabilityReport:
    x = _vec(point)
    rhs = eom_rhs(x, params)
    if np.abs(rhs).max() > tol * (1 + np.abs(x).max()) ** 2:
        raise ValueError("point is not static")
    tag = classify_submanifold(x, params, tol)
    if tag == SubmanifoldTag.HornCenter:
        tag = SubmanifoldTag.Sigma2
    if tag not in (SubmanifoldTag.Sigma2, SubmanifoldTag.Sigma3):
        raise ValueError(f"static point has unexpected tag {tag}")
    J = eom_jacobian(x, params)
    mult = clustered_eigenvalues(J)
    eig = []
    for mu, alg, _ in mult:
        eig.extend([mu] * alg)
    eig = np.array(sorted(eig, key=lambda z: (round(z.imag, 9), round(z.real, 9))))
    defect = sum(alg - geo for _, alg, geo in mult)
    # drop the structurally flat L3 direction (row and column 2)
    keep = [0, 1, 3, 4, 5]
    red = clustered_eigenvalues(J[np.ix_(keep, keep)])
    rdef = sum(alg - geo for _, alg, geo in red)
    if np.abs(eig.real).max() > 1e-9 * (1 + np.abs(J).max()):
        # not covered by the two neutral classes; S3 on the wrong side of the parabola
        cls = "Hyperbolic"
    else:
        cls = "Center+Flat" if defect == 0 else "CenterFlatLinearGrowth"
    return StabilityReport(tag.value, eig, mult, defect, cls, rdef)


def sigma2_eigen_closed(m: float, a: float, params: ModelParams) -> np.ndarray:
    """Nonzero eigenvalues at the Sigma2 point L = (0,0,-mk), S = (0,0,a k)."""
    k, lam = params.k, params.lam
    inner = np.sqrt(complex(-4 * a * lam + m * m * lam * lam))
    out = []
    for sg in (1, -1):
        lp = k * np.sqrt(complex(2 * a * lam - m * m * lam * lam + sg * m * lam * inner)) / math.sqrt(2)
        out.extend([lp, -lp])
    return np.array(out)
