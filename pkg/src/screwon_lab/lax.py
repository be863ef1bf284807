"""Lax matrices, trace invariants and r-matrix checks.

Trace convention: Tr X = -2 tr X, so that Tr(t_a t_b) = delta_ab for
t_a = sigma_a / 2i.
"""
from __future__ import annotations

import numpy as np

from .core_types import ModelParams, PhaseState
from .poisson import EUCLIDEAN, NILPOTENT, PoissonKind, tensor

SIGMA = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)
T = SIGMA / 2j
I2 = np.eye(2, dtype=complex)
# permutation on C^2 (x) C^2
PSWAP = (np.eye(4) + sum(np.kron(s, s) for s in SIGMA)) / 2


def Tr(X) -> complex:
    return -2 * np.trace(X)


def _vec(state):
    if isinstance(state, PhaseState):
        return state.as_vector()
    return np.asarray(state, dtype=float).reshape(6)


def su2(components) -> np.ndarray:
    return np.einsum("a,aij->ij", np.asarray(components, dtype=complex), T)


def lax_components(state, params: ModelParams, zeta):
    x = _vec(state)
    K = np.array([0.0, 0.0, -params.k])
    return -K * zeta ** 2 + x[:3] * zeta + x[3:] / params.lam


def lax_pair(state, params: ModelParams, zeta: complex):
    """A(z) = -K z^2 + L z + S/lam and B(z) = S/z."""
    if zeta == 0:
        raise ValueError("B = S/zeta is undefined at zeta = 0")
    x = _vec(state)
    A = su2(lax_components(x, params, zeta))
    B = su2(x[3:] / zeta)
    return A, B


def _resample(trajectory, dt):
    t0, t1 = trajectory.times[0], trajectory.times[-1]
    n = int(np.floor((t1 - t0) / dt)) + 1
    ts = t0 + dt * np.arange(n)
    return ts, trajectory.sample(ts)


def lax_residual(trajectory, params: ModelParams, zetas, dt: float = 1e-3,
                 max_points: int = 400) -> float:
    """max ||dA/dt - [B, A]||_F / (1 + ||A||_F) over samples and zetas.

    dA/dt uses the 4th-order central stencil on a uniform resampling.
    """
    ts, X = _resample(trajectory, dt)
    if len(ts) < 5:
        raise ValueError("trajectory too short for the 5-point stencil")
    idx = np.arange(2, len(ts) - 2)
    if len(idx) > max_points:
        idx = idx[np.linspace(0, len(idx) - 1, max_points).astype(int)]
    worst = 0.0
    for z in zetas:
        for i in idx:
            As = [su2(lax_components(X[j], params, z)) for j in (i - 2, i - 1, i + 1, i + 2)]
            dA = (As[0] - 8 * As[1] + 8 * As[2] - As[3]) / (12 * dt)
            A, B = lax_pair(X[i], params, z)
            res = np.linalg.norm(dA - (B @ A - A @ B)) / (1 + np.linalg.norm(A))
            worst = max(worst, float(res))
    return worst


def _matpoly_mul(P, Q):
    out = [np.zeros((2, 2), complex) for _ in range(len(P) + len(Q) - 1)]
    for i, a in enumerate(P):
        for j, b in enumerate(Q):
            out[i + j] = out[i + j] + a @ b
    return out


def trace_poly(state, params: ModelParams, n: int) -> np.ndarray:
    """Coefficients of Tr A^n(zeta), highest power first (real parts)."""
    if n not in (2, 4):
        raise ValueError("n must be 2 or 4")
    x = _vec(state)
    K = np.array([0.0, 0.0, -params.k])
    # ascending powers: S/lam, L, -K
    A = [su2(x[3:] / params.lam), su2(x[:3]), su2(-K)]
    P = A
    for _ in range(n - 1):
        P = _matpoly_mul(P, A)
    coeffs = np.array([Tr(M) for M in P])
    return coeffs[::-1].real.copy()


def trace_A2_closed(q, params: ModelParams) -> np.ndarray:
    k2 = params.k ** 2
    lam = params.lam
    return k2 * np.array([1.0, -2 * q.m, 2 * q.c, 2 * q.h / lam, q.s ** 2 / lam ** 2])


def trace_A4_closed(q, params: ModelParams) -> np.ndarray:
    """Tr A^4 = -(k^4/4) P(zeta)^2 with P = Tr A^2 / k^2."""
    P = trace_A2_closed(q, params) / params.k ** 2
    return -(params.k ** 4 / 4) * np.convolve(P, P)


def trace_A4_printed(q, params: ModelParams) -> np.ndarray:
    """Coefficients as typeset in the source derivation, kept for comparison.

    Differs from the correct expansion at zeta^7, zeta^6, zeta^5, zeta^4
    and in the lambda powers of zeta^1 and zeta^0.
    """
    c, m, s, h, lam = q.c, q.m, q.s, q.h, params.lam
    s2 = s * s
    co = [
        -0.25,
        0.25 * m,
        -(c + 0.5 * m + 2 * m * m),
        m * c - h / lam,
        -(c * c + s2 / lam ** 2 - 2 * m * h / lam),
        -(2 * h * c / lam - m * s2 / lam ** 2),
        -(c * s2 + h * h) / lam ** 2,
        -h * s2,
        -0.25 * s2 * s2,
    ]
    return params.k ** 4 * np.array(co)


def _lax_grad(params: ModelParams, zeta, laurent: bool):
    # dA_a / dxi_i, shape (3, 6)
    G = np.zeros((3, 6), complex)
    G[:, :3] = zeta * np.eye(3)
    G[:, 3:] = np.eye(3) / params.lam
    if laurent:
        G = G / zeta ** 2
    return G


def fundamental_bracket(state, params: ModelParams, kind: PoissonKind, zeta, zeta_p):
    """{A(z) (x) A(z')} as a 4x4 matrix, from the Poisson tensor."""
    laurent = kind == EUCLIDEAN
    Pi = tensor(kind, state, params)
    G = _lax_grad(params, zeta, laurent)
    Gp = _lax_grad(params, zeta_p, laurent)
    Bab = G @ Pi @ Gp.T
    return sum(Bab[a, b] * np.kron(T[a], T[b]) for a in range(3) for b in range(3))


def r_matrix(params: ModelParams, zeta, zeta_p, kind: PoissonKind = NILPOTENT,
             scale: float = 1.0):
    if zeta == zeta_p:
        raise ValueError("r has a simple pole at zeta = zeta'")
    r = -PSWAP / (2 * params.lam * (zeta - zeta_p))
    if kind == EUCLIDEAN:
        r = params.lam ** 2 * r
    return scale * r


def rmatrix_residual(state, params: ModelParams, kind: PoissonKind, zeta, zeta_p,
                     r_scale: float = 1.0) -> float:
    """max |{A (x) A'} - [r, A (x) 1 + 1 (x) A']|; r_scale != 1 injects a fault."""
    if kind not in (NILPOTENT, EUCLIDEAN):
        raise ValueError("r-matrix is defined for the nilpotent and Euclidean brackets")
    x = _vec(state)
    A = su2(lax_components(x, params, zeta))
    Ap = su2(lax_components(x, params, zeta_p))
    if kind == EUCLIDEAN:
        A, Ap = A / zeta ** 2, Ap / zeta_p ** 2
    r = r_matrix(params, zeta, zeta_p, kind, r_scale)
    M = np.kron(A, I2) + np.kron(I2, Ap)
    lhs = fundamental_bracket(x, params, kind, zeta, zeta_p)
    return float(np.abs(lhs - (r @ M - M @ r)).max())
