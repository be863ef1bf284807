"""Conserved quantities, energy, independence of their differentials and
membership tests for the loci where the differentials degenerate."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core_types import ModelParams, PhaseState


@dataclass(frozen=True)
class ConservedSet:
    c: float
    m: float
    s: float
    h: float
    E: float  # H / k^2

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("s must be nonnegative")

    @classmethod
    def from_cmsh(cls, c, m, s, h, lam=1.0) -> "ConservedSet":
        return cls(float(c), float(m), float(s), float(h),
                   float(s) ** 2 / 2 + float(c) + 1.0 / (2 * lam * lam))


class SubmanifoldTag(str, Enum):
    Generic = "Generic"
    Sigma2 = "Sigma2"
    Sigma3 = "Sigma3"
    CircularC = "CircularC"
    C1 = "C1"
    C2 = "C2"
    HornInterior = "HornInterior"
    HornCenter = "HornCenter"


def _split(state):
    if isinstance(state, PhaseState):
        return state.L, state.S
    x = np.asarray(state, dtype=float).reshape(6)
    return x[:3], x[3:]


def conserved_set(state, params: ModelParams) -> ConservedSet:
    k = params.require_k()
    lam = params.lam
    L, S = _split(state)
    k2 = k * k
    c = (0.5 * float(L @ L) + k / lam * S[2]) / k2
    m = -L[2] / k
    s = math.sqrt(float(S @ S) / k2)
    h = float(S @ L) / k2
    return ConservedSet(c, m, s, h, s * s / 2 + c + 1 / (2 * lam * lam))


def hamiltonian(state, params: ModelParams) -> float:
    L, S = _split(state)
    k, lam = params.k, params.lam
    return 0.5 * float(S @ S + L @ L) + k / lam * S[2] + k * k / (2 * lam * lam)


def invariant_array(states, params: ModelParams) -> np.ndarray:
    """Rows of (c, m, s, h, E) for an (N, 6) array of states."""
    X = np.atleast_2d(np.asarray(states, dtype=float))
    k, lam = params.require_k(), params.lam
    L, S = X[:, :3], X[:, 3:]
    k2 = k * k
    c = (0.5 * np.sum(L * L, 1) + k / lam * S[:, 2]) / k2
    m = -L[:, 2] / k
    s = np.sqrt(np.sum(S * S, 1) / k2)
    h = np.sum(S * L, 1) / k2
    E = s * s / 2 + c + 1 / (2 * lam * lam)
    return np.column_stack([c, m, s, h, E])


def drift(trajectory, params: ModelParams | None = None) -> dict:
    """Max |q(t) - q(0)| / (1 + |q(0)|) for q in c, m, s, h (and E)."""
    if params is None:
        params = trajectory.params
    Q = invariant_array(trajectory.states, params)
    rel = np.abs(Q - Q[0]) / (1 + np.abs(Q[0]))
    return {name: float(rel[:, i].max()) for i, name in enumerate("cmshE")}


def gradients(state, params: ModelParams) -> np.ndarray:
    """Rows: grad c, grad m, grad s^2, grad h (exact)."""
    k = params.require_k()
    lam = params.lam
    L, S = _split(state)
    k2 = k * k
    G = np.zeros((4, 6))
    G[0, :3] = L / k2
    G[0, 5] = 1 / (k * lam)
    G[1, 2] = -1 / k
    G[2, 3:] = 2 * S / k2
    G[3, :3] = S / k2
    G[3, 3:] = L / k2
    return G


def wedge4(state, params: ModelParams) -> float:
    """Norm of dh ^ ds^2 ^ dm ^ dc, as sqrt of the Gram determinant."""
    G = gradients(state, params)
    det = np.linalg.det(G @ G.T)
    return math.sqrt(max(det, 0.0))


def xi_conditions(state, params: ModelParams):
    """Residuals of Xi1, Xi2, Xi3."""
    k, lam = params.k, params.lam
    L, S = _split(state)
    SxL = np.cross(S, L)
    xi1 = SxL[2]
    xi2 = -lam * L[0] * SxL[1] - k * S[0] ** 2
    xi3 = lam * L[1] * SxL[0] - k * S[1] ** 2
    return xi1, xi2, xi3


def classify_submanifold(state, params: ModelParams, tol: float = 1e-8) -> SubmanifoldTag:
    """Tag a point by the degeneracy locus it sits on.

    A polynomial condition X=0 of degree d passes when
    |X| < tol*(1+|x|)^d. Precedence: HornCenter, Sigma2, Sigma3,
    C/C1/C2, HornInterior, Generic.
    """
    k = params.require_k()
    lam = params.lam
    L, S = _split(state)
    nx = math.sqrt(float(L @ L + S @ S))

    def zero(v, deg=1):
        return abs(v) < tol * (1 + nx) ** deg

    planar = zero(S[0]) and zero(S[1]) and zero(L[0]) and zero(L[1])
    q = conserved_set(state, params)
    if planar:
        u = S[2] / k
        if q.s > tol and zero(u - q.s) and 4 * q.s >= lam * q.m ** 2 - tol * (1 + nx) ** 2:
            return SubmanifoldTag.HornCenter
        return SubmanifoldTag.Sigma2
    if zero(S[0]) and zero(S[1]) and zero(S[2]):
        return SubmanifoldTag.Sigma3

    xi1, xi2, xi3 = xi_conditions(state, params)
    s1z, s2z = zero(S[0]), zero(S[1])
    if not s1z and not s2z and zero(xi1, 2) and (zero(xi2, 3) or zero(xi3, 3)):
        return SubmanifoldTag.CircularC
    if s1z and not s2z and zero(L[0]) and zero(xi3, 3):
        return SubmanifoldTag.C1
    if not s1z and s2z and zero(L[1]) and zero(xi2, 3):
        return SubmanifoldTag.C2

    scale = (1 + nx) ** 2
    if (abs(q.h + q.m * q.s) < tol * scale
            and abs(q.c - q.m ** 2 / 2 - q.s / lam) < tol * scale
            and 4 * q.s > lam * q.m ** 2):
        return SubmanifoldTag.HornInterior
    return SubmanifoldTag.Generic
