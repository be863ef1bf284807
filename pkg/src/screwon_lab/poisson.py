"""Nilpotent, Euclidean and pencil Poisson tensors on (L, S) space."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .core_types import ModelParams, PhaseState

_EPS = np.zeros((3, 3, 3))
_EPS[0, 1, 2] = _EPS[1, 2, 0] = _EPS[2, 0, 1] = 1.0
_EPS[0, 2, 1] = _EPS[2, 1, 0] = _EPS[1, 0, 2] = -1.0


@dataclass(frozen=True)
class PoissonKind:
    name: str  # "nilpotent" | "euclidean" | "pencil"
    alpha: float = 0.0

    @property
    def weights(self):
        if self.name == "nilpotent":
            return 1.0, 0.0
        if self.name == "euclidean":
            return 0.0, 1.0
        if self.name == "pencil":
            return 1.0 - self.alpha, self.alpha
        raise ValueError(f"unknown bracket kind {self.name!r}")


NILPOTENT = PoissonKind("nilpotent")
EUCLIDEAN = PoissonKind("euclidean")


def pencil(alpha: float) -> PoissonKind:
    return PoissonKind("pencil", float(alpha))


def _vec(state):
    if isinstance(state, PhaseState):
        return state.as_vector()
    return np.asarray(state, dtype=float).reshape(6)


def nilpotent_tensor(x, params: ModelParams) -> np.ndarray:
    """{L,L}=0, {S_a,S_b}=lam eps_abc L_c, {S_a,L_b}=-eps_abc K_c with K=(0,0,-k)."""
    x = _vec(x)
    L = x[:3]
    K = np.array([0.0, 0.0, -params.k])
    P = np.zeros((6, 6))
    P[3:, 3:] = params.lam * np.einsum("abc,c->ab", _EPS, L)
    SL = -np.einsum("abc,c->ab", _EPS, K)
    P[3:, :3] = SL
    P[:3, 3:] = -SL.T
    return P


def euclidean_tensor(x, params: ModelParams) -> np.ndarray:
    """{L_a,L_b}=-lam eps L_c, {L_a,S_b}=-lam eps S_c, {S,S}=0."""
    x = _vec(x)
    L, S = x[:3], x[3:]
    P = np.zeros((6, 6))
    P[:3, :3] = -params.lam * np.einsum("abc,c->ab", _EPS, L)
    LS = -params.lam * np.einsum("abc,c->ab", _EPS, S)
    P[:3, 3:] = LS
    P[3:, :3] = -LS.T
    return P


def tensor(kind: PoissonKind, state, params: ModelParams) -> np.ndarray:
    wn, we = kind.weights
    P = np.zeros((6, 6))
    if wn:
        P += wn * nilpotent_tensor(state, params)
    if we:
        P += we * euclidean_tensor(state, params)
    return P


def bracket(kind: PoissonKind, i: int, j: int, state, params: ModelParams) -> float:
    if not (0 <= i < 6 and 0 <= j < 6):
        raise IndexError("coordinate index must be in 0..5")
    return float(tensor(kind, state, params)[i, j])


def gradient(f, x, fd_step: float = 1e-5) -> np.ndarray:
    x = _vec(x)
    g = np.empty(6)
    for a in range(6):
        h = fd_step * (1.0 + abs(x[a]))
        xp = x.copy()
        xm = x.copy()
        xp[a] += h
        xm[a] -= h
        g[a] = (f(xp) - f(xm)) / (2 * h)
    return g


def bracket_fn(kind: PoissonKind, f, g, state, params: ModelParams,
               fd_step: float = 1e-5) -> float:
    """{f,g} at a state; f, g take the 6-vector. Truncation error O(fd_step^2)."""
    x = _vec(state)
    return float(gradient(f, x, fd_step) @ tensor(kind, x, params) @ gradient(g, x, fd_step))


def jacobi_residual(kind: PoissonKind, state, params: ModelParams) -> float:
    """Max |{{xi,xj},xk} + cyclic| over coordinate triples.

    Coordinate brackets are affine in x, so {{xi,xj},xk} = sum_l C_ij^l P_lk
    with C_ij^l read off exactly as P(e_l) - P(0).
    """
    x = _vec(state)
    P = tensor(kind, x, params)
    P0 = tensor(kind, np.zeros(6), params)
    C = np.stack([tensor(kind, np.eye(6)[l], params) - P0 for l in range(6)], axis=-1)
    nested = np.einsum("ijl,lk->ijk", C, P)
    worst = 0.0
    for i, j, k in product(range(6), repeat=3):
        r = nested[i, j, k] + nested[j, k, i] + nested[k, i, j]
        worst = max(worst, abs(r))
    return worst


def pencil_casimirs(alpha: float, state, params: ModelParams):
    """The two Casimirs ((1-a) m/lam + a h, (1-a) c - a s^2/2) of the pencil."""
    from .conserved import conserved_set
    q = conserved_set(state, params)
    return ((1 - alpha) * q.m / params.lam + alpha * q.h,
            (1 - alpha) * q.c - alpha * q.s ** 2 / 2)


def kernel_dimension(kind: PoissonKind, state, params: ModelParams, rel: float = 1e-10) -> int:
    sv = np.linalg.svd(tensor(kind, state, params), compute_uv=False)
    return int(np.sum(sv < rel * sv.max()))
