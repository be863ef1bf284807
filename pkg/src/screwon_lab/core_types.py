"""Shared value types and coordinate maps.

Phase-space coordinates are ordered (L1, L2, L3, S1, S2, S3). Every
component carries a factor of the wavenumber k, so for example
m = -L3/k and u = S3/k are the "bare" numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi
POLE_EPS = 1e-12


@dataclass(frozen=True)
class ModelParams:
    k: float = 1.0
    lam: float = 1.0
    hbar: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        for name in ("k", "lam", "hbar", "mu"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.lam <= 0:
            raise ValueError("lam must be > 0")
        if self.hbar <= 0 or self.mu <= 0:
            raise ValueError("hbar and mu must be > 0")

    def require_k(self):
        if self.k == 0:
            raise ValueError("operation divides by k; k must be nonzero")
        return self.k


def _vec3(v) -> np.ndarray:
    a = np.array(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise ValueError("phase-space components must be finite")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PhaseState:
    L: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "L", _vec3(self.L))
        object.__setattr__(self, "S", _vec3(self.S))

    @classmethod
    def from_vector(cls, x) -> "PhaseState":
        x = np.asarray(x, dtype=float).reshape(6)
        return cls(x[:3], x[3:])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.L, self.S])

    def m(self, params: ModelParams) -> float:
        # derived, never stored
        return -self.L[2] / params.require_k()

    def u(self, params: ModelParams) -> float:
        return self.S[2] / params.require_k()


@dataclass(frozen=True)
class PolarCoords:
    """Polar form of (L1, L2) and (S1, S2).

    theta or phi is None when the corresponding radius is below
    POLE_EPS (the angle is meaningless there).
    """
    r: float
    theta: float | None
    rho: float
    phi: float | None
    u: float


def _wrap(a: float) -> float:
    a = math.fmod(a, TWO_PI)
    if a < 0:
        a += TWO_PI
    # fmod of a tiny negative can round up to exactly 2pi
    return 0.0 if a >= TWO_PI else a


def to_polar(state: PhaseState, params: ModelParams) -> PolarCoords:
    k = params.require_k()
    L1, L2 = state.L[0] / k, state.L[1] / k
    S1, S2 = state.S[0] / k, state.S[1] / k
    r = math.hypot(L1, L2)
    rho = math.hypot(S1, S2)
    # L = k r (cos, sin) with signed k, so the angle is taken of L/k
    theta = _wrap(math.atan2(L2, L1)) if r >= POLE_EPS else None
    phi = _wrap(math.atan2(S2, S1)) if rho >= POLE_EPS else None
    return PolarCoords(r, theta, rho, phi, state.S[2] / k)


def from_polar(p: PolarCoords, m: float, params: ModelParams) -> PhaseState:
    k = params.require_k()
    th = p.theta or 0.0
    ph = p.phi or 0.0
    L = (k * p.r * math.cos(th), k * p.r * math.sin(th), -m * k)
    S = (k * p.rho * math.cos(ph), k * p.rho * math.sin(ph), k * p.u)
    return PhaseState(L, S)


@dataclass(frozen=True)
class DarbouxState:
    """Canonical coordinates R and momenta P (P in units of k: stores P, not kP).

    The map to PhaseState loses L3, so m rides along here; it is
    constant on every symplectic leaf and defaults to 0.
    """
    R: np.ndarray
    P: np.ndarray
    m: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "R", _vec3(self.R))
        object.__setattr__(self, "P", _vec3(self.P))


def to_darboux(state: PhaseState, R3: float, params: ModelParams) -> DarbouxState:
    k = params.require_k()
    lam = params.lam
    L1, L2, L3 = state.L
    S1, S2, S3 = state.S
    m = -L3 / k
    R = (-L2 / k, L1 / k, R3)
    kP = (
        S1 + 0.5 * lam * m * L1,
        S2 + 0.5 * lam * m * L2,
        S3 + k / lam + lam / (2 * k) * (L1 * L1 + L2 * L2),
    )
    return DarbouxState(R, np.array(kP) / k, m)


def from_darboux(d: DarbouxState, params: ModelParams) -> PhaseState:
    k = params.require_k()
    lam = params.lam
    m = d.m
    L1 = k * d.R[1]
    L2 = -k * d.R[0]
    kP = k * d.P
    S1 = kP[0] - 0.5 * lam * m * L1
    S2 = kP[1] - 0.5 * lam * m * L2
    S3 = kP[2] - k / lam - lam / (2 * k) * (L1 * L1 + L2 * L2)
    return PhaseState((L1, L2, -m * k), (S1, S2, S3))


def random_state(rng: np.random.Generator, scale: float = 3.0) -> PhaseState:
    return PhaseState.from_vector(rng.uniform(-scale, scale, 6))
