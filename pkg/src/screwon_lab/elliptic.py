"""The latitude cubic chi(u), Weierstrass reduction and elliptic integrals."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

DEFAULT_TOL = 1e-10


class DegenerateError(ValueError):
    """Raised when a period diverges (repeated roots: horn, circle, point)."""


class SingularCharacteristicError(ValueError):
    pass


def chi_coeffs(q, lam: float) -> np.ndarray:
    c, m, s, h = q.c, q.m, q.s, q.h
    s2 = s * s
    return np.array([1.0, -lam * c, -(s2 + lam * h * m),
                     0.5 * lam * (2 * c * s2 - h * h - m * m * s2)])


def chi(u, q, lam: float):
    return np.polyval(chi_coeffs(q, lam), u)


def chi_prime(u, q, lam: float):
    return np.polyval(np.polyder(chi_coeffs(q, lam)), u)


def discriminant(q, lam: float) -> float:
    c, m, s, h = q.c, q.m, q.s, q.h
    s2 = s * s
    A = s2 / lam + h * m
    X = 2 * c * s2 - h * h - m * m * s2
    return (lam ** 4 * c * c * A * A + 4 * lam ** 3 * A ** 3 + 2 * lam ** 4 * c ** 3 * X
            - 6.75 * lam ** 2 * X * X + 9 * lam ** 3 * c * A * X)


def cubic_discriminant(coeffs) -> float:
    """Discriminant of a monic cubic x^3 + b x^2 + c x + d."""
    _, b, c, d = coeffs
    return b * b * c * c - 4 * c ** 3 - 4 * b ** 3 * d - 27 * d * d + 18 * b * c * d


def _polish(coeffs, x, steps=3):
    dp = np.polyder(coeffs)
    for _ in range(steps):
        d = np.polyval(dp, x)
        if d == 0:
            break
        x = x - np.polyval(coeffs, x) / d
    return float(x)


def monic_cubic_roots(coeffs, tol: float = DEFAULT_TOL):
    """Real roots of a monic cubic as [(root, multiplicity)], ascending.

    Repeated roots are declared when |disc| < tol * scale^6 with
    scale = 1 + max|root|; the repeated value is then taken from the
    critical points, which is well conditioned where the roots are not.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    _, b, c, d = coeffs
    raw = np.roots(coeffs)
    scale = 1.0 + float(np.max(np.abs(raw)))
    disc = cubic_discriminant(coeffs)
    if abs(disc) < tol * scale ** 6:
        if abs(b * b - 3 * c) < math.sqrt(tol) * scale ** 2:
            return [(-b / 3, 3)]
        crit = np.roots(np.polyder(coeffs)).real
        ud = min(crit, key=lambda x: abs(np.polyval(coeffs, x)))
        us = -b - 2 * ud
        out = [(float(ud), 2), (float(us), 1)]
        return sorted(out)
    if disc > 0:
        rts = sorted(_polish(coeffs, r.real) for r in raw)
        return [(r, 1) for r in rts]
    r = raw[np.argmin(np.abs(raw.imag))].real
    return [(_polish(coeffs, r), 1)]


def chi_roots(q, lam: float, tol: float = DEFAULT_TOL):
    return monic_cubic_roots(chi_coeffs(q, lam), tol)


def weierstrass_invariants(q, lam: float, k: float):
    c, m, s, h = q.c, q.m, q.s, q.h
    s2 = s * s
    g2 = k ** 4 * lam ** 2 / 3 * (3 * lam * h * m + lam ** 2 * c * c + 3 * s2)
    g3 = k ** 6 * lam ** 4 / 108 * (27 * h * h + 18 * lam * c * m * h + 4 * lam ** 2 * c ** 3
                                    - 36 * c * s2 + 27 * m * m * s2)
    return g2, g3


def weierstrass_shift(q, lam: float, k: float):
    """(a, b) with u = a v + b."""
    return 2.0 / (k * k * lam), q.c * lam / 3


@dataclass(frozen=True)
class HalfPeriods:
    omega_R: float
    omega_I: float  # magnitude; the half-period itself is 1j*omega_I


@dataclass(frozen=True)
class CubicData:
    coeffs: np.ndarray
    discriminant: float
    roots: list
    g2: float
    g3: float
    a_scale: float
    b_shift: float


def cubic_data(q, lam: float, k: float, tol: float = DEFAULT_TOL) -> CubicData:
    g2, g3 = weierstrass_invariants(q, lam, k)
    a, b = weierstrass_shift(q, lam, k)
    return CubicData(chi_coeffs(q, lam), discriminant(q, lam), chi_roots(q, lam, tol),
                     g2, g3, a, b)


def wp_roots(g2: float, g3: float):
    """Roots of 4v^3 - g2 v - g3, descending (e1, e2, e3) when real."""
    r = np.roots([4.0, 0.0, -g2, -g3])
    if np.max(np.abs(r.imag)) > 1e-12 * (1 + np.max(np.abs(r))):
        raise DegenerateError("Weierstrass cubic does not have three real roots")
    return tuple(sorted(r.real, reverse=True))


def half_periods(g2: float, g3: float, tol: float = DEFAULT_TOL) -> HalfPeriods:
    disc = g2 ** 3 - 27 * g3 ** 2
    scale = 1.0 + abs(g2) ** 1.5 + abs(g3)
    if disc <= tol * scale ** 2:
        raise DegenerateError("repeated Weierstrass roots: one half-period diverges")
    e1, e2, e3 = wp_roots(g2, g3)
    span = e1 - e3
    mpar = (e2 - e3) / span
    root = math.sqrt(span)
    return HalfPeriods(float(special.ellipk(mpar)) / root,
                       float(special.ellipk(1.0 - mpar)) / root)


def _laurent_coeffs(g2, g3, kmax=8):
    c = {2: g2 / 20.0, 3: g3 / 28.0}
    for kk in range(4, kmax + 1):
        c[kk] = 3.0 / ((2 * kk + 1) * (kk - 3)) * sum(c[j] * c[kk - j] for j in range(2, kk - 1))
    return c


def wp_and_prime(z: complex, g2: float, g3: float):
    """(wp(z), wp'(z)) by Laurent series at z/2^n followed by n duplications."""
    z = complex(z)
    if abs(z) < 1e-12:
        raise ZeroDivisionError("wp has a pole at lattice points")
    R = max(abs(g2) ** 0.25, abs(g3) ** (1.0 / 6.0), 1e-300)
    n = 0
    w = z
    while abs(w) * R > 0.1:
        w /= 2
        n += 1
    coef = _laurent_coeffs(g2, g3)
    w2 = w * w
    p = 1 / w2
    dp = -2 / (w2 * w)
    for kk, ck in coef.items():
        p += ck * w ** (2 * kk - 2)
        dp += ck * (2 * kk - 2) * w ** (2 * kk - 3)
    for _ in range(n):
        D = 4 * p ** 3 - g2 * p - g3
        if D == 0:
            raise ZeroDivisionError("wp has a pole at lattice points")
        N = 6 * p * p - g2 / 2
        dp = dp * (-1 + (12 * N * p * D - N ** 3) / (4 * D * D))
        p = -2 * p + N * N / (4 * D)
    return p, dp


def wp(z: complex, g2: float, g3: float) -> complex:
    return wp_and_prime(z, g2, g3)[0]


def torus_roots(q, lam: float, tol: float = DEFAULT_TOL):
    """(u_min, u_max, u3) for the torus regime; DegenerateError otherwise."""
    rts = chi_roots(q, lam, tol)
    if len(rts) != 3:
        raise DegenerateError("chi does not have three simple roots")
    u1, u2, u3 = (r for r, _ in rts)
    return u1, u2, u3


def u_of_t(t, q, lam: float, k: float, branch: str = "StartAtMin"):
    """u(t) = a wp(t + alpha) + b for torus level sets (array-friendly)."""
    torus_roots(q, lam)
    g2, g3 = weierstrass_invariants(q, lam, k)
    hp = half_periods(g2, g3)
    a, b = weierstrass_shift(q, lam, k)
    alpha = 1j * hp.omega_I
    if branch == "StartAtMax":
        alpha += hp.omega_R
    elif branch != "StartAtMin":
        raise ValueError("branch must be StartAtMin or StartAtMax")
    period = 2 * hp.omega_R
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(ts.shape)
    for i, ti in enumerate(ts):
        tr = math.fmod(ti, period)
        if tr > hp.omega_R:
            tr -= period
        elif tr < -hp.omega_R:
            tr += period
        out[i] = a * wp(tr + alpha, g2, g3).real + b
    return out if np.ndim(t) else float(out[0])


def _carlson_args(gamma, q_mod):
    s = math.sin(gamma)
    c = math.cos(gamma)
    return s, c * c, 1 - q_mod * q_mod * s * s


def _reduce_amplitude(gamma):
    # gamma = j*pi + g with |g| <= pi/2
    j = round(gamma / math.pi)
    return j, gamma - j * math.pi


def ellip_F(gamma: float, q_mod: float) -> float:
    """Legendre F(gamma, q) = int_0^gamma dt / sqrt(1 - q^2 sin^2 t), modulus q."""
    if not 0 <= q_mod < 1:
        raise ValueError("modulus must lie in [0, 1)")
    j, g = _reduce_amplitude(gamma)
    s, c2, d2 = _carlson_args(g, q_mod)
    val = s * float(special.elliprf(c2, d2, 1.0))
    if j:
        val += 2 * j * float(special.ellipk(q_mod * q_mod))
    return val


def ellip_Pi(gamma: float, n_char: float, q_mod: float) -> float:
    """Legendre Pi(gamma, n, q) = int_0^gamma dt / ((1 - n sin^2 t) sqrt(1 - q^2 sin^2 t))."""
    if not 0 <= q_mod < 1:
        raise ValueError("modulus must lie in [0, 1)")
    if abs(gamma) > math.pi / 2:
        raise ValueError("amplitude must lie in [-pi/2, pi/2]")
    s, c2, d2 = _carlson_args(gamma, q_mod)
    p = 1 - n_char * s * s
    if n_char * min(s * s, 1.0) >= 1 or p <= 0:
        raise SingularCharacteristicError("1 - n sin^2 vanishes on the integration path")
    return s * float(special.elliprf(c2, d2, 1.0)) + n_char / 3 * s ** 3 * float(
        special.elliprj(c2, d2, 1.0, p))
