"""Quantum model as a 2D anharmonic oscillator.

Dimensionless radial problem (r~ = r/m):

    -hbar~^2 (rho'' + rho'/r - l^2 rho/r^2) + (alpha~ r^2 + beta~ r^4) rho = E1~ rho

with alpha~ = lam~^2/4 - lam~ pz~ + 1 and beta~ = lam~^2/4. The strong
coupling form divides through by lam~^2 at fixed g~ = lam~/hbar~.

Two independent solvers are used: Rayleigh-Ritz in the 2D oscillator
(Laguerre) basis, and shooting on the ODE with a Wronskian match.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.linalg import eigh
from scipy.optimize import brentq


class SolverDisagreement(RuntimeError):
    pass


class NoAllowedInterval(ValueError):
    pass


@dataclass(frozen=True)
class RadialProblem:
    lambda_t: float
    hbar_t: float = 1.0
    l: int = 0
    pz_t: float = 0.0
    # explicit potential overrides, used by the strong coupling form
    alpha_override: float | None = None
    beta_override: float | None = None

    def __post_init__(self):
        if self.lambda_t < 0:
            raise ValueError("lambda~ must be >= 0")
        if self.hbar_t <= 0:
            raise ValueError("hbar~ must be > 0")
        if int(self.l) != self.l:
            raise ValueError("l must be an integer")

    @property
    def alpha_t(self) -> float:
        if self.alpha_override is not None:
            return self.alpha_override
        lt = self.lambda_t
        return lt * lt / 4 - lt * self.pz_t + 1

    @property
    def beta_t(self) -> float:
        if self.beta_override is not None:
            return self.beta_override
        return self.lambda_t ** 2 / 4

    @property
    def g_t(self) -> float:
        return self.lambda_t / self.hbar_t

    def potential(self, r):
        return self.alpha_t * r * r + self.beta_t * r ** 4

    def full_energy(self, E1: float) -> float:
        """E~ from E1~ = E~ - pz~^2 - l hbar~ lam~ - 1."""
        return E1 + self.pz_t ** 2 + self.l * self.hbar_t * self.lambda_t + 1


@dataclass
class Spectrum:
    problem: RadialProblem
    eigenvalues: np.ndarray
    diagnostics: list = field(default_factory=list)

    def to_json(self) -> dict:
        p = self.problem
        return {
            "problem": {"lambda_t": p.lambda_t, "hbar_t": p.hbar_t, "l": p.l, "pz_t": p.pz_t,
                        "alpha_t": p.alpha_t, "beta_t": p.beta_t},
            "eigenvalues": [float(e) for e in self.eigenvalues],
            "diagnostics": self.diagnostics,
        }


def dimensionless_from_physical(mu: float, k: float, lam: float, m: float, hbar: float,
                                p_z: float = 0.0, l: int = 0) -> RadialProblem:
    if mu <= 0 or hbar <= 0 or k == 0 or m == 0:
        raise ValueError("need mu, hbar > 0 and k, m nonzero")
    sm = math.sqrt(mu)
    return RadialProblem(lambda_t=abs(lam * m) / sm, hbar_t=hbar / (abs(k) * m * m * sm),
                         l=l, pz_t=p_z / (abs(k * m) * sm))


# Laguerre (2D oscillator) basis

def _basis_scale(p: RadialProblem) -> float:
    a = math.sqrt(max(p.alpha_t, 0.0)) + (p.beta_t * p.hbar_t) ** (1.0 / 3.0)
    if a <= 0:
        raise ValueError("potential has no confining part")
    return a


def _y_matrix(N: int, l: int) -> np.ndarray:
    # r^2 in units of hbar/a between oscillator states of fixed |l|
    n = np.arange(N)
    Y = np.diag(2.0 * n + abs(l) + 1)
    off = -np.sqrt((n[:-1] + 1.0) * (n[:-1] + abs(l) + 1))
    return Y + np.diag(off, 1) + np.diag(off, -1)


def basis_hamiltonian(p: RadialProblem, N: int) -> np.ndarray:
    a = _basis_scale(p)
    hb = p.hbar_t
    Y = _y_matrix(N + 2, p.l)
    r2 = (hb / a) * Y[:N, :N]
    r4 = (hb / a) ** 2 * (Y @ Y)[:N, :N]
    n = np.arange(N)
    H = np.diag(2 * a * hb * (2.0 * n + abs(p.l) + 1))
    return H + (p.alpha_t - a * a) * r2 + p.beta_t * r4


def basis_eigenvalues(p: RadialProblem, n_levels: int, N: int) -> np.ndarray:
    return eigh(basis_hamiltonian(p, N), eigvals_only=True, subset_by_index=[0, n_levels - 1])


# shooting

def frobenius_series(alpha: float, beta: float, E: float, hbar: float, l: int, N: int) -> np.ndarray:
    """Coefficients w_n of rho = r^|l| sum w_n r^n about r = 0, w_0 = 1.

    (n^2 + 2 n |l|) w_n = (-E w_{n-2} + alpha w_{n-4} + beta w_{n-6}) / hbar^2
    """
    L = abs(l)
    w = np.zeros(N + 1)
    w[0] = 1.0
    h2 = hbar * hbar
    for n in range(2, N + 1, 2):
        acc = -E * w[n - 2]
        if n >= 4:
            acc += alpha * w[n - 4]
        if n >= 6:
            acc += beta * w[n - 6]
        w[n] = acc / (h2 * (n * n + 2 * n * L))
    return w


def frobenius_coeffs(g_t: float, E2_t: float, l: int, N: int) -> np.ndarray:
    """Strong coupling series: (n^2 + 2nl) rho_n + g^2 E2 rho_{n-2} - (g^2/4)(rho_{n-4} + rho_{n-6}) = 0."""
    if l < 0:
        raise ValueError("use l >= 0 (the exponent +l branch)")
    if N < 6:
        raise ValueError("N must be >= 6")
    g2 = g_t * g_t
    return frobenius_series(g2 / 4, g2 / 4, g2 * E2_t, 1.0, l, N)


def _kappa2(p: RadialProblem, r, E):
    return (p.potential(r) + p.hbar_t ** 2 * p.l ** 2 / (r * r) - E) / p.hbar_t ** 2


def _outer_turning_point(p: RadialProblem, E: float) -> float:
    # V_eff(r) - E changes sign once beyond the minimum of V_eff
    f = lambda r: _kappa2(p, r, E)
    r_hi = 1.0
    while f(r_hi) <= 0:
        r_hi *= 2
    r_lo = r_hi / 2
    while f(r_lo) > 0 and r_lo > 1e-8:
        r_lo /= 2
    if f(r_lo) > 0:
        return r_lo
    return brentq(f, r_lo, r_hi, xtol=1e-14)


def _tail_radius(p: RadialProblem, E: float, r_t: float, depth: float = 40.0) -> float:
    """Radius where the WKB decay exponent measured from r_t reaches depth."""
    kap = lambda r: math.sqrt(max(_kappa2(p, r, E), 0.0))
    R, acc, dr = r_t, 0.0, 0.02 * max(r_t, 0.1)
    while acc < depth:
        acc += 0.5 * dr * (kap(R) + kap(R + dr))
        R += dr
    return R


def _rhs(p: RadialProblem, E: float):
    L = abs(p.l)
    al, be, h2 = p.alpha_t, p.beta_t, p.hbar_t ** 2

    def f(r, y):
        w, dw = y
        return [dw, -(2 * L + 1) / r * dw + (al * r * r + be * r ** 4 - E) / h2 * w]
    return f


def _shoot_out(p: RadialProblem, E: float, r_m: float, r0: float):
    w = frobenius_series(p.alpha_t, p.beta_t, E, p.hbar_t, p.l, 40)
    n = np.arange(len(w))
    y0 = [float(np.sum(w * r0 ** n)), float(np.sum(n[1:] * w[1:] * r0 ** (n[1:] - 1)))]
    sol = solve_ivp(_rhs(p, E), (r0, r_m), y0, method="DOP853", rtol=1e-12, atol=1e-300)
    return sol.y[:, -1]


def _shoot_in(p: RadialProblem, E: float, r_m: float, R: float, dense=False):
    L = abs(p.l)
    kap = math.sqrt(max(_kappa2(p, R, E), 0.0))
    # rho'/rho ~ -kappa - 1/(2r); w = rho / r^L
    y0 = [1.0, -kap - 0.5 / R - L / R]
    sol = solve_ivp(_rhs(p, E), (R, r_m), y0, method="DOP853", rtol=1e-12, atol=1e-300,
                    dense_output=dense)
    return sol if dense else sol.y[:, -1]


def _mismatch(p: RadialProblem, E: float, r_m: float, r0: float, R: float) -> float:
    a = _shoot_out(p, E, r_m, r0)
    b = _shoot_in(p, E, r_m, R)
    ell = max(r_m, 1.0)
    na = math.hypot(a[0], a[1] * ell)
    nb = math.hypot(b[0], b[1] * ell)
    return (a[1] * b[0] - a[0] * b[1]) * ell / (na * nb)


def shoot_eigenvalue(p: RadialProblem, E_lo: float, E_hi: float, xtol: float = 1e-13) -> float:
    """Eigenvalue in [E_lo, E_hi] from a sign change of the normalized Wronskian."""
    E_ref = 0.5 * (E_lo + E_hi)
    r_m = _outer_turning_point(p, E_ref)
    R = _tail_radius(p, E_hi, _outer_turning_point(p, E_hi))
    r0 = min(1e-3, 0.01 * r_m)
    f = lambda E: _mismatch(p, E, r_m, r0, R)
    fa, fb = f(E_lo), f(E_hi)
    if fa * fb > 0:
        raise SolverDisagreement(f"no sign change of the Wronskian in [{E_lo}, {E_hi}]")
    return brentq(f, E_lo, E_hi, xtol=xtol * (1 + abs(E_ref)), rtol=1e-15)


def solve_spectrum(p: RadialProblem, n_levels: int = 5, basis_size: int | None = None,
                   shoot: bool = True, agree_floor: float = 1e-9) -> Spectrum:
    """Lowest n_levels eigenvalues E1~ of the radial problem, cross-validated."""
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    N = basis_size or max(160, 4 * n_levels + 120)
    E_a = basis_eigenvalues(p, n_levels + 1, N)
    E_b = basis_eigenvalues(p, n_levels + 1, N + N // 2)
    conv = np.abs(E_a - E_b)
    diags = []
    out = np.empty(n_levels)
    for i in range(n_levels):
        Ei = E_b[i]
        d = {"basis_size": int(N + N // 2), "convergence": float(conv[i])}
        if shoot:
            gaps = [E_b[i + 1] - Ei]
            if i > 0:
                gaps.append(Ei - E_b[i - 1])
            delta = 0.25 * min(gaps)
            Es = shoot_eigenvalue(p, Ei - delta, Ei + delta)
            diff = abs(Es - Ei)
            tol = max(10 * conv[i], agree_floor * (1 + abs(Ei)))
            d.update({"shooting": float(Es), "disagreement": float(diff)})
            if diff > tol:
                raise SolverDisagreement(
                    f"level {i}: basis {Ei!r} vs shooting {Es!r} (|diff| = {diff:.3e} > {tol:.3e})")
        out[i] = Ei
        diags.append(d)
    return Spectrum(p, out, diags)


def eigenfunction(p: RadialProblem, E: float, r_max: float | None = None):
    """Dense inward solution (w, w') with w = rho / r^|l| on [r_t/2, R], for tail checks.

    R is the usual tail radius, pushed out to 1.25 r_max when given.
    """
    r_t = _outer_turning_point(p, E)
    R = _tail_radius(p, E, r_t)
    if r_max is not None:
        R = max(R, 1.25 * r_max)
    return _shoot_in(p, E, 0.5 * r_t, R, dense=True), R


# strong coupling

def strong_coupling_problem(g_t: float, l: int = 0) -> RadialProblem:
    """rho'' + rho'/r - (l^2/r^2 + (g^2/4)(r^2 + r^4) - g^2 E2) rho = 0 as a radial problem.

    hbar = 1, alpha = beta = g^2/4, and the eigenvalue is g^2 E2.
    """
    if g_t <= 0:
        raise ValueError("g~ must be > 0")
    q = g_t * g_t / 4
    return RadialProblem(lambda_t=0.0, hbar_t=1.0, l=l, pz_t=0.0,
                         alpha_override=q, beta_override=q)


def solve_strong(g_t: float, l: int = 0, n_levels: int = 1, **kw) -> np.ndarray:
    """E2~ levels; independent of k by construction."""
    sp = solve_spectrum(strong_coupling_problem(g_t, l), n_levels, **kw)
    return sp.eigenvalues / (g_t * g_t)


def strong_coupling_g(mu: float, k: float, lam: float, m: float, hbar: float) -> float:
    """g~ = lam~ / hbar~ = lam |k| |m|^3 / hbar for a dimensionful setup."""
    p = dimensionless_from_physical(mu, k, lam, m, hbar)
    return p.g_t


# asymptotics

def asymptotic_tail(r_t, g_t: float):
    """r^{-3/2} exp(-(g/2)(r^3/3 + r/2))."""
    r = np.asarray(r_t, dtype=float)
    return r ** -1.5 * np.exp(-(g_t / 2) * (r ** 3 / 3 + r / 2))


def tail_log_derivative(r_t, g_t: float):
    r = np.asarray(r_t, dtype=float)
    return -(g_t / 2) * (r * r + 0.5) - 1.5 / r


def general_tail_log_derivative(r_t, p: RadialProblem):
    """Log-derivative of exp(-(sqrt(beta)/hbar)(r^3/3 + alpha r/(2 beta))) r^{-3/2}."""
    if p.beta_t <= 0:
        raise ValueError("the cubic-exponent tail needs beta~ > 0")
    r = np.asarray(r_t, dtype=float)
    c = math.sqrt(p.beta_t) / p.hbar_t
    return -c * (r * r + p.alpha_t / (2 * p.beta_t)) - 1.5 / r


# WKB

@dataclass(frozen=True)
class WKBSetup:
    mu: float
    k: float
    lam: float
    m: float
    hbar: float
    p_z: float = 0.0
    l: int = 0

    @property
    def p_theta(self) -> float:
        return self.l * self.hbar

    @property
    def alpha(self) -> float:
        lam, m, k, mu = self.lam, self.m, self.k, self.mu
        return lam ** 2 * m ** 2 * k ** 2 / (8 * mu) - lam * k * self.p_z / (2 * mu) + k * k / 2

    @property
    def beta(self) -> float:
        return self.lam ** 2 * self.k ** 2 / (8 * self.mu)

    def shift(self) -> float:
        """E - E1 = p_z^2/2mu + p_theta lam m k / 2mu + k^2 m^2 / 2."""
        return (self.p_z ** 2 / (2 * self.mu) + self.p_theta * self.lam * self.m * self.k / (2 * self.mu)
                + self.k ** 2 * self.m ** 2 / 2)

    def s_cubic(self, E: float) -> np.ndarray:
        """r^2 p(r)^2 as a polynomial in s = r^2 (highest power first)."""
        mu = self.mu
        A = 2 * mu * E - self.p_z ** 2 - self.p_theta * self.lam * self.m * self.k - self.k ** 2 * self.m ** 2 * mu
        return np.array([-2 * mu * self.beta, -2 * mu * self.alpha, A, -self.p_theta ** 2])


def turning_points(setup: WKBSetup, E: float):
    """(r_min, r_max) of the classically allowed interval."""
    coeffs = np.trim_zeros(setup.s_cubic(E), "f")
    roots = np.roots(coeffs)
    real = np.sort(roots[np.abs(roots.imag) <= 1e-10 * (1 + np.abs(roots))].real)
    if abs(setup.p_theta) == 0:
        real = np.append(real, 0.0)
    pos = np.unique(real[real >= -1e-14])
    pos = np.clip(pos, 0.0, None)
    if len(pos) < 2:
        raise NoAllowedInterval(f"E = {E} is below the bottom of the effective potential")
    s1, s2 = pos[-2], pos[-1]
    if s2 - s1 <= 0 or np.polyval(coeffs, 0.5 * (s1 + s2)) <= 0:
        raise NoAllowedInterval(f"E = {E} has no classically allowed interval")
    return math.sqrt(s1), math.sqrt(s2)


def weak_turning_points(setup: WKBSetup, E1: float):
    """lam = 0 closed form: s = (E1 -+ sqrt(Delta)/(2 mu)) / k^2, Delta = 4 mu^2 (E1^2 - k^2 p_theta^2 / mu)."""
    mu, k = setup.mu, setup.k
    D = 4 * mu * mu * (E1 * E1 - k * k * setup.p_theta ** 2 / mu)
    if D < 0:
        raise NoAllowedInterval("E1 below the centrifugal barrier")
    return (E1 - math.sqrt(D) / (2 * mu)) / k ** 2, (E1 + math.sqrt(D) / (2 * mu)) / k ** 2


def wkb_action(setup: WKBSetup, E: float) -> float:
    """int_{r_min}^{r_max} sqrt(p(r)^2) dr, computed in s = r^2 with the endpoint roots factored out."""
    r1, r2 = turning_points(setup, E)
    s1, s2 = r1 * r1, r2 * r2
    coeffs = np.trim_zeros(setup.s_cubic(E), "f")
    # coeffs = (s - s1)(s2 - s) * rest(s)
    rest, _ = np.polydiv(coeffs, -np.poly([s1, s2]))
    mid, half = 0.5 * (s1 + s2), 0.5 * (s2 - s1)

    def integrand(phi):
        s = mid - half * math.cos(phi)
        rs = max(np.polyval(rest, s), 0.0)
        # ds = half sin(phi) dphi and sqrt((s-s1)(s2-s)) = half sin(phi)
        return (half * math.sin(phi)) ** 2 * math.sqrt(rs) / (2 * s)

    val, _ = quad(integrand, 0.0, math.pi, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def wkb_levels(mu: float, k: float, lam: float, m: float, hbar: float, p_z: float = 0.0,
               p_theta: float = 0.0, n_range=range(0, 5), maslov: float = 0.5) -> np.ndarray:
    """Full energies E with action = (n + maslov) pi hbar.

    maslov = 0 is the bare condition int p dr = n pi hbar; the default 1/2
    is the standard connection-formula phase, which makes the lam = 0
    levels exact.
    """
    l = p_theta / hbar
    if abs(l - round(l)) > 1e-12:
        raise ValueError("p_theta must be an integer multiple of hbar")
    setup = WKBSetup(mu, k, lam, m, hbar, p_z, int(round(l)))
    E_bot = _potential_bottom(setup)
    out = []
    for n in n_range:
        target = (n + maslov) * math.pi * hbar
        if target <= 0:
            out.append(E_bot)
            continue
        f = lambda E: wkb_action(setup, E) - target
        lo = E_bot + 1e-12 * (1 + abs(E_bot))
        step = max(hbar * abs(k) / math.sqrt(mu), 1e-6) * (n + abs(l) + 1)
        hi = E_bot + step
        while f(hi) < 0:
            lo, hi = hi, hi + 2 * (hi - E_bot)
        out.append(brentq(f, lo, hi, xtol=1e-13 * (1 + abs(hi)), rtol=1e-15))
    return np.array(out)


def _potential_bottom(setup: WKBSetup) -> float:
    """Smallest E with an allowed interval: minimum over s > 0 of the energy at zero radial momentum."""
    mu = setup.mu
    base = setup.shift()

    def V(s):
        return base + setup.alpha * s + setup.beta * s * s + setup.p_theta ** 2 / (2 * mu * s)
    if setup.p_theta == 0:
        if setup.alpha >= 0:
            return base
        return base - setup.alpha ** 2 / (4 * setup.beta)
    # dV/ds = alpha + 2 beta s - p^2/(2 mu s^2) has one positive root
    g = lambda s: setup.alpha + 2 * setup.beta * s - setup.p_theta ** 2 / (2 * mu * s * s)
    lo, hi = 1e-12, 1.0
    while g(hi) < 0:
        hi *= 2
    s_star = brentq(g, lo, hi, xtol=1e-15)
    return V(s_star)


def wkb_dimensionless(p: RadialProblem, n_range, maslov: float = 0.5) -> np.ndarray:
    """WKB E1~ for a dimensionless problem (mu = k = m = 1, so E1~ = 2 E1)."""
    if p.alpha_override is not None or p.beta_override is not None:
        raise ValueError("WKB needs the lam~ parametrization, not explicit alpha/beta")
    setup = WKBSetup(1.0, 1.0, p.lambda_t, 1.0, p.hbar_t, p.pz_t, p.l)
    E = wkb_levels(1.0, 1.0, p.lambda_t, 1.0, p.hbar_t, p.pz_t, p.l * p.hbar_t, n_range, maslov)
    return 2 * (E - setup.shift())


# Ince classification

@dataclass(frozen=True)
class OdeSingularityType:
    elementary: int
    nonelementary: int
    species: tuple  # species of each irregular point, sorted

    def as_list(self) -> list:
        return [self.elementary, self.nonelementary, list(self.species)]

    def __str__(self) -> str:
        irr = ",".join(f"1_{s}" for s in self.species) if self.species else "0"
        return f"[{self.elementary},{self.nonelementary},{irr}]"


def _strip(c):
    c = np.trim_zeros(np.asarray(c, dtype=complex), "f")
    return c if len(c) else np.array([0j])


def _is_zero(c):
    return np.all(np.abs(c) == 0)


def _deflate(c, z0, tol):
    """Multiplicity of z0 as a root of c, and the deflated polynomial."""
    c = _strip(c)
    mult = 0
    while len(c) > 1:
        scale = np.sum(np.abs(c)) * (1 + abs(z0)) ** (len(c) - 1)
        if abs(np.polyval(c, z0)) > tol * scale:
            break
        c, _ = np.polydiv(c, np.array([1.0, -z0]))
        mult += 1
    return mult, c


def _pole(num, den, z0, tol):
    """(order, leading coefficient) of num/den at z0; order <= 0 means no pole."""
    if _is_zero(_strip(num)):
        return -10 ** 6, 0j
    mn, n = _deflate(num, z0, tol)
    md, d = _deflate(den, z0, tol)
    return md - mn, np.polyval(n, z0) / np.polyval(d, z0)


def _classify_point(pn, pd, qn, qd, z0, tol):
    """'ordinary', 'elementary', 'regular' or ('irregular', species)."""
    op, lp = _pole(pn, pd, z0, tol)
    oq, lq = _pole(qn, qd, z0, tol)
    if op <= 0 and oq <= 0:
        return "ordinary"
    if op <= 1 and oq <= 2:
        A = lp if op == 1 else 0.0
        B = lq if oq == 2 else 0.0
        # rho^2 + (A - 1) rho + B = 0
        disc = (A - 1) ** 2 - 4 * B
        diff = abs(np.sqrt(complex(disc)))
        return "elementary" if abs(diff - 0.5) < 1e-9 else "regular"
    K1 = max(op, 0) - 2
    K2 = max(oq, 0) - 4
    g = 1 + max(K1, K2 / 2)
    return ("irregular", int(round(2 * g)))


def _at_infinity(pn, pd, qn, qd):
    """Rational P(zeta) = 2/zeta - p(1/zeta)/zeta^2 and Q(zeta) = q(1/zeta)/zeta^4."""
    def reciprocal(num, den, shift):
        # num(1/z)/den(1/z) * z^shift as (N, D) polynomials in z
        num, den = _strip(num), _strip(den)
        e = (len(den) - 1) - (len(num) - 1) + shift
        rn, rd = num[::-1].copy(), den[::-1].copy()
        if e >= 0:
            return np.polymul(rn, np.r_[1.0, np.zeros(e)]), rd
        return rn, np.polymul(rd, np.r_[1.0, np.zeros(-e)])

    if _is_zero(_strip(pn)):
        PN, PD = np.array([2.0 + 0j]), np.array([1.0 + 0j, 0.0])
    else:
        n2, d2 = reciprocal(pn, pd, -2)
        # 2/zeta - n2/d2 = (2 d2 - zeta n2) / (zeta d2)
        PN = np.polysub(2 * d2, np.polymul([1.0, 0.0], n2))
        PD = np.polymul([1.0, 0.0], d2)
    if _is_zero(_strip(qn)):
        QN, QD = np.array([0j]), np.array([1.0 + 0j])
    else:
        QN, QD = reciprocal(qn, qd, -4)
    return PN, PD, QN, QD


def ince_classify(p_num, p_den, q_num, q_den, tol: float = 1e-9) -> OdeSingularityType:
    """Ince type of y'' + p y' + q y = 0 with p, q rational (coefficients highest power first)."""
    for d in (p_den, q_den):
        if _is_zero(_strip(d)):
            raise ValueError("denominator is identically zero")
    cand = []
    for d in (p_den, q_den):
        d = _strip(d)
        if len(d) > 1:
            cand.extend(np.roots(d))
    pts = []
    for z in cand:
        if all(abs(z - w) > 1e-7 * (1 + abs(w)) for w in pts):
            pts.append(complex(z))
    kinds = [_classify_point(p_num, p_den, q_num, q_den, z, tol) for z in pts]
    PN, PD, QN, QD = _at_infinity(p_num, p_den, q_num, q_den)
    kinds.append(_classify_point(PN, PD, QN, QD, 0.0, tol))
    a = sum(1 for k in kinds if k == "elementary")
    b = sum(1 for k in kinds if k == "regular")
    sp = tuple(sorted(k[1] for k in kinds if isinstance(k, tuple)))
    return OdeSingularityType(a, b, sp)


def radial_ode_coeffs(p: RadialProblem, E1: float = 1.0):
    """(p_num, p_den, q_num, q_den) of the radial equation in the form y'' + p y' + q y = 0."""
    h2 = p.hbar_t ** 2
    # q = -(l^2 + (alpha r^4 + beta r^6 - E r^2)/hbar^2) / r^2
    q_num = -np.array([p.beta_t / h2, 0, p.alpha_t / h2, 0, -E1 / h2, 0, p.l ** 2], dtype=float)
    return [1.0], [1.0, 0.0], q_num, [1.0, 0.0, 0.0]


# operator representation on a p_z sector

_D8 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])


def _deriv(f, h, axis):
    out = np.zeros_like(f)
    for j, c in enumerate(_D8):
        if c:
            out += c * np.roll(f, -(j - 4), axis=axis)
    return out / h


def gaussian_tests(n: int = 10, seed: int = 0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        x0, y0 = rng.uniform(-1.5, 1.5, 2)
        sig = rng.uniform(0.7, 1.1)
        kx, ky = rng.uniform(-1.0, 1.0, 2)
        out.append((x0, y0, sig, kx, ky))
    return out


def nilrep_residual(m: float, p_z: float, lam: float, k: float, hbar: float,
                    n_grid: int = 512, half_width: float = 12.0, tests=None, seed: int = 0) -> dict:
    """Commutator residuals ||([X, Y] - rhs) psi|| / ||psi|| of the x-y representation.

    L1 = k y, L2 = -k x, L3 = -m k, K3 = -k,
    S1 = -i hbar d_x - (lam m k/2) y, S2 = -i hbar d_y + (lam m k/2) x,
    S3 = (p_z - k/lam) - (lam k/2)(x^2 + y^2).
    """
    h = 2 * half_width / n_grid
    x = -half_width + h * np.arange(n_grid)
    X, Y = np.meshgrid(x, x, indexing="ij")
    c = lam * m * k / 2

    ops = {
        "L1": lambda f: k * Y * f,
        "L2": lambda f: -k * X * f,
        "S1": lambda f: -1j * hbar * _deriv(f, h, 0) - c * Y * f,
        "S2": lambda f: -1j * hbar * _deriv(f, h, 1) + c * X * f,
        "S3": lambda f: (p_z - k / lam) * f - lam * k / 2 * (X * X + Y * Y) * f,
    }
    # nonzero relations: [X, Y] psi = rhs(psi)
    rel = {
        "[L1,S2]": ("L1", "S2", lambda f: 1j * hbar * k * f),            # -i hbar K3
        "[L2,S1]": ("L2", "S1", lambda f: -1j * hbar * k * f),           # +i hbar K3
        "[S1,S2]": ("S1", "S2", lambda f: -1j * hbar * lam * m * k * f),  # i hbar lam L3
        "[S1,S3]": ("S1", "S3", lambda f: -1j * hbar * lam * ops["L2"](f)),
        "[S2,S3]": ("S2", "S3", lambda f: 1j * hbar * lam * ops["L1"](f)),
    }
    tests = tests if tests is not None else gaussian_tests(10, seed)
    worst = {key: 0.0 for key in rel}
    worst["[L1,L2]"] = 0.0
    cas_val = k * p_z / lam + k * k * (m * m / 2 - 1 / lam ** 2)
    cas_res = 0.0
    for x0, y0, sig, kx, ky in tests:
        psi = np.exp(-((X - x0) ** 2 + (Y - y0) ** 2) / (2 * sig * sig) + 1j * (kx * X + ky * Y))
        nrm = np.linalg.norm(psi)
        for key, (a, b, rhs) in rel.items():
            A, B = ops[a], ops[b]
            r = A(B(psi)) - B(A(psi)) - rhs(psi)
            worst[key] = max(worst[key], float(np.linalg.norm(r) / nrm))
        L12 = ops["L1"](ops["L2"](psi)) - ops["L2"](ops["L1"](psi))
        worst["[L1,L2]"] = max(worst["[L1,L2]"], float(np.linalg.norm(L12) / nrm))
        # c k^2 = (L1^2 + L2^2 + L3^2)/2 + k S3 / lam
        C = 0.5 * (ops["L1"](ops["L1"](psi)) + ops["L2"](ops["L2"](psi)) + (m * k) ** 2 * psi) \
            + k / lam * ops["S3"](psi)
        cas_res = max(cas_res, float(np.linalg.norm(C - cas_val * psi) / nrm))
    return {"commutators": worst, "max": max(worst.values()), "casimir_value": cas_val,
            "casimir_residual": cas_res, "n_grid": n_grid}
