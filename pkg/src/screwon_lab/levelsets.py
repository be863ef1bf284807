"""Common level sets of (c, m, s, h): topology from the sign pattern of
chi(u) on the latitude range [-s, s], fibres over the poles, and the
Morse description of Hill regions on a symplectic leaf."""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .conserved import ConservedSet
from .elliptic import DEFAULT_TOL, chi, chi_coeffs, chi_roots

TAGS = ("Torus2", "HornTorus", "Circle", "Point", "Empty")


@dataclass
class LevelSetReport:
    tag: str
    latitude_interval: tuple | None
    pole_fibres: dict
    roots: list
    note: str = ""

    def to_json(self) -> dict:
        d = asdict(self)
        d["roots"] = [[float(r), int(mu)] for r, mu in self.roots]
        if self.latitude_interval is not None:
            d["latitude_interval"] = [float(v) for v in self.latitude_interval]
        return d


@dataclass
class HillReport:
    regime: int  # sign of 2c - m^2
    critical_energies: dict
    hill_topology: str
    level_topology: str
    description: str = ""


def cmin(s: float, h: float, lam: float) -> float:
    if s <= 0:
        raise ValueError("c_min is defined for s > 0")
    return -s / lam + h * h / (2 * s * s)


def _pole_latitude(s: float, k: float, pole: str) -> float:
    if pole not in ("N", "S"):
        raise ValueError("pole must be 'N' or 'S'")
    sg = math.copysign(1.0, k)
    return sg * s if pole == "N" else -sg * s


def pole_fibre(q, lam: float, k: float, pole: str, tol: float = 1e-9):
    """None, 'Circle' or 'Point': the L-circle over a pole of the S-sphere.

    Exists only when h + m u_p = 0; its squared radius is
    r^2 = 2c - m^2 - 2 u_p / lam.
    """
    if k == 0:
        raise ValueError("k = 0 has no dynamics")
    up = _pole_latitude(q.s, k, pole)
    scale = 1 + abs(q.h) + abs(q.m) * q.s + abs(q.c) + q.m * q.m + q.s / lam
    if abs(q.h + q.m * up) > tol * scale:
        return None
    r2 = 2 * q.c - q.m * q.m - 2 * up / lam
    if r2 > tol * scale:
        return "Circle"
    if r2 >= -tol * scale:
        return "Point"
    return None


def classify(q: ConservedSet, lam: float, k: float, tol: float = DEFAULT_TOL) -> LevelSetReport:
    """Topology of the common level set from the roots of chi on [-s, s]."""
    if k == 0:
        raise ValueError("k = 0 has no dynamics")
    s = q.s
    fibres = {p: pole_fibre(q, lam, k, p) for p in ("N", "S")}
    if s == 0:
        # S = 0: L-circle of radius^2 = 2c - m^2 when h = 0
        r2 = 2 * q.c - q.m * q.m
        if abs(q.h) > tol or r2 < -tol:
            return LevelSetReport("Empty", None, fibres, [], "s = 0")
        tag = "Circle" if r2 > tol else "Point"
        return LevelSetReport(tag, (0.0, 0.0), fibres, [], "s = 0 (static Sigma3 family)")

    roots = chi_roots(q, lam, tol)
    coeffs = chi_coeffs(q, lam)
    scale = 1 + s
    ptol = 1e-9 * scale

    def at_pole(r):
        return abs(abs(r) - s) < ptol

    inner = sorted({r for r, _ in roots if -s - ptol < r < s + ptol})
    breaks = sorted({-s, s, *[min(max(r, -s), s) for r in inner]})
    # merge breakpoints closer than ptol
    merged = []
    for b in breaks:
        if not merged or b - merged[-1] > ptol:
            merged.append(b)
    breaks = merged
    mult = {}
    for r, mu in roots:
        for b in breaks:
            if abs(b - r) < ptol:
                mult[b] = mu

    intervals = []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if np.polyval(coeffs, 0.5 * (a + b)) > 0:
            intervals.append((a, b))

    def pole_admissible(b):
        if not at_pole(b):
            return None
        name = "N" if (b > 0) == (k > 0) else "S"
        return fibres[name]

    if intervals:
        if len(intervals) > 1:
            note = "more than one positive interval"
        else:
            note = ""
        lo, hi = intervals[0][0], intervals[-1][1]
        horn = any(at_pole(b) and mult.get(b, 0) >= 2 for b in (lo, hi))
        tag = "HornTorus" if horn else "Torus2"
        return LevelSetReport(tag, (lo, hi), fibres, roots, note)

    # no open interval: isolated admissible latitudes only
    for r, mu in roots:
        if at_pole(r):
            continue
        if -s < r < s and mu >= 2:
            d2 = np.polyval(np.polyder(coeffs, 2), r)
            if d2 < 0 or mu == 3:
                return LevelSetReport("Circle", (r, r), fibres, roots)
    for b in (-s, s):
        fib = pole_admissible(b)
        if fib is not None:
            return LevelSetReport("Circle" if fib == "Circle" else "Point", (b, b), fibres, roots)
    return LevelSetReport("Empty", None, fibres, roots)


def hill_topology(c: float, m: float, E: float, lam: float, k: float = 1.0,
                  tol: float = 1e-12) -> HillReport:
    """Hill region {H <= E k^2} on the leaf (c, m) and its boundary level set."""
    d = 2 * c - m * m
    E_ring = c + 1 / (2 * lam * lam)
    E_iso = lam * lam / 8 * d * d + E_ring
    if d <= 0:
        crit = {"E_G": E_iso}
        if E < E_iso - tol:
            return HillReport(-1 if d < 0 else 0, crit, "Empty", "Empty")
        if E <= E_iso + tol:
            return HillReport(-1 if d < 0 else 0, crit, "Point", "CriticalSlice",
                              "global minimum: isolated point")
        return HillReport(-1 if d < 0 else 0, crit, "B4", "S3")
    crit = {"E_ring": E_ring, "E_sad": E_iso}
    if E < E_ring - tol:
        return HillReport(1, crit, "Empty", "Empty")
    if E <= E_ring + tol:
        return HillReport(1, crit, "S1", "CriticalSlice", "critical circle of minima")
    if E < E_iso - tol:
        return HillReport(1, crit, "B3xS1", "S2xS1")
    if E <= E_iso + tol:
        return HillReport(1, crit, "B3xS1+2cell", "CriticalSlice",
                          "index-2 critical point: S2xS1 pinches")
    return HillReport(1, crit, "B4", "S3")


# the twelve reference level sets with k = lam = s = 1
FIGURE_FIXTURES = {
    "a": ((3.0, 1.0, 1.0, 2.0), "Torus2"),
    "b": ((1.5, -1.0, 1.0, 1.0), "HornTorus"),
    "c": ((2.0, -1.0, 1.0, 1.0), "Torus2"),
    "d": ((0.0, 1.0, 1.0, 1.0), "Torus2"),
    "e": ((-0.5, 1.0, 1.0, 1.0), "Point"),
    "f": ((17 / 8, -0.5, 1.0, 2.0), "Circle"),
    "g": ((1.0, 1.0, 1.0, -1.0), "Circle"),
    "h": ((2.0, 0.0, 1.0, 0.0), "Torus2"),
    "i": ((1.0, 0.0, 1.0, 0.0), "HornTorus"),
    "j": ((0.0, 0.0, 1.0, 0.0), "Torus2"),
    "k": ((-1.0, 0.0, 1.0, 0.0), "Point"),
    "l": ((3.0, 2.0, 1.0, -2.0), "Point"),
}


def _classify_tuple(args):
    (c, m, s, h), lam, k = args
    q = ConservedSet.from_cmsh(c, m, s, h, lam)
    rep = classify(q, lam, k)
    out = {"c": c, "m": m, "s": s, "h": h}
    out.update(rep.to_json())
    return out


def sweep(points, lam: float, k: float, workers: int = 1):
    """Classify many (c, m, s, h) tuples; results in input order."""
    jobs = [(tuple(map(float, p)), lam, k) for p in points]
    if workers <= 1:
        return [_classify_tuple(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_classify_tuple, jobs, chunksize=256))


def write_jsonl(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r) + "\n")
