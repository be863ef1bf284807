"""Command line front end: simulate | classify | spectrum | actionangle | verify.

Configs are INI files (configparser). Exit codes: 0 ok, 2 a check exceeded
its bound, 3 I/O error, 4 config error.
"""
from __future__ import annotations

import argparse
import configparser
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import actionangle, conserved, dynamics, lax, levelsets, quantum
from .core_types import ModelParams, PhaseState, random_state
from .poisson import EUCLIDEAN, NILPOTENT

EXIT_OK, EXIT_CHECK, EXIT_IO, EXIT_CONFIG = 0, 2, 3, 4


class ConfigError(Exception):
    pass


def _dumps(obj) -> str:
    # float repr is the shortest round-trip form
    return json.dumps(obj, sort_keys=True, allow_nan=True)


def _to_builtin(x):
    if isinstance(x, dict):
        return {str(k): _to_builtin(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_to_builtin(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_to_builtin(v) for v in x.tolist()]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def load_config(path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if path is None:
        return cp
    text = Path(path).read_text(encoding="utf-8")
    try:
        cp.read_string(text, source=str(path))
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:1: expected a [section] header, got {exc.line!r}") from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"{path}:{lineno}:1: cannot parse {line!r}") from None
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", "?")
        raise ConfigError(f"{path}:{lineno}:1: {exc.message}") from None
    return cp


def _get(cp, section, key, conv=float, default=None):
    if not cp.has_option(section, key):
        if default is None:
            raise ConfigError(f"[{section}] missing key '{key}'")
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a valid {conv.__name__}") from None


def _vec3(raw: str):
    parts = [float(v) for v in raw.replace(";", ",").split(",")]
    if len(parts) != 3:
        raise ValueError
    return parts


_vec3.__name__ = "3-vector"


def _model(cp) -> ModelParams:
    return ModelParams(k=_get(cp, "model", "k", default=1.0), lam=_get(cp, "model", "lam", default=1.0),
                       hbar=_get(cp, "model", "hbar", default=1.0), mu=_get(cp, "model", "mu", default=1.0))


# simulate

def cmd_simulate(cp, out: Path, seed: int, check_lax: bool) -> tuple[int, dict]:
    params = _model(cp)
    if cp.has_option("initial", "L"):
        state = PhaseState(_get(cp, "initial", "L", _vec3), _get(cp, "initial", "S", _vec3))
    else:
        state = random_state(np.random.default_rng(seed), _get(cp, "initial", "scale", default=3.0))
    t_end = _get(cp, "run", "t_end", default=10.0)
    tol = _get(cp, "run", "tol", default=1e-10)
    n = _get(cp, "run", "n_samples", int, default=1001)
    bound = _get(cp, "run", "max_drift", default=1e-7)
    lax_bound = _get(cp, "run", "max_lax", default=1e-6)
    tag = conserved.classify_submanifold(state, params)
    static = (conserved.SubmanifoldTag.Sigma2, conserved.SubmanifoldTag.Sigma3,
              conserved.SubmanifoldTag.HornCenter)
    if tag in static:
        traj = dynamics.static_trajectory(state, params, np.linspace(0, t_end, n))
    else:
        traj = dynamics.integrate(state, params, t_end, tol, n_samples=n)
    dr = conserved.drift(traj)
    report = {"command": "simulate", "seed": seed, "submanifold": tag.value, "drift": dr,
              "max_drift": max(dr[k] for k in "cmsh"), "bound": bound, "nfev": traj.nfev}
    ok = report["max_drift"] < bound
    if check_lax:
        res = lax.lax_residual(traj, params, [0.7, 1.3 + 0.4j, -2.0], dt=min(1e-2, t_end / 50),
                               max_points=100)
        report["lax_residual"] = res
        ok = ok and res < lax_bound
    report["passed"] = bool(ok)
    out.mkdir(parents=True, exist_ok=True)
    dynamics.write_csv(traj, out / "trajectory.csv")
    (out / "drift.json").write_text(_dumps(_to_builtin(report)) + "\n", encoding="utf-8")
    return (EXIT_OK if ok else EXIT_CHECK), report


# classify

def _grid_points(cp):
    if cp.has_section("fixtures"):
        names = [s.strip() for s in _get(cp, "fixtures", "use", str).split(",") if s.strip()]
        bad = [n for n in names if n not in levelsets.FIGURE_FIXTURES]
        if bad:
            raise ConfigError(f"[fixtures] unknown fixture names {bad}")
        return [levelsets.FIGURE_FIXTURES[n][0] for n in names], names
    if cp.has_option("grid", "points"):
        pts = []
        for chunk in cp.get("grid", "points").split(";"):
            if chunk.strip():
                try:
                    vals = [float(v) for v in chunk.split(",")]
                except ValueError:
                    raise ConfigError(f"[grid] points: cannot parse {chunk!r}") from None
                if len(vals) != 4:
                    raise ConfigError(f"[grid] points: need c,m,s,h in {chunk!r}")
                pts.append(tuple(vals))
        if not pts:
            raise ConfigError("[grid] is empty")
        return pts, None
    axes = []
    for name in "cmsh":
        raw = _get(cp, "grid", name, str)
        try:
            a, b, num = raw.split(":")
            axes.append(np.linspace(float(a), float(b), int(num)))
        except ValueError:
            raise ConfigError(f"[grid] {name} = {raw!r}: expected start:stop:num") from None
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    if len(pts) == 0:
        raise ConfigError("[grid] is empty")
    return [tuple(p) for p in pts], None


def cmd_classify(cp, out: Path, workers: int) -> tuple[int, dict]:
    lam = _get(cp, "model", "lam", default=1.0)
    k = _get(cp, "model", "k", default=1.0)
    pts, names = _grid_points(cp)
    recs = levelsets.sweep(pts, lam, k, workers)
    if names:
        for rec, nm in zip(recs, names):
            rec["fixture"] = nm
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "classify.jsonl", "w", encoding="utf-8") as fh:
        for r in recs:
            fh.write(_dumps(_to_builtin(r)) + "\n")
    ok = True
    if names:
        ok = all(levelsets.FIGURE_FIXTURES[n][1] == r["tag"] for n, r in zip(names, recs))
    return (EXIT_OK if ok else EXIT_CHECK), {"command": "classify", "count": len(recs), "passed": ok}


# spectrum

def cmd_spectrum(cp, out: Path) -> tuple[int, dict]:
    report = {"command": "spectrum"}
    if cp.has_section("problem"):
        p = quantum.RadialProblem(_get(cp, "problem", "lambda_t", default=0.0),
                                  _get(cp, "problem", "hbar_t", default=1.0),
                                  _get(cp, "problem", "l", int, default=0),
                                  _get(cp, "problem", "pz_t", default=0.0))
        n = _get(cp, "problem", "n_levels", int, default=5)
        report["radial"] = quantum.solve_spectrum(p, n).to_json()
        if p.lambda_t == 0:
            exact = [2 * p.hbar_t * (2 * i + abs(p.l) + 1) for i in range(n)]
            report["radial"]["analytic"] = exact
    if cp.has_section("strong"):
        g = _get(cp, "strong", "g_t")
        l = _get(cp, "strong", "l", int, default=0)
        ks = [float(v) for v in _get(cp, "strong", "k_values", str, default="0.5,1,2").split(",")]
        rows = []
        for kk in ks:
            # lam chosen so that g~ = lam |k| m^3 / hbar is fixed (mu = m = hbar = 1)
            gk = quantum.strong_coupling_g(1.0, kk, g / abs(kk), 1.0, 1.0)
            rows.append({"k": kk, "g_t": gk, "E2": float(quantum.solve_strong(gk, l)[0])})
        report["strong"] = rows
    if cp.has_section("wkb"):
        p = quantum.RadialProblem(_get(cp, "wkb", "lambda_t", default=1.0),
                                  _get(cp, "wkb", "hbar_t", default=1.0),
                                  _get(cp, "wkb", "l", int, default=0),
                                  _get(cp, "wkb", "pz_t", default=0.0))
        ns = [int(v) for v in _get(cp, "wkb", "n", str, default="10,20").split(",")]
        exact = quantum.solve_spectrum(p, max(ns) + 1, shoot=False).eigenvalues
        table = []
        for nn in ns:
            w = float(quantum.wkb_dimensionless(p, [nn])[0])
            table.append({"n": nn, "wkb": w, "exact": float(exact[nn]),
                          "rel_err": abs(w - exact[nn]) / abs(exact[nn])})
        report["wkb"] = table
    if len(report) == 1:
        raise ConfigError("spectrum config needs a [problem], [strong] or [wkb] section")
    out.mkdir(parents=True, exist_ok=True)
    (out / "spectrum.json").write_text(_dumps(_to_builtin(report)) + "\n", encoding="utf-8")
    report["passed"] = True
    return EXIT_OK, report


# action-angle

def cmd_actionangle(cp, out: Path) -> tuple[int, dict]:
    lam = _get(cp, "model", "lam", default=1.0)
    k = _get(cp, "model", "k", default=1.0)
    q = conserved.ConservedSet.from_cmsh(*(_get(cp, "torus", v) for v in "cmsh"), lam)
    u = _get(cp, "torus", "u")
    theta = _get(cp, "torus", "theta", default=0.0)
    branch = _get(cp, "torus", "branch", str, default="rising")
    aa = actionangle.torus_aa(u, theta, q, lam, k, branch)
    chk = actionangle.canonical_check(q, lam, k, u, theta, branch)
    bound = _get(cp, "torus", "max_bracket_residual", default=1e-4)
    ok = chk["max_residual"] < bound
    report = {"command": "actionangle", "I1": aa.I1, "I2": aa.I2, "theta1": aa.theta1,
              "theta2": aa.theta2, "brackets": chk["brackets"], "max_residual": chk["max_residual"],
              "passed": bool(ok)}
    out.mkdir(parents=True, exist_ok=True)
    (out / "actionangle.json").write_text(_dumps(_to_builtin(report)) + "\n", encoding="utf-8")
    return (EXIT_OK if ok else EXIT_CHECK), report


# verify

def _suite(name, value, threshold, passed=None):
    value = float(value)
    ok = value < threshold if passed is None else bool(passed)
    return {"name": name, "value": value, "threshold": float(threshold), "passed": ok}


def run_verify(seed: int = 0, inject_fault: bool = False) -> dict:
    """A quick version of every module's property suite."""
    rng = np.random.default_rng(seed)
    params = ModelParams()
    suites = []

    worst = 0.0
    trajs = []
    for _ in range(3):
        tr = dynamics.integrate(random_state(rng), params, 20.0, 1e-10, n_samples=401)
        trajs.append(tr)
        d = conserved.drift(tr)
        worst = max(worst, max(d[k] for k in "cmsh"))
    suites.append(_suite("conservation", worst, 1e-7))

    res = max(lax.lax_residual(tr, params, [0.8, 1 + 1j], dt=1e-2, max_points=60) for tr in trajs[:2])
    suites.append(_suite("lax_residual", res, 1e-6))

    r_scale = 1.01 if inject_fault else 1.0
    rm = 0.0
    for kind in (NILPOTENT, EUCLIDEAN):
        x = random_state(rng)
        for z, zp in [(1 + 1j, -1.0), (0.5, 2.0), (-0.3 + 0.7j, 1.1j)]:
            rm = max(rm, lax.rmatrix_residual(x, params, kind, z, zp, r_scale=r_scale))
    suites.append(_suite("rmatrix_residual", rm, 1e-12))

    tags_ok = all(levelsets.classify(conserved.ConservedSet.from_cmsh(*v), 1.0, 1.0).tag == t
                  for v, t in levelsets.FIGURE_FIXTURES.values())
    suites.append(_suite("classification_fixtures", 0.0 if tags_ok else 1.0, 0.5))

    rep = dynamics.linearize_static(PhaseState([0, 0, 0], [0, 0, -1.0]), params)
    err = np.max(np.abs(np.sort_complex(rep.eigenvalues)
                        - np.sort_complex(np.array([1j, 1j, -1j, -1j, 0, 0]))))
    suites.append(_suite("stability_sigma2", err, 1e-10))

    ts = np.linspace(-5, 5, 41)
    hv = max(np.max(np.abs(dynamics.horn_velocity(t, 1.0, 1.0, params)
                           - dynamics.eom_rhs(dynamics.horn_state(t, 1.0, 1.0, params), params)))
             for t in ts)
    suites.append(_suite("horn_torus_eom", hv, 1e-10))

    q = conserved.ConservedSet.from_cmsh(3, 1, 1, 2)
    aa = actionangle.canonical_check(q, 1.0, 1.0, -0.4)
    suites.append(_suite("action_angle_brackets", aa["max_residual"], 1e-4))

    sp = quantum.solve_spectrum(quantum.RadialProblem(0.0, 1.0, 0), 3)
    qerr = np.max(np.abs(sp.eigenvalues - np.array([2.0, 6.0, 10.0])))
    suites.append(_suite("quantum_weak_coupling", qerr, 1e-7))

    nil = quantum.nilrep_residual(1.0, 0.5, 1.0, 1.0, 1.0, n_grid=256, tests=quantum.gaussian_tests(3, seed))
    suites.append(_suite("nilpotent_representation", nil["max"], 1e-6))

    return {"command": "verify", "seed": int(seed), "inject_fault": bool(inject_fault),
            "suites": suites, "passed": all(s["passed"] for s in suites)}


def cmd_verify(out: Path | None, seed: int, inject_fault: bool) -> tuple[int, dict]:
    report = run_verify(seed, inject_fault)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "verify.json").write_text(_dumps(_to_builtin(report)) + "\n", encoding="utf-8")
    return (EXIT_OK if report["passed"] else EXIT_CHECK), report


def report_schema() -> dict:
    return json.loads(resources.files("screwon_lab").joinpath("data/schema.json").read_text())


def fixtures_config_path():
    return resources.files("screwon_lab").joinpath("data/figures.ini")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="screwon-lab", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=["simulate", "classify", "spectrum", "actionangle", "verify"])
    ap.add_argument("--config", type=Path, default=None)
    ap.add_argument("--out", type=Path, default=None,
                    help="output directory (default ./out; verify writes only when given)")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--check-lax", action="store_true")
    ap.add_argument("--json", action="store_true", help="print the report as JSON on stdout")
    ap.add_argument("--inject-fault", action="store_true",
                    help="verify: perturb the r-matrix constant (mutation test)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not 0 <= args.seed < 2 ** 64:
        print("error: --seed must be a u64", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "verify":
            code, report = cmd_verify(args.out, args.seed, args.inject_fault)
        else:
            cfg = args.config
            if cfg is None and args.command == "classify":
                cfg = fixtures_config_path()
            if cfg is None:
                raise ConfigError(f"{args.command} needs --config")
            cp = load_config(cfg)
            out = args.out or Path("out")
            if args.command == "simulate":
                code, report = cmd_simulate(cp, out, args.seed, args.check_lax)
            elif args.command == "classify":
                code, report = cmd_classify(cp, out, args.workers)
            elif args.command == "spectrum":
                code, report = cmd_spectrum(cp, out)
            else:
                code, report = cmd_actionangle(cp, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.json:
        print(_dumps(_to_builtin(report)))
    return code


if __name__ == "__main__":
    sys.exit(main())
