"""Verification scenarios run by the command line tool.

Each runner takes validated parameters, a seeded generator and an
executor and returns a list of :class:`Check` records.  Randomized sweeps
draw all their inputs before any work is mapped onto the executor, so the
records do not depend on the number of workers.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import bsym, fracnum, geom, powsym, ratfun


@dataclass
class Check:
    check: str
    computed: object
    reference: object
    tolerance: float
    passed: bool
    error_estimate: object = None
    runtime_ms: float | None = None


class ConfigError(ValueError):
    pass


# ------------------------------------------------------------ random inputs


def random_jet(rng, n: int, margin: float = 0.3, complex_coeffs: bool = True, derivs: bool = True) -> powsym.OperatorJet:
    """Strongly elliptic jet with the given margin (rejection sampling)."""
    while True:
        M = rng.standard_normal((n, n)) * 0.4
        A = np.eye(n) * rng.uniform(0.8, 2.5) + M
        if complex_coeffs:
            A = A + 0.4j * rng.standard_normal((n, n))
        if powsym.ellipticity_margin(A) < margin:
            continue
        dA = rng.standard_normal((n, n, n)) if derivs else np.zeros((n, n, n))
        b = rng.standard_normal(n)
        if complex_coeffs:
            if derivs:
                dA = dA + 1j * rng.standard_normal((n, n, n))
            b = b + 1j * rng.standard_normal(n)
        return powsym.OperatorJet(A, dA=dA, b=b, b0=rng.standard_normal(), ellipticity_margin=margin)


def random_tangent(rng, n: int, lo: float, hi: float) -> np.ndarray:
    d = rng.standard_normal(n - 1)
    return d / np.linalg.norm(d) * rng.uniform(lo, hi)


def localized_jet(rng, n: int, g: float, c_nu: float = 0.0) -> powsym.OperatorJet:
    """Pulled-back Laplacian in normal coordinates: ``a_nj = 0``, ``a_nn = 1``, ``b_n = -(g - c_nu)``."""
    T = rng.standard_normal((n - 1, n - 1)) * 0.3
    A = np.eye(n)
    A[:-1, :-1] += T @ T.T
    dA = np.zeros((n, n, n))
    for m in range(n):
        S = rng.standard_normal((n - 1, n - 1)) * 0.2
        dA[m, :-1, :-1] = S + S.T
    b = rng.standard_normal(n)
    b[-1] = -(g - c_nu)
    return powsym.OperatorJet(A, dA=dA, b=b, b0=rng.standard_normal())


# ------------------------------------------------------------------ runners


def run_jump_table(p, rng, pool) -> list:
    tol = p["tolerance"]
    out = []
    for br in p["brackets"]:
        zinv = ratfun.rf_from_poles([1.0], [(1j * br, 1), (-1j * br, 1)])
        cases = [
            ("(i) 1/<xi>^2", zinv, 0j),
            ("(ii) xi_n/<xi>^2", ratfun.rf_arith("mul", ratfun.rf_poly([0.0, 1.0]), zinv), 1j),
            ("(iii) 1/chi_-", ratfun.inv_minus(br), -1 + 0j),
        ]
        for name, r, ref in cases:
            out.append(_jump_check(f"{name} <xi'>={br:.6g}", r, ref, tol))
    for ann in p["a_nn"]:
        # l0 = xi_1^2 + ann xi_n^2 at xi' = e_1
        r = ratfun.rf_make([0.0, 1.0], [1.0, 0.0, ann])
        out.append(_jump_check(f"(iv) xi_n/l0 a_nn={ann:.6g}", r, 1j / ann, tol))
    return out


def _jump_check(name, r, ref, tol) -> Check:
    j1, j2 = ratfun.jump_paths(r)
    err = max(abs(j1 - ref), abs(j2 - ref))
    return Check(name, j1, ref, tol, err <= tol, abs(j1 - j2))


def _pipeline_reference(bj, a, which):
    if which == "closed":
        return bsym.boundary_symbol_closed(bj.jet, a)(bj.xi_t), None
    if which == "closed_literal":
        return bsym.boundary_symbol_closed(bj.jet, a, literal=True)(bj.xi_t), None
    if which == "numeric":
        return bsym.boundary_symbol_numeric(bj, a)
    raise ConfigError(f"unknown reference {which!r}")


def run_bsym_check(p, rng, pool) -> list:
    case = p["case"]
    tol = p["tolerance"]
    count = p["count"]
    n = p["dimension"]
    if case == "random":
        inputs = []
        for _ in range(count):
            jet = random_jet(rng, n, p["margin"])
            a = float(rng.choice(p["a_values"]))
            xi = random_tangent(rng, n, p["xi_min"], p["xi_max"])
            inputs.append((bsym.BoundaryJet(jet, xi), a))

        def one(item):
            bj, a = item
            got = bsym.boundary_symbol_pipeline(bj, a)
            ref, _ = _pipeline_reference(bj, a, p["reference"])
            return got, ref, abs(got - ref) / (1.0 + abs(ref))

        res = list(pool.map(one, inputs))
        worst = max(range(len(res)), key=lambda k: res[k][2])
        got, ref, rel = res[worst]
        return [Check(f"pipeline vs {p['reference']} (worst of {count}, relative)", got, ref, tol, rel <= tol, rel)]
    if case == "laplacian":
        jet = powsym.OperatorJet(np.eye(n))
        vals = [abs(bsym.boundary_symbol_pipeline(bsym.BoundaryJet(jet, random_tangent(rng, n, p["xi_min"], p["xi_max"])), a))
                for a in rng.choice(p["a_values"], count)]
        worst = max(vals)
        return [Check(f"|b| for -Laplacian (max over {count})", worst, 0.0, tol, worst <= tol, worst)]
    if case in ("localized", "perturbed"):
        worst = 0.0
        got_w = ref_w = 0.0
        for _ in range(count):
            a = float(rng.choice(p["a_values"]))
            g = rng.uniform(-3, 3)
            c_nu = rng.uniform(-3, 3) if case == "perturbed" else 0.0
            jet = localized_jet(rng, n, g, c_nu)
            bj = bsym.BoundaryJet(jet, random_tangent(rng, n, p["xi_min"], p["xi_max"]))
            got = bsym.boundary_symbol_pipeline(bj, a)
            ref = a * (g - c_nu)
            if abs(got - ref) >= worst:
                worst, got_w, ref_w = abs(got - ref), got, ref
        label = "a*g" if case == "localized" else "a*(g - c_nu)"
        return [Check(f"b = {label} (worst of {count})", got_w, ref_w, tol, worst <= tol, worst)]
    if case == "locality":
        hits = 0
        for k in range(count):
            jet = random_jet(rng, n, p["margin"])
            dA = jet.dA.copy()
            expect = "nonlocal" if k % 2 == 0 else "local"
            if expect == "local":
                dA[:-1, -1, -1] = 0.0
            else:
                j = rng.integers(0, n - 1)
                dA[j, -1, -1] = rng.uniform(0.1, 2.0) * rng.choice([-1, 1])
            jet = powsym.OperatorJet(jet.A, dA=dA, b=jet.b, b0=jet.b0, ellipticity_margin=p["margin"])
            a = float(rng.choice(p["a_values"]))
            hits += bsym.classify_locality(bsym.boundary_symbol_closed(jet, a)) == expect
        rate = hits / count
        return [Check(f"locality classification rate ({count} cases)", rate, 1.0, 0.0, rate == 1.0, 1.0 - rate)]
    raise ConfigError(f"unknown bsym_check case {case!r}")


def run_power_contour(p, rng, pool) -> list:
    tol = p["tolerance"]
    inputs = []
    for _ in range(p["count"]):
        n = int(rng.integers(2, 4))
        jet = random_jet(rng, n, 0.3)
        xi = rng.standard_normal(n) * rng.uniform(0.5, 3.0)
        a = float(rng.uniform(0.05, 1.95))
        inputs.append((jet, xi, a))

    def one(item):
        jet, xi, a = item
        p0, p1 = powsym.power_symbol(jet, xi, a)
        c = powsym.power_symbol_contour(jet, xi, a, p["nodes"])
        return c, p0 + p1, abs(c - (p0 + p1)) / (1.0 + abs(p0))

    res = list(pool.map(one, inputs))
    k = max(range(len(res)), key=lambda i: res[i][2])
    c, ref, rel = res[k]
    return [Check(f"contour vs closed form (worst of {p['count']}, nodes={p['nodes']})", c, ref, tol, rel <= tol, rel)]


def run_geometry(p, rng, pool) -> list:
    patch = geom.builtin_patch(p["patch"], **p["patch_params"])
    out = []
    pts = patch.sample(rng, p["points"])
    for name in p["checks"]:
        if name == "lemma":
            worst = 0.0
            for y in pts:
                _, _, J1, J1_fd = geom.jacobians(patch, y)
                worst = max(worst, abs(J1 - J1_fd) / (1.0 + abs(J1)))
            out.append(Check(f"J0 div nu vs d/dt det (worst of {len(pts)})", worst, 0.0, p["tolerance_lemma"], worst <= p["tolerance_lemma"], worst))
        elif name == "j0":
            worst = 0.0
            for y in pts:
                J0, J0a, _, _ = geom.jacobians(patch, y)
                worst = max(worst, abs(J0 - J0a) / J0)
            out.append(Check(f"det M vs Gram area element (worst of {len(pts)})", worst, 0.0, p["tolerance_j0"], worst <= p["tolerance_j0"], worst))
        elif name == "ag_cancellation":
            worst = 0.0
            for y in pts:
                J0, _, _, _ = geom.jacobians(patch, y)
                g = geom.mean_curvature_g(patch, y)
                a = rng.uniform(0.05, 1.0)
                sc = rng.standard_normal(8)
                U0, U1, V0, V1 = sc[0] + 1j * sc[1], sc[2] + 1j * sc[3], sc[4] + 1j * sc[5], sc[6] + 1j * sc[7]
                c_nu = rng.standard_normal()
                worst = max(worst, abs(geom.ag_cancellation_residual(J0, g, a, c_nu, U0, U1, V0, V1)))
            out.append(Check(f"ag cancellation residual (worst of {len(pts)})", worst, 0.0, p["tolerance_cancel"], worst <= p["tolerance_cancel"], worst))
        elif name == "classical":
            worst = 0.0
            k1, k2 = rng.standard_normal(patch.n), rng.standard_normal(patch.n)
            u = lambda x: math.sin(k1 @ x)
            gu = lambda x: math.cos(k1 @ x) * k1
            v = lambda x: math.exp(0.5 * (k2 @ x))
            gv = lambda x: 0.5 * math.exp(0.5 * (k2 @ x)) * k2
            for y in pts:
                worst = max(worst, geom.classical_green_residual(patch, u, gu, v, gv, y))
            out.append(Check(f"classical Green consistency (worst of {len(pts)})", worst, 0.0, p["tolerance_cancel"], worst <= p["tolerance_cancel"], worst))
        else:
            raise ConfigError(f"unknown geometry check {name!r}")
    return out


def _edge(fn, a) -> fracnum.EdgeFunction1D:
    mu = fn["mu"]
    if mu == "a-1":
        mu_val = a - 1.0
    elif mu == "a":
        mu_val = a
    else:
        mu_val = float(mu)
    return fracnum.EdgeFunction1D(mu_val, tuple(fn["w"]))


def run_greens_fraclap(p, rng, pool) -> list:
    out = []
    for a in p["a_values"]:
        u, v = _edge(p["u"], a), _edge(p["v"], a)
        rep = fracnum.greens_residual_fraclap(u, v, a)
        tol = p["tolerance"]
        scale = max(abs(rep.lhs), 1.0)
        out.append(Check(f"a={a:g} lhs vs rhs", rep.lhs, rep.rhs, tol, rep.residual <= tol * scale, rep.lhs_error))
        if p["reference"] == "closed_form":
            ref = -(4.0**a) * special.gamma(a) * special.gamma(a + 1.0)
            for side, val in (("lhs", rep.lhs), ("rhs", rep.rhs)):
                rel = abs(val - ref) / abs(ref)
                out.append(Check(f"a={a:g} {side} vs -4^a Gamma(a) Gamma(a+1)", val, ref, tol, rel <= tol, rel))
    return out


def run_greens_drift(p, rng, pool) -> list:
    a, c, c0 = p["a"], p["c"], p["c0"]
    u, v = _edge(p["u"], a), _edge(p["v"], a)
    rep = fracnum.greens_residual_drift(u, v, a, c, c0)
    tol = p["tolerance"]
    scale = max(abs(rep.lhs), abs(rep.rhs), 1e-3)
    out = [Check("full identity lhs vs rhs (relative)", rep.lhs, rep.rhs, tol, rep.residual <= tol * scale, rep.lhs_error)]
    if p["check_b_term"]:
        tu = fracnum.weighted_traces(u, a)
        tv = fracnum.weighted_traces(v, a)
        normal = {1: -1.0, -1: 1.0}
        predicted = -a * sum(c * normal[e] * tu[e].gamma0 * tv[e].gamma0 for e in (1, -1))
        mis = rep.lhs - rep.rhs_without_b
        sc = max(abs(predicted), 1e-3)
        out.append(Check("imbalance without B vs -a sum c_nu g0u g0v", mis, predicted, tol,
                         abs(mis - predicted) <= tol * sc, rep.lhs_error))
    return out


RUNNERS = {
    "jump_table": run_jump_table,
    "bsym_check": run_bsym_check,
    "power_contour": run_power_contour,
    "geometry": run_geometry,
    "greens_fraclap": run_greens_fraclap,
    "greens_drift": run_greens_drift,
}

_FN = {"mu": "a-1", "w": [1.0]}

DEFAULTS = {
    "jump_table": {"brackets": [1.0], "a_nn": [2.0], "tolerance": 1e-12},
    "bsym_check": {
        "case": "random", "count": 50, "dimension": 3, "a_values": [0.3, 0.5, 0.75, 1.25],
        "xi_min": 1.0, "xi_max": 10.0, "margin": 0.3, "reference": "closed", "tolerance": 1e-9,
    },
    "power_contour": {"count": 20, "nodes": 128, "tolerance": 1e-8},
    "geometry": {
        "patch": "ellipse", "patch_params": {"A": 2.0, "B": 1.0}, "points": 200,
        "checks": ["lemma", "j0"], "tolerance_lemma": 1e-6, "tolerance_j0": 1e-10, "tolerance_cancel": 1e-8,
    },
    "greens_fraclap": {
        "a_values": [0.75], "u": _FN, "v": {"mu": "a", "w": [1.0]}, "reference": "none", "tolerance": 1e-4,
    },
    "greens_drift": {
        "a": 0.75, "c": 1.0, "c0": 1.0, "u": _FN, "v": {"mu": "a-1", "w": [0.0, 1.0]},
        "check_b_term": True, "tolerance": 1e-3,
    },
}


def validate_params(kind: str, params: dict, where: str) -> dict:
    if kind not in DEFAULTS:
        raise ConfigError(f"{where}: unknown scenario kind {kind!r}; known: {sorted(DEFAULTS)}")
    if not isinstance(params, dict):
        raise ConfigError(f"{where}: params must be an object")
    unknown = sorted(set(params) - set(DEFAULTS[kind]) - {"seed"})
    if unknown:
        raise ConfigError(f"{where}: unknown parameter(s) {unknown} for kind {kind!r}; allowed: {sorted(DEFAULTS[kind])}")
    merged = dict(DEFAULTS[kind])
    merged.update(params)
    for key in ("u", "v"):
        if key in merged:
            fn = merged[key]
            if not isinstance(fn, dict) or set(fn) - {"mu", "w"} or "w" not in fn:
                raise ConfigError(f"{where}: function {key!r} needs keys 'mu' and 'w' only")
            fn.setdefault("mu", "a-1")
    return merged


def run_scenario(kind: str, params: dict, rng, pool, timing: bool = False) -> list:
    start = time.perf_counter()
    checks = RUNNERS[kind](params, rng, pool)
    if timing:
        ms = (time.perf_counter() - start) * 1e3
        for c in checks:
            c.runtime_ms = ms
    return checks
