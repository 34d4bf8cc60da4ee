"""Seeded verification suites producing JSON-ready check records."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .a2 import A2Point
from .errors import BiaxError
from .fundsol import HelmholtzParams, KernelSpec, kernel_a2_params, kernel_field
from .series import DEFAULT_OPTIONS, SeriesOptions
from .verify import (
    BOUNDARY_PROPERTIES,
    ResidualReport,
    StencilConfig,
    assembled_reduction_residual,
    boundary_limit,
    coefficient_consistency,
    constructive_residual,
    helmholtz_residual,
    singularity_exponent,
    system_residual,
)

SUITE_NAMES = ("system", "operator", "coefficients", "boundary", "singularity")

SYSTEM_TOL = 1e-8
OPERATOR_TOL = 1e-4
COEFFICIENT_TOL = 1e-6
BOUNDARY_TOL = 1e-3
SLOPE_TOL = 0.02


@dataclass(frozen=True)
class SuiteSettings:
    hp: HelmholtzParams
    seed: int = 0
    samples: int = 3
    opts: SeriesOptions = DEFAULT_OPTIONS
    stencil: StencilConfig = StencilConfig()
    radii: tuple[float, ...] = tuple(np.logspace(-4, -1, 7).tolist())


def _loc(v) -> list[float]:
    return [float(t) for t in v]


def _from_report(rep: ResidualReport, **extra) -> dict:
    d = rep.to_dict()
    d.update(extra)
    return d


def _failed(id: str, location, exc: BaseException) -> dict:
    return {
        "id": id, "location": _loc(location), "residual": None, "scale": None,
        "relative": None, "pass": False, "error": f"{type(exc).__name__}: {exc}",
    }


def _guard(id: str, location, fn: Callable[[], dict]) -> dict:
    try:
        return fn()
    except BiaxError as exc:
        return _failed(id, location, exc)


def _suite(name: str, checks: list[dict], passed: bool | None = None, **extra) -> dict:
    ok = all(c["pass"] for c in checks) if passed is None else passed
    out = {"name": name, "checks": checks, "pass": bool(ok and checks)}
    out.update(extra)
    return out


def _source(rng: np.random.Generator, p: int, lo=0.8, hi=1.5) -> np.ndarray:
    return rng.uniform(lo, hi, p)


def _offset_point(rng, x0: np.ndarray, rmin: float, rmax: float) -> np.ndarray:
    while True:
        d = rng.normal(size=x0.size)
        d /= np.linalg.norm(d)
        x = x0 + rng.uniform(rmin, rmax) * d
        if x[0] > 0.3 and x[1] > 0.3:
            return x


def run_system(s: SuiteSettings) -> dict:
    rng = np.random.default_rng([s.seed, 1])
    base = kernel_a2_params(1, s.hp)
    checks = []
    for n in range(s.samples):
        pt = A2Point(*rng.uniform([-2.0, -2.0, -1.0], [0.4, 0.4, 1.0]))
        loc = (pt.x, pt.y, pt.z)
        for w in (1, 2, 3, 4):
            try:
                reps = system_residual(w, base, pt, s.opts, SYSTEM_TOL)
            except BiaxError as exc:
                checks.append(_failed(f"system/{n}/omega{w}", loc, exc))
                continue
            checks.extend(_from_report(r, id=f"system/{n}/{r.id}") for r in reps)
    return _suite("system", checks)


def run_operator(s: SuiteSettings) -> dict:
    rng = np.random.default_rng([s.seed, 2])
    hp = s.hp
    checks = []
    for n in range(s.samples):
        x0 = _source(rng, hp.p)
        x = _offset_point(rng, x0, 0.2, 0.6)
        for i in (1, 2, 3, 4):
            cid = f"operator/{n}/q{i}"

            def one(i=i, x0=x0, x=x, cid=cid):
                u = kernel_field(KernelSpec(i), x0, hp, s.opts)
                return _from_report(helmholtz_residual(u, x, hp, s.stencil, OPERATOR_TOL, x0), id=cid)

            checks.append(_guard(cid, x, one))
        for formula, partner in ((1, hp.reflect_alpha()), (2, hp.reflect_beta())):
            cid = f"operator/{n}/constructive{formula}"

            def two(formula=formula, partner=partner, x0=x0, x=x, cid=cid):
                u = kernel_field(KernelSpec(1), x0, partner, s.opts)
                rep = constructive_residual(formula, u, x, hp, s.stencil, OPERATOR_TOL, x0)
                return _from_report(rep, id=cid)

            checks.append(_guard(cid, x, two))
    return _suite("operator", checks)


def run_coefficients(s: SuiteSettings) -> dict:
    """Printed coefficients are diagnostic: the suite needs nine of ten to
    match at every point, plus every assembled residual."""
    rng = np.random.default_rng([s.seed, 3])
    hp = s.hp
    st = StencilConfig(min(s.stencil.step, 1e-3), s.stencil.order, s.stencil.richardson_levels)
    checks, ok = [], True
    for n in range(s.samples):
        x0 = _source(rng, hp.p)
        x = _offset_point(rng, x0, 0.2, 0.6)
        try:
            reports = coefficient_consistency(x, x0, hp, st, COEFFICIENT_TOL)
        except BiaxError as exc:
            checks.append(_failed(f"coefficients/{n}", x, exc))
            ok = False
            continue
        ok = ok and sum(c.report.passed for c in reports) >= 9
        for c in reports:
            checks.append(_from_report(
                c.report, id=f"coefficients/{n}/{c.name}", printed=c.printed,
                definitional=c.definitional, sign_agrees=c.sign_agrees, diagnostic=True,
            ))
        for w in (1, 2, 3, 4):
            cid = f"coefficients/{n}/assembled/omega{w}"
            chk = _guard(cid, x, lambda w=w, x=x, x0=x0, cid=cid: _from_report(
                assembled_reduction_residual(w, x, x0, hp, st, s.opts, COEFFICIENT_TOL), id=cid))
            ok = ok and chk["pass"]
            checks.append(chk)
    return _suite("coefficients", checks, ok, rule="nine of ten printed coefficients and every assembled residual")


def run_boundary(s: SuiteSettings) -> dict:
    rng = np.random.default_rng([s.seed, 4])
    hp = s.hp
    checks = []
    for n in range(s.samples):
        x0 = _source(rng, hp.p, 0.5, 1.5)
        xt = _source(rng, hp.p, 0.5, 1.5)
        for i, axis, mode in BOUNDARY_PROPERTIES:
            cid = f"boundary/{n}/q{i}/axis{axis}/{mode}"

            def one(i=i, axis=axis, mode=mode, x0=x0, xt=xt, cid=cid):
                b = boundary_limit(KernelSpec(i), axis, mode, xt, x0, hp, s.opts, tol=BOUNDARY_TOL)
                return {
                    "id": cid, "location": _loc(xt), "residual": b.limit, "scale": b.reference,
                    "relative": b.relative, "pass": b.passed, "samples": list(b.samples),
                }

            checks.append(_guard(cid, xt, one))
    return _suite("boundary", checks)


def run_singularity(s: SuiteSettings) -> dict:
    rng = np.random.default_rng([s.seed, 5])
    hp = s.hp
    expected = -(hp.p - 2)
    x0 = np.ones(hp.p)
    checks = []
    for n in range(s.samples):
        d = rng.normal(size=hp.p)
        d /= np.linalg.norm(d)
        for i in (1, 2, 3, 4):
            cid = f"singularity/{n}/q{i}"

            def one(i=i, d=d, cid=cid):
                fit = singularity_exponent(KernelSpec(i), x0, d, s.radii, hp, s.opts)
                dev = fit.slope - expected
                return {
                    "id": cid, "location": _loc(d), "residual": dev, "scale": 1.0,
                    "relative": abs(dev), "pass": abs(dev) <= SLOPE_TOL, "slope": fit.slope,
                    "fit_rms": fit.rms_residual,
                }

            checks.append(_guard(cid, d, one))
    return _suite("singularity", checks)


RUNNERS = {
    "system": run_system,
    "operator": run_operator,
    "coefficients": run_coefficients,
    "boundary": run_boundary,
    "singularity": run_singularity,
}


def run_suites(names, s: SuiteSettings) -> list[dict]:
    names = SUITE_NAMES if "all" in names else names
    return [RUNNERS[n](s) for n in names]


def clean_floats(obj):
    """Replace non-finite floats by None so reports stay strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: clean_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean_floats(v) for v in obj]
    return obj
