"""Numerical checks of the differential identities behind the kernels.

Residuals are always reported relative to the sum of the absolute values of
the individual terms of the equation being checked, so a check stays
meaningful when the kernel varies over many orders of magnitude.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .a2 import A2Params, A2Point, omega_partial
from .errors import DomainError, FitDegenerate, StepTooLarge
from .fundsol import Field, HelmholtzParams, KernelSpec, as_point, geometry, kernel_a2_params, q
from .series import DEFAULT_OPTIONS, SeriesOptions

TINY = sys.float_info.min

# (kernel index, axis, mode) for the eight vanishing boundary limits
BOUNDARY_PROPERTIES: tuple[tuple[int, int, str], ...] = (
    (1, 1, "normal_derivative"),
    (2, 1, "value"),
    (4, 1, "value"),
    (1, 2, "normal_derivative"),
    (3, 2, "value"),
    (4, 2, "value"),
    (2, 2, "normal_derivative"),
    (3, 1, "normal_derivative"),
)

COEFFICIENT_NAMES = ("A1", "A2", "A3", "B1", "B2", "B3", "C1", "C2", "C3", "D")


@dataclass(frozen=True)
class StencilConfig:
    step: float = 1e-2
    order: int = 4
    richardson_levels: int = 1
    auto_shrink: bool = True

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError(f"stencil step must be positive, got {self.step}")
        if self.order not in (2, 4):
            raise ValueError(f"stencil order must be 2 or 4, got {self.order}")
        if self.richardson_levels < 0:
            raise ValueError("richardson_levels must be >= 0")


@dataclass(frozen=True)
class ResidualReport:
    residual: float
    scale: float
    relative: float
    location: tuple[float, ...]
    passed: bool
    id: str = ""

    @classmethod
    def from_terms(cls, terms: Sequence[float], location, tol: float, id: str = "") -> "ResidualReport":
        residual = math.fsum(terms)
        scale = max(math.fsum(abs(t) for t in terms), TINY)
        relative = abs(residual) / scale
        return cls(residual, scale, relative, tuple(float(v) for v in location), relative <= tol, id)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "location": list(self.location),
            "residual": self.residual,
            "scale": self.scale,
            "relative": self.relative,
            "pass": self.passed,
        }


def effective_step(st: StencilConfig, x: np.ndarray, singular_point=None) -> float:
    """Stencil step honouring the 10x margin to the axes and the singular point."""
    margin = min(float(x[0]), float(x[1]))
    if singular_point is not None:
        margin = min(margin, float(np.linalg.norm(x - np.asarray(singular_point, dtype=float))))
    limit = 0.1 * margin
    if st.step <= limit:
        return st.step
    if not st.auto_shrink:
        raise StepTooLarge(f"step {st.step} exceeds 0.1 x margin = {limit}")
    if limit <= 0:
        raise StepTooLarge("point lies on an axis or on the singular point")
    return limit


def _central(f: Callable[[np.ndarray], float], x: np.ndarray, i: int, h: float, order: int, f0: float):
    e = np.zeros_like(x)
    e[i] = h
    f1, fm1 = f(x + e), f(x - e)
    if order == 2:
        return (f1 - fm1) / (2 * h), (f1 - 2 * f0 + fm1) / (h * h)
    f2, fm2 = f(x + 2 * e), f(x - 2 * e)
    d1 = (-f2 + 8 * f1 - 8 * fm1 + fm2) / (12 * h)
    d2 = (-f2 + 16 * f1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)
    return d1, d2


def _richardson(rows: list[np.ndarray], order: int) -> np.ndarray:
    """Combine estimates at h, h/2, h/4, ... with error exponents order, order+2, ..."""
    rows = [np.asarray(r, dtype=float) for r in rows]
    expo = order
    while len(rows) > 1:
        w = 2.0**expo
        rows = [(w * rows[k + 1] - rows[k]) / (w - 1) for k in range(len(rows) - 1)]
        expo += 2
    return rows[0]


def gradient_and_second(f, x, st: StencilConfig, singular_point=None, f0: float | None = None):
    """First and pure second partial derivatives of ``f`` along every axis."""
    x = np.asarray(x, dtype=float)
    h = effective_step(st, x, singular_point)
    f0 = f(x) if f0 is None else f0
    rows = []
    for level in range(st.richardson_levels + 1):
        hl = h / 2**level
        rows.append([_central(f, x, i, hl, st.order, f0) for i in range(x.size)])
    d = _richardson([np.array(r) for r in rows], st.order)
    return d[:, 0], d[:, 1]


def helmholtz_terms(u: Field, x, hp: HelmholtzParams, st: StencilConfig, singular_point=None) -> list[float]:
    x = np.asarray(x, dtype=float)
    u0 = u(x)
    grad, second = gradient_and_second(u, x, st, singular_point, u0)
    terms = list(second)
    terms.append(2 * hp.alpha / x[0] * grad[0])
    terms.append(2 * hp.beta / x[1] * grad[1])
    terms.append(-(hp.lam**2) * u0)
    return terms


def helmholtz_residual(
    u: Field, x, hp: HelmholtzParams, st: StencilConfig = StencilConfig(),
    tol: float = 1e-4, singular_point=None, id: str = "",
) -> ResidualReport:
    """Residual of ``sum u_ii + (2a/x1) u_1 + (2b/x2) u_2 - lam^2 u`` at ``x``.

    Derivatives use central stencils of the configured order with
    ``richardson_levels`` rounds of step halving.  The step is kept below a
    tenth of the distance to the axes and to ``singular_point``.
    """
    x = as_point(x, hp.p)
    return ResidualReport.from_terms(helmholtz_terms(u, x, hp, st, singular_point), x, tol, id)


def constructive_residual(
    formula: int, u: Field, x, hp: HelmholtzParams, st: StencilConfig = StencilConfig(),
    tol: float = 1e-4, singular_point=None, id: str = "",
) -> ResidualReport:
    """Check ``H(x_k^e u) = x_k^e H'(u)`` where H' carries the reflected parameter.

    ``formula`` 1 multiplies by ``x1^(1-2 alpha)`` and reflects alpha;
    formula 2 does the same for the second axis and beta.  The residual is
    the difference of both sides, scaled by the terms of both operators.
    """
    from .fundsol import apply_constructive

    x = as_point(x, hp.p)
    v, partner = apply_constructive(formula, u, hp)
    lhs = helmholtz_terms(v, x, hp, st, singular_point)
    mult = x[0] ** (1 - 2 * hp.alpha) if formula == 1 else x[1] ** (1 - 2 * hp.beta)
    rhs = [mult * t for t in helmholtz_terms(u, x, partner, st, singular_point)]
    return ResidualReport.from_terms(lhs + [-t for t in rhs], x, tol, id)


# ---------------------------------------------------------------------------
# Hypergeometric system
# ---------------------------------------------------------------------------

_SYSTEM_ORDERS = (
    (0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1),
    (2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 1, 0), (1, 0, 1), (0, 1, 1),
)


def system_terms(p: A2Params, pt: A2Point, d: dict) -> tuple[list[float], list[float], list[float]]:
    """Terms of the three equations of the A2 system for the derivatives ``d``."""
    a, b1, b2, c1, c2 = p.a, p.b1, p.b2, p.c1, p.c2
    x, y, z = pt.x, pt.y, pt.z
    w = d[0, 0, 0]
    wx, wy, wz = d[1, 0, 0], d[0, 1, 0], d[0, 0, 1]
    wxx, wyy, wzz = d[2, 0, 0], d[0, 2, 0], d[0, 0, 2]
    wxy, wxz, wyz = d[1, 1, 0], d[1, 0, 1], d[0, 1, 1]
    e1 = [x * (1 - x) * wxx, -x * y * wxy, x * z * wxz, (c1 - (a + b1 + 1) * x) * wx,
          -b1 * y * wy, b1 * z * wz, -a * b1 * w]
    e2 = [y * (1 - y) * wyy, -x * y * wxy, y * z * wyz, (c2 - (a + b2 + 1) * y) * wy,
          -b2 * x * wx, b2 * z * wz, -a * b2 * w]
    e3 = [z * wzz, -x * wxz, -y * wyz, (1 - a) * wz, w]
    return e1, e2, e3


def system_residual(
    w: int, p: A2Params, pt: A2Point, opts: SeriesOptions = DEFAULT_OPTIONS,
    tol: float = 1e-8, abs_base: bool = True, method=None,
) -> tuple[ResidualReport, ResidualReport, ResidualReport]:
    """Residuals of the three A2 system equations for solution ``w``.

    ``w`` is 1..4 for the four independent solutions (0 is accepted as an
    alias of the plain A2 function, which is solution 1).  All derivatives
    are exact series derivatives.
    """
    idx = 1 if w == 0 else w
    cache: dict = {}
    d = {o: omega_partial(idx, p, o, pt, opts, abs_base, method, cache).value for o in _SYSTEM_ORDERS}
    loc = (pt.x, pt.y, pt.z)
    return tuple(
        ResidualReport.from_terms(t, loc, tol, f"omega{idx}/eq{n}")
        for n, t in enumerate(system_terms(p, pt, d), start=1)
    )


# ---------------------------------------------------------------------------
# Coefficients of the equation for omega after the similarity ansatz
# ---------------------------------------------------------------------------

def reduction_coefficients(x, x0, hp: HelmholtzParams) -> dict[str, float]:
    """Closed-form coefficients of the substituted equation, as printed."""
    x = as_point(x, hp.p)
    x0 = as_point(x0, hp.p, name="x0")
    g = geometry(x, x0, hp)
    al, be, lam2, h = hp.alpha, hp.beta, hp.lam**2, hp.p / 2.0
    xi, eta, zeta, P = g.xi, g.eta, g.zeta, g.P
    k1 = 4 * P / g.r2 * x0[0] / x[0]
    k2 = 4 * P / g.r2 * x0[1] / x[1]
    return {
        "A1": -k1 * xi * (1 - xi),
        "A2": -k2 * eta * (1 - eta),
        "A3": -lam2 * P * zeta,
        "B1": k1 * xi * eta + k2 * xi * eta,
        "B2": -k1 * xi * zeta + lam2 * P * xi,
        "B3": -k2 * eta * zeta + lam2 * P * eta,
        "C1": -k1 * (2 * al - (2 * al + be + h) * xi) + k2 * be * xi,
        "C2": k1 * al * eta - k2 * (2 * be - (al + 2 * be + h) * eta),
        "C3": -k1 * al * zeta - k2 * be * zeta - lam2 * P * (h - al - be),
        "D": (k1 * al + k2 * be) * (al + be - 1 + h) - lam2 * P,
    }


def definitional_terms(x, x0, hp: HelmholtzParams, st: StencilConfig = StencilConfig()) -> dict[str, list[float]]:
    """Each coefficient as its list of defining terms, with stencil derivatives
    of the maps xi, eta, zeta and P."""
    x = as_point(x, hp.p)
    x0 = as_point(x0, hp.p, name="x0")

    def comp(name):
        return lambda y: getattr(geometry(y, x0, hp), name)

    g = geometry(x, x0, hp)
    P = g.P
    d = {n: gradient_and_second(comp(n), x, st, x0, getattr(g, n)) for n in ("xi", "eta", "zeta", "P")}
    gx, lx = d["xi"]
    ge, le = d["eta"]
    gz, lz = d["zeta"]
    gp, lp = d["P"]
    al, be, lam2 = hp.alpha, hp.beta, hp.lam**2

    def first(gf, lf):
        return [*(2 * gp * gf), *(P * lf), P * 2 * al / x[0] * gf[0], P * 2 * be / x[1] * gf[1]]

    return {
        "A1": list(P * gx * gx),
        "A2": list(P * ge * ge),
        "A3": list(P * gz * gz),
        "B1": list(2 * P * gx * ge),
        "B2": list(2 * P * gx * gz),
        "B3": list(2 * P * ge * gz),
        "C1": first(gx, lx),
        "C2": first(ge, le),
        "C3": first(gz, lz),
        "D": [*lp, 2 * al / x[0] * gp[0], 2 * be / x[1] * gp[1], -lam2 * P],
    }


def definitional_coefficients(x, x0, hp: HelmholtzParams, st: StencilConfig = StencilConfig()) -> dict[str, float]:
    return {k: math.fsum(v) for k, v in definitional_terms(x, x0, hp, st).items()}


@dataclass(frozen=True)
class CoefficientReport:
    name: str
    printed: float
    definitional: float
    report: ResidualReport
    sign_agrees: bool


def coefficient_consistency(
    x, x0, hp: HelmholtzParams, st: StencilConfig = StencilConfig(), tol: float = 1e-6,
) -> list[CoefficientReport]:
    """Printed closed forms against their defining sums, one report each.

    The residual is ``printed - definitional`` scaled by ``|printed|`` plus
    the absolute defining terms.  ``sign_agrees`` records whether both
    sides have the same sign (trivially true when both vanish).
    """
    printed = reduction_coefficients(x, x0, hp)
    terms = definitional_terms(x, x0, hp, st)
    loc = as_point(x, hp.p)
    out = []
    for name in COEFFICIENT_NAMES:
        pr, tm = printed[name], terms[name]
        de = math.fsum(tm)
        rep = ResidualReport.from_terms([pr] + [-t for t in tm], loc, tol, f"coefficient/{name}")
        same = (pr > 0) == (de > 0) or (abs(pr) <= rep.scale * tol and abs(de) <= rep.scale * tol)
        out.append(CoefficientReport(name, pr, de, rep, bool(same)))
    return out


def assembled_reduction_residual(
    idx: int, x, x0, hp: HelmholtzParams, st: StencilConfig = StencilConfig(),
    opts: SeriesOptions = DEFAULT_OPTIONS, tol: float = 1e-6,
) -> ResidualReport:
    """Substituted equation with definitional coefficients applied to omega_idx.

    omega_idx is built from the parameters of the first kernel by the
    standard shifts, with ``|xi|`` and ``|eta|`` in the power prefactors.
    """
    coef = definitional_coefficients(x, x0, hp, st)
    g = geometry(x, x0, hp)
    pt = g.a2_point()
    base = kernel_a2_params(1, hp)
    cache: dict = {}
    d = {o: omega_partial(idx, base, o, pt, opts, True, None, cache).value for o in _SYSTEM_ORDERS}
    terms = [
        coef["A1"] * d[2, 0, 0], coef["A2"] * d[0, 2, 0], coef["A3"] * d[0, 0, 2],
        coef["B1"] * d[1, 1, 0], coef["B2"] * d[1, 0, 1], coef["B3"] * d[0, 1, 1],
        coef["C1"] * d[1, 0, 0], coef["C2"] * d[0, 1, 0], coef["C3"] * d[0, 0, 1],
        coef["D"] * d[0, 0, 0],
    ]
    return ResidualReport.from_terms(terms, as_point(x, hp.p), tol, f"assembled/omega{idx}")


# ---------------------------------------------------------------------------
# Singularity order and boundary behaviour
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingularityFit:
    slope: float
    intercept: float
    rms_residual: float
    radii: tuple[float, ...]
    values: tuple[float, ...]
    converged: bool

    def passed(self, p: int, tol: float = 0.02) -> bool:
        return abs(self.slope + (p - 2)) <= tol


def singularity_exponent(
    spec: KernelSpec, x0, direction, radii: Sequence[float], hp: HelmholtzParams,
    opts: SeriesOptions = DEFAULT_OPTIONS,
) -> SingularityFit:
    """Least-squares slope of ``log|q|`` against ``log r`` along a ray from ``x0``."""
    x0 = as_point(x0, hp.p, name="x0")
    d = np.asarray(direction, dtype=float)
    if d.shape != x0.shape:
        raise DomainError("direction must have one component per coordinate")
    norm = float(np.linalg.norm(d))
    if not norm > 0:
        raise DomainError("direction must be nonzero")
    d = d / norm
    rs = np.asarray(radii, dtype=float)
    limit = min(x0[0], x0[1]) / 2
    if np.any(rs <= 0) or np.any(rs > limit):
        raise DomainError(f"radii must lie in (0, {limit}]")
    lr, lv, vals, conv = [], [], [], True
    for r in rs:
        res = q(spec, x0 + r * d, x0, hp, opts)
        vals.append(res.value)
        conv = conv and res.converged
        if math.isfinite(res.value) and res.value != 0.0:
            lr.append(math.log(r))
            lv.append(math.log(abs(res.value)))
    if len(lr) < 3:
        raise FitDegenerate(f"only {len(lr)} usable evaluations; need at least 3")
    A = np.column_stack([lr, np.ones(len(lr))])
    coef, *_ = np.linalg.lstsq(A, np.asarray(lv), rcond=None)
    rms = float(np.sqrt(np.mean((A @ coef - lv) ** 2)))
    return SingularityFit(float(coef[0]), float(coef[1]), rms, tuple(rs.tolist()), tuple(vals), conv)


@dataclass(frozen=True)
class BoundaryReport:
    index: int
    axis: int
    mode: str
    axis_values: tuple[float, ...]
    samples: tuple[float, ...]
    limit: float
    reference: float
    relative: float
    passed: bool
    extrapolated: bool = field(default=True)


def aitken(s0: float, s1: float, s2: float) -> tuple[float, bool]:
    """Aitken delta-squared limit of three samples; falls back to ``s2``."""
    d1, d2 = s1 - s0, s2 - s1
    den = d2 - d1
    if den == 0.0 or not math.isfinite(den) or abs(den) <= 1e-14 * (abs(d1) + abs(d2)):
        return s2, False
    return s2 - d2 * d2 / den, True


def boundary_limit(
    spec: KernelSpec, which_axis: int, mode: str, x_template, x0, hp: HelmholtzParams,
    opts: SeriesOptions = DEFAULT_OPTIONS, axis_values: Sequence[float] = (1e-2, 1e-3, 1e-4),
    tol: float = 1e-3,
) -> BoundaryReport:
    """Limit of the kernel (or its derivative along the axis normal) at an axis.

    The probed coordinate of ``x_template`` is replaced by each of
    ``axis_values``; derivatives use a one-sided second-order stencil with
    step one tenth of the axis value.  The samples are extrapolated to zero
    with Aitken's transform and compared with ``tol * |q(x_template)|``.
    """
    if which_axis not in (1, 2):
        raise ValueError(f"axis must be 1 or 2, got {which_axis}")
    if mode not in ("value", "normal_derivative"):
        raise ValueError(f"mode must be 'value' or 'normal_derivative', got {mode!r}")
    xt = as_point(x_template, hp.p, name="x_template")
    x0 = as_point(x0, hp.p, name="x0")
    k = which_axis - 1

    def at(t: float) -> float:
        y = xt.copy()
        y[k] = t
        return q(spec, y, x0, hp, opts).value

    samples = []
    for t in axis_values:
        if mode == "value":
            samples.append(at(t))
        else:
            h = 0.1 * t
            samples.append((-3 * at(t) + 4 * at(t + h) - at(t + 2 * h)) / (2 * h))
    if len(samples) >= 3:
        limit, extrapolated = aitken(*samples[-3:])
    else:
        limit, extrapolated = samples[-1], False
    reference = abs(q(spec, xt, x0, hp, opts).value)
    relative = abs(limit) / max(reference, TINY)
    return BoundaryReport(
        spec.index, which_axis, mode, tuple(float(t) for t in axis_values), tuple(samples),
        limit, reference, relative, relative <= tol, extrapolated,
    )
