"""Fundamental solutions q1..q4 of the bi-axially symmetric Helmholtz equation

    sum_i u_{x_i x_i} + (2 alpha / x1) u_{x1} + (2 beta / x2) u_{x2} - lambda^2 u = 0

in the quadrant-like domain x1 > 0, x2 > 0 of R^p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .a2 import A2Params, A2Point, a2_auto
from .errors import CoincidentPoints, DimensionMismatch, DomainError
from .series import DEFAULT_OPTIONS, EvalResult, SeriesOptions

Field = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class HelmholtzParams:
    """Operator parameters.

    ``strict`` enforces ``0 < 2 alpha, 2 beta < 1`` and integer ``p >= 3``.
    Non-strict instances carry the reflected parameters ``1 - alpha`` or
    ``1 - beta`` that appear on the other side of the constructive formulas.
    """

    alpha: float
    beta: float
    lam: float = 0.0
    p: int = 3
    strict: bool = True

    def __post_init__(self):
        if self.lam < 0 or not math.isfinite(self.lam):
            raise ValueError(f"lambda must be finite and >= 0, got {self.lam}")
        if self.strict:
            if not (0 < 2 * self.alpha < 1 and 0 < 2 * self.beta < 1):
                raise ValueError(f"need 0 < 2 alpha, 2 beta < 1, got alpha={self.alpha}, beta={self.beta}")
            if int(self.p) != self.p or self.p < 3:
                raise ValueError(f"dimension p must be an integer >= 3, got {self.p}")
        elif not (0 < self.alpha < 1 and 0 < self.beta < 1):
            raise ValueError("alpha and beta must lie in (0, 1)")

    def reflect_alpha(self) -> "HelmholtzParams":
        return replace(self, alpha=1.0 - self.alpha, strict=False)

    def reflect_beta(self) -> "HelmholtzParams":
        return replace(self, beta=1.0 - self.beta, strict=False)

    def swapped(self) -> "HelmholtzParams":
        return replace(self, alpha=self.beta, beta=self.alpha)


@dataclass(frozen=True)
class KernelSpec:
    index: int
    k: float = 1.0

    def __post_init__(self):
        if self.index not in (1, 2, 3, 4):
            raise ValueError(f"kernel index must be 1..4, got {self.index}")


@dataclass(frozen=True)
class Geometry:
    r2: float
    r1_2: float
    r2_2: float
    xi: float
    eta: float
    zeta: float
    P: float

    def a2_point(self) -> A2Point:
        return A2Point(self.xi, self.eta, self.zeta)


def as_point(x: Sequence[float], p: int | None = None, *, name: str = "x") -> np.ndarray:
    """Validate a point of the open domain x1 > 0, x2 > 0."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be a flat coordinate vector")
    if p is not None and arr.size != p:
        raise DimensionMismatch(f"{name} has {arr.size} coordinates, expected p={p}")
    if arr.size < 2:
        raise DimensionMismatch(f"{name} needs at least two coordinates")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite coordinates")
    if arr[0] <= 0 or arr[1] <= 0:
        raise DomainError(
            f"{name}={arr.tolist()} is outside the open domain x1 > 0, x2 > 0; "
            "boundary values are reached only as limits"
        )
    return arr


def geometry(x, x0, hp: HelmholtzParams) -> Geometry:
    x = as_point(x, hp.p)
    x0 = as_point(x0, hp.p, name="x0")
    d = x - x0
    r2 = float(d @ d)
    if r2 == 0.0:
        raise CoincidentPoints("field and source points coincide")
    tail1 = float(d[1:] @ d[1:])
    r1_2 = float((x[0] + x0[0]) ** 2 + tail1)
    r2_2 = float(d[0] ** 2 + (x[1] + x0[1]) ** 2 + d[2:] @ d[2:])
    xi = float(-4.0 * x[0] * x0[0] / r2)
    eta = float(-4.0 * x[1] * x0[1] / r2)
    zeta = -(hp.lam**2) * r2 / 4.0
    P = r2 ** (1.0 - hp.alpha - hp.beta - hp.p / 2.0)
    return Geometry(r2, r1_2, r2_2, xi, eta, zeta, P)


def kernel_a2_params(index: int, hp: HelmholtzParams) -> A2Params:
    al, be, h = hp.alpha, hp.beta, hp.p / 2.0
    if index == 1:
        return A2Params(al + be - 1 + h, al, be, 2 * al, 2 * be)
    if index == 2:
        return A2Params(-al + be + h, 1 - al, be, 2 - 2 * al, 2 * be)
    if index == 3:
        return A2Params(al - be + h, al, 1 - be, 2 * al, 2 - 2 * be)
    if index == 4:
        return A2Params(1 - al - be + h, 1 - al, 1 - be, 2 - 2 * al, 2 - 2 * be)
    raise ValueError(f"kernel index must be 1..4, got {index}")


def _log_prefactor(index: int, x: np.ndarray, x0: np.ndarray, g: Geometry, hp: HelmholtzParams) -> float:
    al, be, h = hp.alpha, hp.beta, hp.p / 2.0
    log_r2 = math.log(g.r2)
    log_s1 = math.log(x[0] * x0[0])
    log_s2 = math.log(x[1] * x0[1])
    if index == 1:
        return (1 - al - be - h) * log_r2
    if index == 2:
        return (al - be - h) * log_r2 + (1 - 2 * al) * log_s1
    if index == 3:
        return (-al + be - h) * log_r2 + (1 - 2 * be) * log_s2
    return (-1 + al + be - h) * log_r2 + (1 - 2 * al) * log_s1 + (1 - 2 * be) * log_s2


def q(spec: KernelSpec, x, x0, hp: HelmholtzParams, opts: SeriesOptions = DEFAULT_OPTIONS) -> EvalResult:
    """Fundamental solution ``q_index(x, x0)`` times its constant ``k``.

    The power prefactor is assembled in log space; the A2 factor goes
    through :func:`~biaxhelm.a2.a2_auto`, which switches to the integral
    route as ``x -> x0`` drives xi, eta to minus infinity.
    """
    x = as_point(x, hp.p)
    x0 = as_point(x0, hp.p, name="x0")
    g = geometry(x, x0, hp)
    res = a2_auto(kernel_a2_params(spec.index, hp), g.a2_point(), opts)
    factor = spec.k * math.exp(_log_prefactor(spec.index, x, x0, g, hp))
    return res.scaled(factor)


def kernel_field(spec: KernelSpec, x0, hp: HelmholtzParams, opts: SeriesOptions = DEFAULT_OPTIONS) -> Field:
    """``x -> q(spec, x, x0)`` as a plain float-valued field."""
    x0 = as_point(x0, hp.p, name="x0")

    def field(x) -> float:
        return q(spec, x, x0, hp, opts).value

    return field


def apply_constructive(formula: int, u: Field, hp: HelmholtzParams) -> tuple[Field, HelmholtzParams]:
    """Multiply ``u`` by ``x1^(1-2 alpha)`` (formula 1) or ``x2^(1-2 beta)`` (formula 2).

    Returns the new field and the parameters of the operator that ``u``
    must satisfy for the product to satisfy the operator with ``hp``:
    alpha -> 1 - alpha for formula 1, beta -> 1 - beta for formula 2.
    """
    if formula == 1:
        axis, expo, partner = 0, 1.0 - 2.0 * hp.alpha, hp.reflect_alpha()
    elif formula == 2:
        axis, expo, partner = 1, 1.0 - 2.0 * hp.beta, hp.reflect_beta()
    else:
        raise ValueError(f"constructive formula must be 1 or 2, got {formula}")

    def field(x) -> float:
        x = np.asarray(x, dtype=float)
        return math.exp(expo * math.log(x[axis])) * u(x)

    return field, partner
