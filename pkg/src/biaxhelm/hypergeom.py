"""Scalar building blocks: Pochhammer symbol, Gauss 2F1 and Appell F2.

Everything here works in double precision.  Each series returns an
:class:`~biaxhelm.series.EvalResult` whose ``err_estimate`` covers the
truncation tail and the rounding accumulated while summing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonConvergence, PoleError
from .series import (
    DEFAULT_OPTIONS,
    EPS,
    Accumulator,
    EvalResult,
    Representation,
    SeriesOptions,
    product_error,
    tighter,
)

# c - a - b must be at least this far from an integer for the 1 - z map
INTEGER_GAP = 0.05
NEAR_UNIT = 0.9
PFAFF_BELOW = -0.5


def is_nonpositive_integer(c: float) -> bool:
    return c <= 0 and c == math.floor(c)


def pochhammer(a: float, n: int) -> float:
    """Rising factorial ``(a)_n`` for any signed integer ``n``.

    For ``n < 0`` this is ``1 / ((a-1)(a-2)...(a-|n|))``, the value of
    ``Gamma(a+n)/Gamma(a)``.  Computed as a plain product so integer-shifted
    poles are detected exactly.
    """
    n = int(n)
    if n >= 0:
        out = 1.0
        for j in range(n):
            out *= a + j
        return out
    den = 1.0
    for j in range(1, -n + 1):
        f = a - j
        if f == 0.0:
            raise PoleError(f"({a})_{n} has a pole: factor a - {j} vanishes")
        den *= f
    return 1.0 / den


def gamma_sign_log(x: float) -> tuple[float, float]:
    """Sign and log-magnitude of Gamma(x); raises PoleError at poles."""
    if is_nonpositive_integer(x):
        raise PoleError(f"Gamma pole at {x}")
    lg = math.lgamma(x)
    if x > 0:
        return 1.0, lg
    # Gamma alternates sign between consecutive negative integers
    return (-1.0 if math.floor(x) % 2 else 1.0), lg


def gamma_ratio(num: tuple[float, ...], den: tuple[float, ...]) -> float:
    """prod Gamma(num) / prod Gamma(den); zero when a denominator is at a pole."""
    if any(is_nonpositive_integer(d) for d in den):
        return 0.0
    sign, log = 1.0, 0.0
    for x in num:
        s, lg = gamma_sign_log(x)
        sign *= s
        log += lg
    for x in den:
        s, lg = gamma_sign_log(x)
        sign *= s
        log -= lg
    return sign * math.exp(log)


@dataclass(frozen=True)
class GaussParams:
    a: float
    b: float
    c: float

    def __post_init__(self):
        if is_nonpositive_integer(self.c):
            raise PoleError(f"2F1 denominator parameter c={self.c} is a nonpositive integer")


def _direct_2f1(a, b, c, z, opts: SeriesOptions, cap: int, strict: bool) -> EvalResult:
    acc = Accumulator(opts, ratio_hint=abs(z))
    term = 1.0
    acc.push(term)
    n = 0
    while not acc.stopped:
        if n + 1 >= cap:
            if strict:
                raise NonConvergence(f"2F1({a},{b};{c};{z}) not converged in {cap} terms")
            break
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        n += 1
        acc.push(term)
    return acc.result(Representation.GAUSS_DIRECT)


def _one_minus_z_2f1(a, b, c, z, opts: SeriesOptions) -> EvalResult:
    """Connection formula around z = 1; needs c - a - b off the integers."""
    s = c - a - b
    w = 1.0 - z
    f1 = _hyp2f1(a, b, 1.0 - s, w, opts)
    f2 = _hyp2f1(c - a, c - b, 1.0 + s, w, opts)
    g1 = gamma_ratio((c, s), (c - a, c - b))
    g2 = gamma_ratio((c, -s), (a, b))
    pw = w**s
    value = g1 * f1.value + g2 * pw * f2.value
    err = abs(g1) * f1.err_estimate + abs(g2 * pw) * f2.err_estimate
    err += 4 * EPS * (abs(g1 * f1.value) + abs(g2 * pw * f2.value))
    ok = f1.converged and f2.converged and err <= opts.rel_tol * max(abs(value), 1.0)
    return EvalResult(value, err, f1.terms_used + f2.terms_used, Representation.GAUSS_ONE_MINUS_Z, ok)


def _reciprocal_2f1(a, b, c, z, opts: SeriesOptions) -> EvalResult:
    """Connection formula in ``1/(1 - z)`` for ``z`` far below zero; needs
    ``a - b`` off the integers.  Avoids forming ``1 - z/(z - 1)``, which
    loses digits when the Pfaff image is close to one."""
    u = 1.0 / (1.0 - z)
    f1 = _hyp2f1(a, c - b, a - b + 1.0, u, opts)
    f2 = _hyp2f1(b, c - a, b - a + 1.0, u, opts)
    g1 = gamma_ratio((c, b - a), (b, c - a)) * u**a
    g2 = gamma_ratio((c, a - b), (a, c - b)) * u**b
    value = g1 * f1.value + g2 * f2.value
    err = abs(g1) * f1.err_estimate + abs(g2) * f2.err_estimate
    err += 4 * EPS * (abs(g1 * f1.value) + abs(g2 * f2.value))
    ok = f1.converged and f2.converged and err <= opts.rel_tol * max(abs(value), 1.0)
    return EvalResult(value, err, f1.terms_used + f2.terms_used, Representation.GAUSS_RECIPROCAL, ok)


def _hyp2f1(a: float, b: float, c: float, z: float, opts: SeriesOptions = DEFAULT_OPTIONS) -> EvalResult:
    if is_nonpositive_integer(c):
        raise PoleError(f"2F1 denominator parameter c={c} is a nonpositive integer")
    if not math.isfinite(z):
        raise DomainError(f"2F1 argument must be finite, got {z}")
    if z >= 1.0:
        raise DomainError(f"2F1 argument {z} >= 1 is outside the supported region")
    if z == 0.0 or a == 0.0 or b == 0.0:
        return EvalResult(1.0, 0.0, 1, Representation.TRIVIAL, True)
    if is_nonpositive_integer(a) or is_nonpositive_integer(b):
        # terminating polynomial: exact direct sum for any z
        return _direct_2f1(a, b, c, z, opts, opts.max_terms_per_index, True)
    if 1.0 / (1.0 - z) <= 1.0 - NEAR_UNIT and abs((a - b) - round(a - b)) >= INTEGER_GAP:
        return _reciprocal_2f1(a, b, c, z, opts)
    if z < PFAFF_BELOW:
        # F(a,b;c;z) = (1-z)^(-b) F(c-a,b;c;z/(z-1)) maps z < -1/2 into (1/3, 1)
        inner = _hyp2f1(c - a, b, c, z / (z - 1.0), opts)
        res = inner.scaled((1.0 - z) ** (-b))
        return EvalResult(res.value, res.err_estimate, res.terms_used, Representation.GAUSS_PFAFF, res.converged)
    if z >= NEAR_UNIT:
        s = c - a - b
        if abs(s - round(s)) >= INTEGER_GAP:
            return _one_minus_z_2f1(a, b, c, z, opts)
        # integer gap: raised cap, converged flag reports the outcome
        return _direct_2f1(a, b, c, z, opts, 10 * opts.max_terms_per_index, False)
    return _direct_2f1(a, b, c, z, opts, opts.max_terms_per_index, True)


def gauss_2f1(p: GaussParams, z: float, opts: SeriesOptions = DEFAULT_OPTIONS) -> EvalResult:
    """Gauss hypergeometric function ``2F1(a, b; c; z)`` for real ``z < 1``.

    ``|z| < 0.9`` uses the defining series; ``0.9 <= z < 1`` uses the
    connection formula in ``1 - z`` unless ``c - a - b`` is within 0.05 of an
    integer, in which case the direct series is run with a raised cap and
    ``converged`` reports whether the tolerance was met.  Arguments below
    ``-9`` use the connection formula in ``1/(1 - z)`` when ``a - b`` is off
    the integers; other arguments below ``-1/2`` are first mapped by the
    Pfaff transformation.
    """
    return _hyp2f1(p.a, p.b, p.c, z, opts)


def _check_f2_domain(x: float, y: float) -> None:
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DomainError("F2 arguments must be finite")
    if abs(x) + abs(y) >= 1.0:
        raise DomainError(f"|x| + |y| = {abs(x) + abs(y)} must be < 1")


def _check_c(*cs: float) -> None:
    for c in cs:
        if is_nonpositive_integer(c):
            raise PoleError(f"denominator parameter {c} is a nonpositive integer")


class _Coefficients:
    """Lazily extended sequence ``(b)_m x^m / ((c)_m m!)``."""

    def __init__(self, b: float, c: float, x: float):
        self.b, self.c, self.x = b, c, x
        self.vals = [1.0]

    def upto(self, n: int) -> np.ndarray:
        v = self.vals
        while len(v) <= n:
            m = len(v) - 1
            v.append(v[-1] * (self.b + m) / ((self.c + m) * (m + 1)) * self.x)
        return np.asarray(v[: n + 1])


def appell_f2_direct(
    a: float, b1: float, b2: float, c1: float, c2: float, x: float, y: float,
    opts: SeriesOptions = DEFAULT_OPTIONS,
) -> EvalResult:
    """Appell F2 by its double series, summed in blocks of total degree."""
    _check_c(c1, c2)
    _check_f2_domain(x, y)
    if x == 0.0 and y == 0.0:
        return EvalResult(1.0, 0.0, 1, Representation.TRIVIAL, True)
    xs = _Coefficients(b1, c1, x)
    ys = _Coefficients(b2, c2, y)
    acc = Accumulator(opts, ratio_hint=abs(x) + abs(y))
    poch = 1.0
    terms = 0
    for deg in range(opts.max_terms_per_index):
        if deg:
            poch *= a + deg - 1
        xm = xs.upto(deg)
        yn = ys.upto(deg)[::-1]
        prod = xm * yn
        terms += deg + 1
        if acc.push(poch * float(prod.sum()), abs(poch) * float(np.abs(prod).sum())):
            return acc.result(Representation.F2_DIRECT, terms)
    raise NonConvergence(f"F2 direct series not converged after degree {opts.max_terms_per_index}")


def appell_f2_expanded(
    a: float, b1: float, b2: float, c1: float, c2: float, x: float, y: float,
    opts: SeriesOptions = DEFAULT_OPTIONS,
) -> EvalResult:
    """Appell F2 as a single series of products of two Gauss functions."""
    inner_opts = tighter(opts)
    _check_c(c1, c2)
    _check_f2_domain(x, y)
    acc = Accumulator(opts, ratio_hint=abs(x * y))
    weight = 1.0
    xy = x * y
    terms = 0
    for i in range(opts.max_terms_per_index):
        if i:
            weight *= (a + i - 1) * (b1 + i - 1) * (b2 + i - 1) / ((c1 + i - 1) * (c2 + i - 1) * i) * xy
        if weight == 0.0:
            acc.push(0.0)
        else:
            fx = _hyp2f1(a + i, b1 + i, c1 + i, x, inner_opts)
            fy = _hyp2f1(a + i, b2 + i, c2 + i, y, inner_opts)
            terms += fx.terms_used + fy.terms_used
            acc.push(weight * fx.value * fy.value, err=abs(weight) * product_error(fx, fy))
        if acc.stopped:
            return acc.result(Representation.F2_EXPANDED, terms)
    raise NonConvergence(f"F2 expansion not converged after {opts.max_terms_per_index} terms")
