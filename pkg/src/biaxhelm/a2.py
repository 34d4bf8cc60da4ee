"""The confluent hypergeometric function A2 of three variables.

    A2(a; b1, b2; c1, c2; x, y, z)
        = sum_{m,n,k} (a)_{m+n-k} (b1)_m (b2)_n / ((c1)_m (c2)_n m! n! k!) x^m y^n z^k

Five evaluation routes share one signature ``f(params, point, opts)``:

``a2_direct``       the triple series, |x| + |y| < 1
``a2_via_f2``       series in z over Appell F2 with shifted first parameter
``a2_expanded``     double series over products of Gauss functions of x and y
``a2_regularized``  the same after a Pfaff map of both Gauss factors; reaches
                    any x, y < 1
``a2_integral``     double Euler integral, for c_i > b_i > 0 and x, y <= 0 of
                    any size (the route used near the singular point of the
                    fundamental solutions)

``a2_auto`` picks one of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import DomainError, NonConvergence, PoleError
from .hypergeom import (
    _Coefficients,
    _hyp2f1,
    appell_f2_direct,
    gamma_ratio,
    is_nonpositive_integer,
    pochhammer,
)
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

AUTO_DIRECT_LIMIT = 0.7
AUTO_INTEGRAL_LIMIT = 12.0
# regularized series loses roughly exp(2 sqrt(|z|(1-x)(1-y))) to cancellation
AUTO_CANCELLATION_LIMIT = 4.0


@dataclass(frozen=True)
class A2Params:
    a: float
    b1: float
    b2: float
    c1: float
    c2: float

    def __post_init__(self):
        for name in ("c1", "c2"):
            if is_nonpositive_integer(getattr(self, name)):
                raise PoleError(f"{name}={getattr(self, name)} must not be 0, -1, -2, ...")

    def swapped(self) -> "A2Params":
        return A2Params(self.a, self.b2, self.b1, self.c2, self.c1)

    def shifted(self, i: int, j: int, k: int) -> "A2Params":
        return A2Params(self.a + i + j - k, self.b1 + i, self.b2 + j, self.c1 + i, self.c2 + j)


@dataclass(frozen=True)
class A2Point:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise DomainError(f"A2 point must be finite, got {self}")


Evaluator = Callable[[A2Params, A2Point, SeriesOptions], EvalResult]


def _is_positive_integer(a: float) -> bool:
    return a > 0 and a == math.floor(a)


def _check_negative_index(p: A2Params, z: float) -> None:
    # (a)_{-j} = 1/((a-1)...(a-j)) is reached for every j once z != 0
    if z != 0.0 and _is_positive_integer(p.a):
        raise PoleError(f"a={p.a} is a positive integer: (a)_(n-k) has poles for k > n + a - 1")


def _result(acc: Accumulator, rep: Representation, terms: int) -> EvalResult:
    return acc.result(rep, terms)


def a2_direct(p: A2Params, pt: A2Point, opts: SeriesOptions = DEFAULT_OPTIONS) -> EvalResult:
    """Triple series summed in blocks of equal total degree m + n + k."""
    x, y, z = pt.x, pt.y, pt.z
    if abs(x) + abs(y) >= 1.0:
        raise DomainError(f"a2_direct needs |x| + |y| < 1, got {abs(x) + abs(y)}")
    _check_negative_index(p, z)
    if x == 0.0 and y == 0.0 and z == 0.0:
        return EvalResult(1.0, 0.0, 1, Representation.TRIVIAL, True)

    xs = _Coefficients(p.b1, p.c1, x)
    ys = _Coefficients(p.b2, p.c2, y)
    cap = opts.max_terms_per_index
    conv, conv_abs = [], []  # sum over m+n=N of x-part * y-part
    zk = [1.0]
    # (a)_s for s >= 0 and (a)_{-s}, grown one degree at a time
    pos, neg = [1.0], [1.0]
    acc = Accumulator(opts, ratio_hint=abs(x) + abs(y))
    terms = 0
    for deg in range(cap):
        xm = xs.upto(deg)
        yn = ys.upto(deg)[::-1]
        prod = xm * yn
        conv.append(float(prod.sum()))
        conv_abs.append(float(np.abs(prod).sum()))
        if z == 0.0:
            pd = pochhammer(p.a, deg)
            block, mag = pd * conv[deg], abs(pd) * conv_abs[deg]
            terms += deg + 1
        else:
            if deg:
                zk.append(zk[-1] * z / deg)
                pos.append(pos[-1] * (p.a + deg - 1))
                neg.append(neg[-1] / (p.a - deg))
            signed = np.asarray(neg[:0:-1] + pos)  # (a)_s for s = -deg..deg
            pn = signed[2 * np.arange(deg + 1)]
            zpart = np.asarray(zk[::-1])  # z^(deg-N)/(deg-N)!
            w = pn * zpart
            block = float(np.dot(w, conv))
            mag = float(np.dot(np.abs(w), conv_abs))
            terms += (deg + 1) * (deg + 2) // 2
        if acc.push(block, mag):
            return _result(acc, Representation.DIRECT, terms)
    raise NonConvergence(f"A2 direct series not converged by total degree {cap}")


def a2_derivative(
    p: A2Params, orders: tuple[int, int, int], pt: A2Point,
    opts: SeriesOptions = DEFAULT_OPTIONS, method: Evaluator | None = None,
) -> EvalResult:
    """Partial derivative of order ``(i, j, k)`` in ``(x, y, z)``.

    Differentiation only shifts parameters:
    ``(a)_{i+j-k} (b1)_i (b2)_j / ((c1)_i (c2)_j) * A2(a+i+j-k; b1+i, b2+j; c1+i, c2+j)``.
    """
    i, j, k = (int(o) for o in orders)
    if min(i, j, k) < 0:
        raise ValueError(f"derivative orders must be nonnegative, got {orders}")
    method = method or a2_auto
    if i == j == k == 0:
        return method(p, pt, opts)
    pre = pochhammer(p.a, i + j - k) * pochhammer(p.b1, i) * pochhammer(p.b2, j)
    pre /= pochhammer(p.c1, i) * pochhammer(p.c2, j)
    res = method(p.shifted(i, j, k), pt, opts)
    return res.scaled(pre)


def a2_via_f2(p: A2Params, pt: A2Point, opts: SeriesOptions = DEFAULT_OPTIONS) -> EvalResult:
    """Series in ``z`` whose coefficients are Appell F2(a - k; ...; x, y)."""
    inner_opts = tighter(opts)
    x, y, z = pt.x, pt.y, pt.z
    if abs(x) + abs(y) >= 1.0:
        raise DomainError(f"a2_via_f2 needs |x| + |y| < 1, got {abs(x) + abs(y)}")
    if z == 0.0:
        f = appell_f2_direct(p.a, p.b1, p.b2, p.c1, p.c2, x, y, opts)
        return replace(f, representation=Representation.VIA_F2)
    if _is_positive_integer(p.a):
        raise PoleError(f"(1-a)_k vanishes for a={p.a}")
    acc = Accumulator(opts)
    coef = 1.0
    terms = 0
    for k in range(opts.max_terms_per_index):
        if k:
            coef *= -z / ((1.0 - p.a + k - 1) * k)
        f = appell_f2_direct(p.a - k, p.b1, p.b2, p.c1, p.c2, x, y, inner_opts)
        terms += f.terms_used
        if acc.push(coef * f.value, err=abs(coef) * f.err_estimate):
            return _result(acc, Representation.VIA_F2, terms)
    raise NonConvergence("A2 series over F2 not converged")


def a2_expanded(p: A2Params, pt: A2Point, opts: SeriesOptions = DEFAULT_OPTIONS) -> EvalResult:
    """Double series in ``(xy)^i z^j`` over products of Gauss functions of x and y."""
    inner_opts = tighter(opts)
    x, y, z = pt.x, pt.y, pt.z
    if abs(x) + abs(y) >= 1.0:
        raise DomainError(f"a2_expanded needs |x| + |y| < 1, got {abs(x) + abs(y)}")
    _check_negative_index(p, z)
    xy = x * y
    cap = opts.max_terms_per_index
    hint = abs(xy) / (min(1.0, 1.0 - x) * min(1.0, 1.0 - y))
    acc = Accumulator(opts, ratio_hint=hint)
    wi = [1.0]  # (b1)_i (b2)_i (xy)^i / ((c1)_i (c2)_i i!)
    zj = [1.0]  # z^j / j!
    terms = 0
    for deg in range(cap):
        if deg:
            i = deg - 1
            wi.append(wi[-1] * (p.b1 + i) * (p.b2 + i) / ((p.c1 + i) * (p.c2 + i) * deg) * xy)
            zj.append(zj[-1] * z / deg)
        block = Accumulator(opts)
        for i in range(deg + 1):
            j = deg - i
            w = wi[i] * zj[j]
            if w == 0.0:
                continue
            w *= pochhammer(p.a, i - j)
            fx = _hyp2f1(p.a + i - j, p.b1 + i, p.c1 + i, x, inner_opts)
            fy = _hyp2f1(p.a + i - j, p.b2 + i, p.c2 + i, y, inner_opts)
            terms += fx.terms_used + fy.terms_used
            block.push(w * fx.value * fy.value, err=abs(w) * product_error(fx, fy))
        if acc.push(block.value, block.abs_total, err=block.inner_err):
            return _result(acc, Representation.EXPANDED, terms)
    raise NonConvergence("A2 Gauss-product expansion not converged")


def a2_regularized(p: A2Params, pt: A2Point, opts: SeriesOptions = DEFAULT_OPTIONS) -> EvalResult:
    """Gauss-product expansion after the Pfaff map of both factors.

    Valid for every ``x, y < 1``.  The outer series runs in
    ``(x/(1-x))^i (y/(1-y))^i`` and the inner Gauss functions take
    ``x/(x-1)`` and ``y/(y-1)``; for large negative x, y both tend to 1 and
    the outer ratio tends to 1, so cost grows like ``|x| + |y|``.
    """
    inner_opts = tighter(opts)
    x, y, z = pt.x, pt.y, pt.z
    if x >= 1.0 or y >= 1.0:
        raise DomainError(f"a2_regularized needs x < 1 and y < 1, got ({x}, {y})")
    _check_negative_index(p, z)
    if x == 0.0 and y == 0.0 and z == 0.0:
        return EvalResult(1.0, 0.0, 1, Representation.TRIVIAL, True)
    log_pre = -p.b1 * math.log1p(-x) - p.b2 * math.log1p(-y)
    big_x, big_y = x / (1.0 - x), y / (1.0 - y)
    wx, wy = x / (x - 1.0), y / (y - 1.0)
    xy = big_x * big_y
    cap = opts.max_terms_per_index
    outer = Accumulator(opts, ratio_hint=abs(xy))
    weight = 1.0  # (a)_i (b1)_i (b2)_i (XY)^i / ((c1)_i (c2)_i i!)
    terms = 0
    for i in range(cap):
        if i:
            m = i - 1
            weight *= (p.a + m) * (p.b1 + m) * (p.b2 + m) / ((p.c1 + m) * (p.c2 + m) * i) * xy
        inner = Accumulator(opts)
        if weight != 0.0:
            pj = 1.0  # (a)_{i-j} / (a)_i
            zj = 1.0
            for j in range(cap):
                if j:
                    pj /= p.a + i - j
                    zj *= z / j
                w = weight * pj * zj
                if w == 0.0:
                    inner.push(0.0)
                else:
                    fx = _hyp2f1(p.c1 - p.a + j, p.b1 + i, p.c1 + i, wx, inner_opts)
                    fy = _hyp2f1(p.c2 - p.a + j, p.b2 + i, p.c2 + i, wy, inner_opts)
                    terms += fx.terms_used + fy.terms_used
                    inner.push(w * fx.value * fy.value, err=abs(w) * product_error(fx, fy))
                if inner.stopped or z == 0.0:
                    break
            else:
                raise NonConvergence("inner z-series of the regularized expansion not converged")
        else:
            inner.push(0.0)
        # with z = 0 the inner series is the single j = 0 term, exact up to rounding
        inner_err = inner.inner_err if z == 0.0 else inner.err_estimate()
        if outer.push(inner.value, inner.abs_total, err=inner_err):
            res = _result(outer, Representation.REGULARIZED, terms)
            return res.scaled(math.exp(log_pre))
    raise NonConvergence(
        f"regularized expansion not converged in {cap} terms (outer ratio {xy:.6g})"
    )


def _hyp0f1(c: float, w: np.ndarray) -> np.ndarray:
    """Vectorised 0F1(; c; w) by its (entire) series."""
    if not np.any(w):
        return np.ones_like(w)
    if is_nonpositive_integer(c):
        raise PoleError(f"0F1 parameter {c} is a nonpositive integer")
    total = np.ones_like(w)
    term = np.ones_like(w)
    for k in range(2000):
        term = term * w / ((c + k) * (k + 1))
        total = total + term
        if k > 2 and np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            return total
    raise NonConvergence("0F1 series not converged")


def _de_nodes(b: float, d: float, scale: float, h: float):
    """Double-exponential nodes on (0, 1) centred at u = 1/(1 + scale).

    Returns u, log u, log(1-u) and the log of ``du/dt * u^(b-1) (1-u)^(d-1)``.
    """
    ln_k = math.log(scale)
    margin = 47.0
    t_lo = math.asinh((margin / b + ln_k) / math.pi) + 0.5
    t_hi = math.asinh((margin / d + ln_k) / math.pi) + 0.5
    t = np.arange(-math.ceil(t_lo / h), math.ceil(t_hi / h) + 1) * h
    sig = math.pi * np.sinh(t) - ln_k
    log_u = -np.logaddexp(0.0, -sig)
    log_1mu = -np.logaddexp(0.0, sig)
    log_w = math.log(h * math.pi) + np.log(np.cosh(t)) + b * log_u + d * log_1mu
    return np.exp(log_u), log_w


def a2_integral(p: A2Params, pt: A2Point, opts: SeriesOptions = DEFAULT_OPTIONS) -> EvalResult:
    """Double Euler integral over the unit square.

    With ``B(b, c) = Gamma(c) / (Gamma(b) Gamma(c - b))`` and ``S = 1 - x u - y v``,

        A2 = B1 B2 int u^(b1-1) (1-u)^(c1-b1-1) v^(b2-1) (1-v)^(c2-b2-1)
                 S^(-a) 0F1(; 1-a; -z S) du dv,

    which follows from summing the m, n series under Euler's beta integral
    for ``(b)_m/(c)_m``.  Needs ``c_i > b_i > 0`` and ``S > 0`` on the
    square; the singular point of the fundamental solutions lies at
    x, y -> -inf, where this is the only route with bounded cost.
    Evaluated by tanh-sinh quadrature with the node cluster shifted to the
    scale ``u ~ 1/|x|`` and step halving until two levels agree.
    """
    x, y, z = pt.x, pt.y, pt.z
    if not integral_applicable(p, pt):
        raise DomainError(
            f"a2_integral needs c_i > b_i > 0 and 1 - max(x,0) - max(y,0) > 0; got {p}, {pt}"
        )
    if z != 0.0 and is_nonpositive_integer(1.0 - p.a):
        raise PoleError(f"a={p.a} is a positive integer: 0F1(; 1-a; .) has a pole")
    norm = gamma_ratio((p.c1,), (p.b1, p.c1 - p.b1)) * gamma_ratio((p.c2,), (p.b2, p.c2 - p.b2))
    su = max(1.0, -x)
    sv = max(1.0, -y)
    prev = None
    h = 0.5
    total_nodes = 0
    while h >= 1.0 / 256:
        u, lwu = _de_nodes(p.b1, p.c1 - p.b1, su, h)
        v, lwv = _de_nodes(p.b2, p.c2 - p.b2, sv, h)
        keep_u = lwu > lwu.max() - 80.0
        keep_v = lwv > lwv.max() - 80.0
        u, lwu, v, lwv = u[keep_u], lwu[keep_u], v[keep_v], lwv[keep_v]
        total_nodes += u.size * v.size
        s = 1.0 - x * u[:, None] - y * v[None, :]
        g = np.exp(-p.a * np.log(s)) * _hyp0f1(1.0 - p.a, -z * s)
        wu, wv = np.exp(lwu), np.exp(lwv)
        contrib = wu @ g @ wv
        mag = wu @ np.abs(g) @ wv
        value = norm * contrib
        if prev is not None:
            diff = abs(value - prev)
            rounding = 8.0 * EPS * abs(norm) * mag
            if diff <= opts.rel_tol * abs(value) or diff <= rounding:
                err = diff + rounding
                ok = err <= opts.rel_tol * max(abs(value), 1.0) or diff <= rounding
                return EvalResult(float(value), float(err), total_nodes, Representation.INTEGRAL, bool(ok))
        prev = value
        h /= 2
    raise NonConvergence(f"A2 integral did not settle at step {2 * h}")


def integral_applicable(p: A2Params, pt: A2Point) -> bool:
    return (
        p.b1 > 0 and p.c1 - p.b1 > 0 and p.b2 > 0 and p.c2 - p.b2 > 0
        and pt.x < 1.0 and pt.y < 1.0
        and 1.0 - max(pt.x, 0.0) - max(pt.y, 0.0) > 0.0
    )


def auto_choice(p: A2Params, pt: A2Point) -> Representation:
    """The representation ``a2_auto`` will use at this point."""
    total = abs(pt.x) + abs(pt.y)
    if total <= AUTO_DIRECT_LIMIT:
        return Representation.DIRECT
    if pt.x <= 0.0 and pt.y <= 0.0 and integral_applicable(p, pt):
        cancel = abs(pt.z) * (1.0 - pt.x) * (1.0 - pt.y)
        if total > AUTO_INTEGRAL_LIMIT or cancel > AUTO_CANCELLATION_LIMIT:
            return Representation.INTEGRAL
    return Representation.REGULARIZED


_ROUTES: dict[Representation, Evaluator] = {}


def a2_auto(p: A2Params, pt: A2Point, opts: SeriesOptions = DEFAULT_OPTIONS) -> EvalResult:
    """Evaluate A2 by the cheapest reliable representation.

    Direct series for ``|x| + |y| <= 0.7``; otherwise the regularized
    expansion, except for x, y <= 0 far from the origin (or with a large
    ``z`` coupling) where the Euler integral takes over when its parameter
    conditions hold.
    """
    if pt.x >= 1.0 or pt.y >= 1.0:
        raise DomainError(f"a2_auto needs x < 1 and y < 1, got ({pt.x}, {pt.y})")
    return _ROUTES[auto_choice(p, pt)](p, pt, opts)


_ROUTES.update({
    Representation.DIRECT: a2_direct,
    Representation.REGULARIZED: a2_regularized,
    Representation.INTEGRAL: a2_integral,
})


# ---------------------------------------------------------------------------
# The four solutions of the hypergeometric system
# ---------------------------------------------------------------------------

def omega_parameters(idx: int, p: A2Params) -> tuple[A2Params, float, float]:
    """Shifted parameters and the x, y exponents of solution ``idx``."""
    a, b1, b2, c1, c2 = p.a, p.b1, p.b2, p.c1, p.c2
    if idx == 1:
        return p, 0.0, 0.0
    if idx == 2:
        return A2Params(a + 1 - c1, b1 + 1 - c1, b2, 2 - c1, c2), 1 - c1, 0.0
    if idx == 3:
        return A2Params(a + 1 - c2, b1, b2 + 1 - c2, c1, 2 - c2), 0.0, 1 - c2
    if idx == 4:
        return A2Params(a + 2 - c1 - c2, b1 + 1 - c1, b2 + 1 - c2, 2 - c1, 2 - c2), 1 - c1, 1 - c2
    raise ValueError(f"solution index must be 1..4, got {idx}")


def _power_derivatives(base: float, expo: float, n: int, abs_base: bool) -> list[float]:
    """d^r/dt^r of t^expo at t = base for r = 0..n (``|t|^expo`` if abs_base)."""
    if expo == 0.0:
        return [1.0] + [0.0] * n
    if base == 0.0:
        if n == 0 and expo > 0:
            return [0.0]
        raise DomainError("power prefactor is not differentiable at a zero base")
    if base < 0 and not abs_base and expo != math.floor(expo):
        raise DomainError(
            f"base {base} < 0 with non-integer exponent {expo}; pass abs_base=True to use |base|"
        )
    # log space keeps tiny bases from underflowing before the product
    mag = math.exp(expo * math.log(abs(base)))
    if base < 0 and not abs_base and int(expo) % 2:
        mag = -mag
    out = [mag]
    falling = 1.0
    for r in range(1, n + 1):
        falling *= expo - r + 1
        out.append(falling * mag / base**r)
    return out


def omega_partial(
    idx: int, p: A2Params, orders: tuple[int, int, int], pt: A2Point,
    opts: SeriesOptions = DEFAULT_OPTIONS, abs_base: bool = False,
    method: Evaluator | None = None, cache: dict | None = None,
) -> EvalResult:
    """Partial derivative of solution ``omega_idx`` by the Leibniz rule."""
    q, tau, nu = omega_parameters(idx, p)
    i, j, k = orders
    dx = _power_derivatives(pt.x, tau, i, abs_base)
    dy = _power_derivatives(pt.y, nu, j, abs_base)
    cache = {} if cache is None else cache
    value, err, terms, conv, rep = 0.0, 0.0, 0, True, Representation.TRIVIAL
    for i2 in range(i + 1):
        for j2 in range(j + 1):
            c = math.comb(i, i2) * math.comb(j, j2) * dx[i - i2] * dy[j - j2]
            if c == 0.0:
                continue
            key = (i2, j2, k)
            if key not in cache:
                cache[key] = a2_derivative(q, key, pt, opts, method)
            r = cache[key]
            value += c * r.value
            err += abs(c) * r.err_estimate + 2 * EPS * abs(c * r.value)
            terms += r.terms_used
            conv = conv and r.converged
            rep = r.representation
    return EvalResult(value, err, terms, rep, conv)


def omega(
    idx: int, p: A2Params, pt: A2Point, opts: SeriesOptions = DEFAULT_OPTIONS,
    abs_base: bool = False, method: Evaluator | None = None,
) -> EvalResult:
    """Solution ``idx`` (1..4) of the A2 hypergeometric system.

    ``omega_2 = x^(1-c1) A2(a+1-c1; b1+1-c1, b2; 2-c1, c2; x, y, z)`` and
    analogously for 3 (in y) and 4 (both).  A negative base with a
    non-integer exponent is rejected unless ``abs_base`` is set, which uses
    ``|x|^(1-c1)``; that differs from the principal branch by a constant
    factor and so still solves the system.
    """
    return omega_partial(idx, p, (0, 0, 0), pt, opts, abs_base, method)
