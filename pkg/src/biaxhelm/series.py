"""Truncation control and result records for all series evaluations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import NonConvergence

EPS = 2.220446049250313e-16


class Representation(str, Enum):
    """Which formula produced an :class:`EvalResult`."""

    TRIVIAL = "trivial"
    GAUSS_DIRECT = "gauss_direct"
    GAUSS_ONE_MINUS_Z = "gauss_one_minus_z"
    GAUSS_PFAFF = "gauss_pfaff"
    GAUSS_RECIPROCAL = "gauss_reciprocal"
    F2_DIRECT = "f2_direct"
    F2_EXPANDED = "f2_expanded"
    DIRECT = "direct"
    VIA_F2 = "via_f2"
    EXPANDED = "expanded"
    REGULARIZED = "regularized"
    INTEGRAL = "integral"


@dataclass(frozen=True)
class SeriesOptions:
    """Stopping rule shared by every series in the package.

    A series stops once ``stagnation_window`` consecutive terms (or blocks of
    terms of equal total degree) are each no larger than
    ``rel_tol / stagnation_window`` times the running partial sum, and the
    geometric tail extrapolated from their decay ratio is below the same
    bound.
    """

    rel_tol: float = 1e-12
    max_terms_per_index: int = 4000
    stagnation_window: int = 3

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1.0):
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.max_terms_per_index < 1:
            raise ValueError("max_terms_per_index must be >= 1")
        if self.stagnation_window < 1:
            raise ValueError("stagnation_window must be >= 1")


DEFAULT_OPTIONS = SeriesOptions()


def tighter(opts: SeriesOptions, factor: float = 10.0) -> SeriesOptions:
    """Options for series nested inside another one."""
    return SeriesOptions(max(opts.rel_tol / factor, 1e-15), opts.max_terms_per_index, opts.stagnation_window)


@dataclass(frozen=True)
class EvalResult:
    value: float
    err_estimate: float
    terms_used: int
    representation: Representation
    converged: bool

    def __float__(self) -> float:
        return float(self.value)

    def scaled(self, factor: float) -> "EvalResult":
        return EvalResult(
            self.value * factor,
            self.err_estimate * abs(factor),
            self.terms_used,
            self.representation,
            self.converged,
        )


@dataclass
class Accumulator:
    """Running sum with the stagnation stopping rule and error bookkeeping.

    ``push`` takes the signed contribution of one term (or block) together
    with the sum of absolute values of everything that went into it, and
    returns True once the series may stop.  ``inner_err`` collects absolute
    error already carried by the pushed contributions (e.g. from nested
    series).
    """

    opts: SeriesOptions
    total: float = 0.0
    comp: float = 0.0
    abs_total: float = 0.0
    weighted_abs: float = 0.0
    inner_err: float = 0.0
    count: int = 0
    window: list = field(default_factory=list)
    stopped: bool = False
    # known asymptotic term ratio of the series, when the caller has one
    ratio_hint: float = 0.0

    def push(self, value: float, magnitude: float | None = None, err: float = 0.0) -> bool:
        if magnitude is None:
            magnitude = abs(value)
        if not math.isfinite(value):
            raise NonConvergence("series term overflowed")
        # Neumaier compensated summation
        t = self.total + value
        if abs(self.total) >= abs(value):
            self.comp += (self.total - t) + value
        else:
            self.comp += (value - t) + self.total
        self.total = t
        self.abs_total += magnitude
        # term recurrences lose about one ulp per step
        self.weighted_abs += magnitude * self.count
        self.inner_err += err
        self.count += 1
        self.window.append(magnitude)
        w = self.opts.stagnation_window
        if len(self.window) > w:
            self.window.pop(0)
        if len(self.window) == w:
            bound = self.opts.rel_tol / w * abs(self.total + self.comp)
            if all(t <= bound for t in self.window) and self.tail() <= bound:
                self.stopped = True
        return self.stopped

    def tail(self) -> float:
        """Geometric bound on the omitted tail from the window's decay ratio."""
        win = self.window
        last = win[-1]
        if last == 0.0:
            return 0.0
        ratios = [b / a if a > 0 else math.inf for a, b in zip(win, win[1:])]
        rho = max(max(ratios, default=0.0), self.ratio_hint)
        if rho >= 1.0:
            return math.inf
        return last * rho / (1.0 - rho)

    @property
    def truncation(self) -> float:
        tail = self.tail() if self.window else 0.0
        return float(max(sum(self.window), tail if math.isfinite(tail) else sum(self.window)))

    @property
    def value(self) -> float:
        return self.total + self.comp

    def err_estimate(self) -> float:
        # truncation from the last window plus accumulated rounding
        return self.truncation + self.inner_err + EPS * (2.0 * self.abs_total + self.weighted_abs)

    def result(self, representation: Representation, terms_used: int | None = None) -> EvalResult:
        err = self.err_estimate()
        ok = self.stopped and err <= self.opts.rel_tol * max(abs(self.value), 1.0)
        return EvalResult(
            float(self.value),
            float(err),
            self.count if terms_used is None else terms_used,
            representation,
            bool(ok),
        )


def product_error(f: EvalResult, g: EvalResult) -> float:
    """Absolute error bound of ``f.value * g.value``."""
    return abs(f.value) * g.err_estimate + abs(g.value) * f.err_estimate + f.err_estimate * g.err_estimate
