import math

import pytest

from biaxhelm.errors import NonConvergence
from biaxhelm.series import Accumulator, EvalResult, Representation, SeriesOptions, tighter


def test_options_reject_bad_values():
    with pytest.raises(ValueError):
        SeriesOptions(rel_tol=0.0)
    with pytest.raises(ValueError):
        SeriesOptions(max_terms_per_index=0)
    with pytest.raises(ValueError):
        SeriesOptions(stagnation_window=0)


def test_tighter_floors_at_1e_15():
    assert tighter(SeriesOptions(rel_tol=1e-8)).rel_tol == pytest.approx(1e-9)
    assert tighter(SeriesOptions(rel_tol=1e-15)).rel_tol == 1e-15


def test_geometric_series_error_bound_covers_true_error():
    opts = SeriesOptions(rel_tol=1e-12)
    for q in (0.1, 0.5, 0.9, -0.95):
        acc = Accumulator(opts, ratio_hint=abs(q))
        t = 1.0
        while not acc.push(t):
            t *= q
        res = acc.result(Representation.TRIVIAL)
        exact = 1.0 / (1.0 - q)
        assert res.converged
        assert abs(res.value - exact) <= res.err_estimate
        assert res.err_estimate <= 1e-12 * abs(exact)


def test_compensated_sum_keeps_small_terms():
    acc = Accumulator(SeriesOptions())
    for v in (1.0, 1e-16, 1e-16, 1e-16, 1e-16, -1.0):
        acc.push(v)
    assert acc.value == pytest.approx(4e-16, rel=1e-12)


def test_non_finite_term_raises():
    acc = Accumulator(SeriesOptions())
    with pytest.raises(NonConvergence):
        acc.push(math.inf)


def test_scaled_result():
    r = EvalResult(2.0, 1e-3, 5, Representation.DIRECT, True).scaled(-3.0)
    assert r.value == -6.0
    assert r.err_estimate == pytest.approx(3e-3)
    assert r.terms_used == 5 and r.converged
