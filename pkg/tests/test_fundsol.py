import numpy as np
import pytest

from biaxhelm.a2 import A2Point, a2_direct
from biaxhelm.errors import CoincidentPoints, DimensionMismatch, DomainError, PoleError
from biaxhelm.fundsol import (
    HelmholtzParams,
    KernelSpec,
    apply_constructive,
    geometry,
    kernel_a2_params,
    kernel_field,
    q,
)
from biaxhelm.hypergeom import appell_f2_direct

from oracles import a2_brute

HP = HelmholtzParams(0.3, 0.35, 1.0, 3)
X0 = np.ones(3)

# A2 factor of q1 at x=(1.2, 0.9, 1.1), x0=(1, 1, 1); mpmath Gauss-product expansion, 40 digits
A2_FACTOR_Q1 = -0.06340984008050911


def test_geometry_example():
    g = geometry([1, 1, 2], [1, 1, 1], HelmholtzParams(0.25, 0.25, 2.0, 3))
    assert (g.r2, g.r1_2, g.r2_2) == (1.0, 5.0, 5.0)
    assert (g.xi, g.eta, g.zeta) == (-4.0, -4.0, -1.0)


def test_geometry_identities():
    rng = np.random.default_rng(3)
    for _ in range(10):
        x, x0 = rng.uniform(0.2, 2.0, (2, 4))
        g = geometry(x, x0, HelmholtzParams(0.2, 0.4, 0.7, 4))
        assert g.xi == pytest.approx((g.r2 - g.r1_2) / g.r2, rel=1e-12)
        assert g.eta == pytest.approx((g.r2 - g.r2_2) / g.r2, rel=1e-12)


def test_geometry_errors():
    with pytest.raises(CoincidentPoints):
        geometry(X0, X0, HP)
    with pytest.raises(DimensionMismatch):
        geometry([1, 1], X0, HP)
    with pytest.raises(DomainError, match="x1 > 0, x2 > 0"):
        geometry([0.0, 1, 1], X0, HP)


def test_zero_lambda_gives_zero_zeta():
    g = geometry([1.3, 0.4, 2], X0, HelmholtzParams(0.3, 0.35, 0.0, 3))
    assert g.zeta == 0.0


def test_params_validation():
    with pytest.raises(ValueError):
        HelmholtzParams(0.6, 0.2)
    with pytest.raises(ValueError):
        HelmholtzParams(0.2, 0.2, p=2)
    with pytest.raises(ValueError):
        HelmholtzParams(0.2, 0.2, lam=-1.0)
    with pytest.raises(ValueError):
        KernelSpec(5)
    assert HP.reflect_alpha().alpha == pytest.approx(0.7)


def test_q1_matches_reference_value():
    x = [1.2, 0.9, 1.1]
    res = q(KernelSpec(1), x, X0, HP)
    g = geometry(x, X0, HP)
    assert res.converged
    assert res.value == pytest.approx(g.P * A2_FACTOR_Q1, rel=1e-12)


def test_q1_against_triple_sum_when_arguments_small():
    x0 = np.array([0.05, 0.05, 1.0])
    x = np.array([0.06, 0.04, 1.5])
    g = geometry(x, x0, HP)
    ap = kernel_a2_params(1, HP)
    ref = a2_brute(ap.a, ap.b1, ap.b2, ap.c1, ap.c2, g.xi, g.eta, g.zeta, deg=30)
    assert q(KernelSpec(1), x, x0, HP).value == pytest.approx(g.P * ref, rel=1e-12)


def test_kernel_constant_scales():
    x = [1.2, 0.9, 1.1]
    assert q(KernelSpec(3, k=-2.5), x, X0, HP).value == pytest.approx(-2.5 * q(KernelSpec(3), x, X0, HP).value)


def test_integer_first_parameter_with_lambda_is_a_pole():
    # alpha = beta = 1/4, p = 3 gives a = 1 for q1 and a = 2 for q4
    hp = HelmholtzParams(0.25, 0.25, 1.0, 3)
    for idx in (1, 4):
        with pytest.raises(PoleError):
            q(KernelSpec(idx), [1.2, 0.9, 1.1], X0, hp)
    assert np.isfinite(q(KernelSpec(2), [1.2, 0.9, 1.1], X0, hp).value)


@pytest.mark.parametrize("idx", [1, 2, 3, 4])
def test_source_field_symmetry(idx):
    rng = np.random.default_rng(idx)
    for _ in range(4):
        x, x0 = rng.uniform(0.3, 1.8, (2, 3))
        u = q(KernelSpec(idx), x, x0, HP)
        v = q(KernelSpec(idx), x0, x, HP)
        assert v.value == pytest.approx(u.value, rel=1e-12)


@pytest.mark.parametrize("idx,partner", [(1, 1), (2, 3), (3, 2), (4, 4)])
def test_axis_exchange_symmetry(idx, partner):
    swap = [1, 0, 2]
    rng = np.random.default_rng(10 + idx)
    for _ in range(4):
        x, x0 = rng.uniform(0.3, 1.8, (2, 3))
        u = q(KernelSpec(idx), x, x0, HP)
        v = q(KernelSpec(partner), x[swap], x0[swap], HP.swapped())
        assert v.value == pytest.approx(u.value, rel=1e-12)


def test_zero_lambda_reduces_to_f2_kernel():
    hp = HelmholtzParams(0.3, 0.35, 0.0, 3)
    x0 = np.array([0.1, 0.1, 0.0])
    for x3 in (2.0, 3.0, 5.0):
        x = np.array([0.1, 0.12, x3])
        g = geometry(x, x0, hp)
        for idx in (1, 4):
            ap = kernel_a2_params(idx, hp)
            f2 = appell_f2_direct(ap.a, ap.b1, ap.b2, ap.c1, ap.c2, g.xi, g.eta).value
            direct = a2_direct(ap, A2Point(g.xi, g.eta, 0.0)).value
            assert direct == pytest.approx(f2, rel=1e-13)
        assert q(KernelSpec(1), x, x0, hp).value == pytest.approx(g.P * appell_f2_direct(
            *[getattr(kernel_a2_params(1, hp), n) for n in ("a", "b1", "b2", "c1", "c2")], g.xi, g.eta
        ).value, rel=1e-13)


def test_q1_tends_to_bare_prefactor_far_away():
    hp = HelmholtzParams(0.3, 0.35, 0.0, 3)
    x0 = np.array([1e-3, 1e-3, 0.0])
    x = np.array([1e-3, 1e-3, 10.0])
    g = geometry(x, x0, hp)
    assert q(KernelSpec(1), x, x0, hp).value == pytest.approx(g.P, rel=1e-7)


def test_q2_vanishes_at_first_axis():
    vals = [abs(q(KernelSpec(2), [t, 0.9, 1.1], X0, HP).value) for t in (1e-2, 1e-4, 1e-6)]
    # q2 ~ x1^(1 - 2 alpha) near the axis
    assert vals[1] / vals[0] == pytest.approx(1e-2 ** (1 - 2 * HP.alpha), rel=1e-2)
    assert vals[2] / vals[1] == pytest.approx(1e-2 ** (1 - 2 * HP.alpha), rel=1e-4)


def test_constructive_on_constant_field():
    field, partner = apply_constructive(1, lambda x: 1.0, HP)
    assert field(np.array([0.5, 1.0, 1.0])) == pytest.approx(0.5 ** (1 - 2 * HP.alpha))
    assert partner.alpha == pytest.approx(1 - HP.alpha)
    assert partner.beta == HP.beta


def test_constructive_twice_is_identity():
    u = kernel_field(KernelSpec(1), X0, HP)
    once, partner = apply_constructive(1, u, HP)
    twice, back = apply_constructive(1, once, partner)
    x = np.array([1.4, 0.7, 0.9])
    assert twice(x) == pytest.approx(u(x), rel=1e-13)
    assert back.alpha == pytest.approx(HP.alpha)


def test_constructive_maps_first_kernel_onto_second():
    partner = HP.reflect_alpha()
    u = kernel_field(KernelSpec(1), X0 * [0.8, 1, 1], partner)
    field, _ = apply_constructive(1, u, HP)
    rng = np.random.default_rng(17)
    ratios = []
    for _ in range(10):
        x = rng.uniform(0.3, 1.8, 3)
        ratios.append(q(KernelSpec(2), x, X0 * [0.8, 1, 1], HP).value / field(x))
    # the ratio is the constant x01^(1 - 2 alpha)
    assert np.allclose(ratios, 0.8 ** (1 - 2 * HP.alpha), rtol=1e-12)


def test_constructive_rejects_unknown_formula():
    with pytest.raises(ValueError):
        apply_constructive(3, lambda x: 1.0, HP)
