"""Green's-function assembly tests: closed forms, derivatives, asymptotics."""

import numpy as np
import pytest

from frachelm.errors import DomainError
from frachelm.green import (
    green_closed_form_3d_half, green_closed_form_3d_half_dr, green_eval,
    green_eval_batch, green_radial_derivative, src_residual,
)
from frachelm.kernels import Problem, helm_part, helm_part_dr, spectral_shift
from frachelm.quadrature import QuadratureSpec


def test_closed_form_agreement_3d_half():
    p = Problem(3, 0.5, 1.0)
    for r in (0.1, 1.0, 10.0):
        g = green_eval(p, 0.0, r)
        c = green_closed_form_3d_half(1.0, r)
        assert abs(g.total - c) / abs(c) < 1e-8


def test_closed_form_small_r_riesz_dominates():
    k = 1.0
    for r in (1e-4, 1e-5):
        val = green_closed_form_3d_half(k, r)
        assert val.real == pytest.approx(1.0 / (2.0 * np.pi ** 2 * r ** 2), rel=1e-2)


def test_closed_form_nonhelm_decay_r4():
    # first two terms decay like r^{-4}: r^4 |part| bounded over [10, 1e4]
    from frachelm.specfun import expint_e1
    k = 1.0
    prods = []
    for r in np.logspace(1, 4, 10):
        a = np.exp(1j * k * r) * expint_e1(1j * k * r)
        b = np.exp(-1j * k * r) * expint_e1(-1j * k * r)
        part = 1.0 / (2 * np.pi ** 2 * r ** 2) - 1j * k / (4 * np.pi ** 2 * r) * (a - b)
        prods.append(abs(part) * r ** 4)
    prods = np.array(prods)
    assert np.max(prods) / prods[0] < 10.0


def test_decomposition_additivity():
    p = Problem(2, 0.3, 1.0)
    g = green_eval(p, 0.3, 1.3)
    assert g.total == g.helm + g.riesz_sum + g.j_tail


def test_riesz_sum_zero_on_high_branch_and_1d():
    g = green_eval(Problem(2, 0.75, 1.0), 0.0, 1.0)
    assert g.riesz_sum == 0.0
    g = green_eval(Problem(1, 0.25, 1.0), 0.0, 1.0)
    assert g.riesz_sum == 0.0


def test_batch_matches_scalar():
    p = Problem(3, 0.3, 1.0)
    radii = np.array([0.5, 1.0, 2.0])
    helm, riesz, jt, err = green_eval_batch(p, 0.0, radii)
    for i, r in enumerate(radii):
        g = green_eval(p, 0.0, float(r))
        assert g.total == pytest.approx(complex(helm[i] + riesz[i] + jt[i]), rel=1e-8)


def test_domain_errors():
    p = Problem(1, 0.3, 1.0)
    with pytest.raises(DomainError):
        green_eval(p, 0.0, -1.0)
    with pytest.raises(DomainError):
        green_eval(p, 0.0, 0.0)


@pytest.mark.parametrize("n,s", [(1, 0.3), (1, 0.75), (2, 0.5), (2, 0.75),
                                 (3, 0.25), (3, 0.6)])
def test_radial_derivative_vs_finite_difference(n, s):
    p = Problem(n, s, 1.0)
    r, h = 2.0, 1e-5
    d = green_radial_derivative(p, 0.0, r)
    fd = (green_eval(p, 0.0, r + h).total - green_eval(p, 0.0, r - h).total) / (2 * h)
    assert d == pytest.approx(fd, rel=1e-6)


def test_radial_derivative_absorption_case():
    p = Problem(2, 0.3, 1.0)
    sh = spectral_shift(p, 0.4)
    r, h = 1.5, 1e-5
    d = green_radial_derivative(p, sh, r)
    fd = (green_eval(p, sh, r + h).total - green_eval(p, sh, r - h).total) / (2 * h)
    assert d == pytest.approx(fd, rel=1e-6)


def test_derivative_3d_closed_form_half():
    p = Problem(3, 0.5, 1.0)
    for r in (0.5, 2.0):
        d = green_radial_derivative(p, 0.0, r)
        dref = green_closed_form_3d_half_dr(1.0, r)
        assert d == pytest.approx(dref, rel=1e-6)
    # the closed-form derivative itself against finite differences
    h = 1e-6
    fd = (green_closed_form_3d_half(1.0, 2.0 + h)
          - green_closed_form_3d_half(1.0, 2.0 - h)) / (2 * h)
    assert green_closed_form_3d_half_dr(1.0, 2.0) == pytest.approx(fd, rel=1e-8)


def test_helm_derivative_3d_closed_form_example():
    # d/dr [e^{ikr}/(4 pi r)] * k^{2-2s}/s = (ik/r - 1/r^2) e^{ikr} k^{2-2s}/(4 pi s)
    s, k, r = 0.75, 1.3, 2.1
    expect = k ** (2 - 2 * s) / s * (1j * k / r - 1.0 / r ** 2) \
        * np.exp(1j * k * r) / (4 * np.pi)
    assert helm_part_dr(3, s, complex(k), r) == pytest.approx(expect, rel=1e-12)


def test_src_residual_1d_helm_exactly_outgoing():
    # d_r e^{ikr} = ik e^{ikr}: the 1D helm part alone has zero SRC residual
    s, k = 0.3, 1.0
    for r in (1.0, 10.0, 100.0):
        h = helm_part(1, s, complex(k), r)
        dh = helm_part_dr(1, s, complex(k), r)
        assert abs(dh - 1j * k * h) < 1e-14 * abs(h)


def test_src_residual_decreasing():
    p = Problem(3, 0.5, 1.0)
    res = [src_residual(p, r) for r in (1e2, 1e3)]
    assert res[1] < res[0]


def test_incoming_sign_flip_does_not_cancel():
    # |dG/dr + ikG| stays near 2k r^{(n-1)/2} |G_helm| at large r
    p = Problem(3, 0.5, 1.0)
    r = 200.0
    g = green_eval(p, 0.0, r)
    dg = green_radial_derivative(p, 0.0, r)
    anti = r ** ((p.n - 1) / 2.0) * abs(dg + 1j * p.k * g.total)
    ref = 2.0 * p.k * r ** ((p.n - 1) / 2.0) * abs(g.helm)
    assert 0.5 * ref < anti < 1.5 * ref
    assert src_residual(p, r) < 0.05 * anti


def test_limiting_absorption_differences_shrink():
    p = Problem(1, 0.3, 1.0)
    base = green_eval(p, 0.0, 2.0).total
    diffs = [abs(green_eval(p, e, 2.0).total - base) for e in (1e-1, 1e-2, 1e-3)]
    assert diffs[2] < diffs[1] < diffs[0]


def test_error_estimate_scale():
    p = Problem(2, 0.3, 1.0)
    g = green_eval(p, 0.0, 1.0)
    loose = green_eval(p, 0.0, 1.0, QuadratureSpec(rel_tol=1e-5, abs_tol=1e-8))
    assert abs(loose.total - g.total) <= 10.0 * (loose.err_estimate + g.err_estimate)


@pytest.mark.parametrize("n,s,rate", [
    (1, 0.75, 2.5), (1, 0.3, 1.6), (3, 0.75, 4.5), (3, 0.3, 2.4),
])
def test_j_tail_decay_smoke(n, s, rate):
    # |j_tail| * r^rate bounded over a short far-field window
    p = Problem(n, s, 1.0)
    radii = np.logspace(1, 3, 5)
    _, _, jt, _ = green_eval_batch(p, 0.0, radii)
    prod = np.abs(jt) * radii ** rate
    assert np.max(prod) / prod[0] < 10.0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_wavenumber_scaling_identity(n):
    # G_k(r) = k^{n-2s} G_1(k r) exactly (substitute xi -> k eta in the symbol);
    # in 2D this exercises a genuinely different transform partition per k
    for s in (0.25, 0.3, 0.75):
        for k in (0.5, 2.0):
            r = 1.3
            a = green_eval(Problem(n, s, k), 0.0, r).total
            b = k ** (n - 2 * s) * green_eval(Problem(n, s, 1.0), 0.0, k * r).total
            assert a == pytest.approx(b, rel=1e-10)


def test_2d_integer_branch_split_equals_direct_kernel():
    # the corrected-kernel + Struve split must equal the direct (conditionally
    # convergent) transform of rho F_m, since the corrector identity is exact
    from frachelm.kernels import F_m
    from frachelm.quadrature import QuadratureSpec, integrate_oscillatory
    from frachelm.specfun import bessel_j0
    s, r = 0.25, 1.3
    res = integrate_oscillatory(
        lambda rho: bessel_j0(rho * r) * rho * np.atleast_1d(F_m(rho, 1.0 + 0j, s, 2)),
        r, "j0", QuadratureSpec(), intervals=60)
    g = green_eval(Problem(2, s, 1.0), 0.0, r)
    assert abs(res.value / (2.0 * np.pi) - g.j_tail) < 1e-9
