"""Special-function tests: anchors, dual-path overlap bands, identities."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frachelm.errors import DomainError
from frachelm import specfun as sf
from frachelm.quadrature import QuadratureSpec, integrate_adaptive


# ---------------------------------------------------------------------------
# independent mini-oracles (kept deliberately naive)
# ---------------------------------------------------------------------------

def j0_series_oracle(x, terms=60):
    acc, term = 1.0, 1.0
    for j in range(1, terms):
        term *= -(x * x / 4.0) / (j * j)
        acc += term
    return acc


def y0_series_oracle(x, terms=60):
    gamma = 0.5772156649015328606
    acc, term, harm = 0.0, 1.0, 0.0
    for j in range(1, terms):
        term *= (x * x / 4.0) / (j * j)
        harm += 1.0 / j
        acc += (-1.0) ** (j + 1) * harm * term
    return 2.0 / np.pi * ((np.log(x / 2.0) + gamma) * j0_series_oracle(x) + acc)


def struve_h0_series(z, terms=60):
    acc = 0.0
    for k in range(terms):
        acc += (-1.0) ** k * (z / 2.0) ** (2 * k + 1) / sf.gamma_fn(k + 1.5) ** 2
    return acc


# ---------------------------------------------------------------------------
# gamma and Riesz constants
# ---------------------------------------------------------------------------

def test_gamma_anchors():
    assert sf.gamma_fn(0.5) == pytest.approx(np.sqrt(np.pi), rel=1e-14)
    assert sf.gamma_fn(1.0) == pytest.approx(1.0, rel=1e-14)
    assert sf.gamma_fn(4.0) == pytest.approx(6.0, rel=1e-13)


def test_gamma_recurrence_sweep():
    for x in np.linspace(0.05, 10.0, 41):
        assert sf.gamma_fn(x + 1.0) == pytest.approx(x * sf.gamma_fn(x), rel=1e-12)


def test_gamma_domain():
    with pytest.raises(DomainError):
        sf.gamma_fn(0.0)
    with pytest.raises(DomainError):
        sf.gamma_fn(-1.3)


def test_riesz_constant_anchor_3d_half():
    assert sf.riesz_constant(3, 0.5, 0) == pytest.approx(1.0 / (2.0 * np.pi ** 2), rel=1e-13)


def test_riesz_constant_derived_values():
    expect = sf.gamma_fn(0.75) / (4.0 ** 0.25 * np.pi * sf.gamma_fn(0.25))
    assert sf.riesz_constant(2, 0.25, 0) == pytest.approx(expect, rel=1e-13)
    assert sf.riesz_constant(3, 0.25, 1) == pytest.approx(1.0 / (2.0 * np.pi ** 2), rel=1e-13)


@given(st.sampled_from([1, 2, 3]), st.floats(0.05, 0.95), st.integers(0, 3))
@settings(max_examples=60, deadline=None)
def test_riesz_constant_positive(n, s, j):
    if 0.0 < s * (j + 1) < 0.5 * n:
        assert sf.riesz_constant(n, s, j) > 0.0
    else:
        with pytest.raises(DomainError):
            sf.riesz_constant(n, s, j)


# ---------------------------------------------------------------------------
# Bessel / Hankel
# ---------------------------------------------------------------------------

def test_j0_at_zero_and_series_agreement():
    assert sf.bessel_j0(0.0) == 1.0
    for x in (0.3, 1.0, 4.0, 9.5):
        assert sf.bessel_j0(x) == pytest.approx(j0_series_oracle(x), abs=1e-13)


def test_j0_first_zero_by_bisection():
    # bisect the independent series oracle, then check the library value there
    lo, hi = 2.0, 3.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if j0_series_oracle(lo) * j0_series_oracle(mid) <= 0.0:
            hi = mid
        else:
            lo = mid
    root = 0.5 * (lo + hi)
    assert root == pytest.approx(2.40482555769577, abs=1e-12)
    assert abs(sf.bessel_j0(root)) < 1e-12


def test_j0_large_argument_asymptotic():
    x = 50.0
    lead = np.sqrt(2.0 / (np.pi * x)) * np.cos(x - np.pi / 4.0)
    assert sf.bessel_j0(x) == pytest.approx(lead, abs=1e-3)


def test_j0_domain():
    with pytest.raises(DomainError):
        sf.bessel_j0(-1.0)


def test_series_asymptotic_overlap_band():
    # both evaluation paths agree on the crossover band (design decision)
    band = np.linspace(12.5, 15.5, 13)
    for x in band:
        series = j0_series_oracle(x, terms=80)
        asym = sf._hankel1_asym(np.complex128(x), 0).real
        assert abs(series - asym) < 1e-10
        y_series = y0_series_oracle(x, terms=80)
        y_asym = sf._hankel1_asym(np.complex128(x), 0).imag
        assert abs(y_series - y_asym) < 1e-10


def test_hankel1_0_against_series():
    z = 1.0
    expect = j0_series_oracle(z) + 1j * y0_series_oracle(z)
    assert sf.hankel1_0(z) == pytest.approx(expect, rel=1e-12)


def test_hankel1_0_conjugate_identity():
    for x in (0.7, 3.0, 11.0):
        h = sf.hankel1_0(x)
        assert np.conj(h) == pytest.approx(complex(j0_series_oracle(x), -y0_series_oracle(x)),
                                           rel=1e-10)


def test_hankel1_0_upper_half_plane_decay():
    # |H0^(1)(z)| ~ sqrt(2/(pi |z|)) e^{-Im z} in the upper half-plane
    for z in (20.0 + 5.0j, 8.0 + 8.0j, 30.0 + 1.0j):
        expect = np.sqrt(2.0 / (np.pi * abs(z))) * np.exp(-z.imag)
        assert abs(sf.hankel1_0(z)) == pytest.approx(expect, rel=0.2)


def test_hankel1_0_region_consistency():
    # series, cosh-integral and asymptotic regions must agree at shared points
    a = sf._hankel1_scalar(3.0 + 2.4999j, 0)
    b = sf._hankel1_cosh_integral(3.0 + 2.4999j, 0)
    assert a == pytest.approx(b, rel=1e-11)
    a = sf._hankel1_scalar(12.0 + 10.0j, 0)
    b = complex(sf._hankel1_asym(np.complex128(12.0 + 10.0j), 0))
    assert a == pytest.approx(b, rel=1e-9)


def test_hankel_branch_cut():
    with pytest.raises(DomainError):
        sf.hankel1_0(-1.0 + 0.0j)
    with pytest.raises(DomainError):
        sf.hankel1_0(0.0)


def test_hankel_amplitude_bounded():
    x = np.linspace(1.0, 200.0, 100)
    amp = np.abs(sf.hankel1_0(x.astype(complex))) * np.sqrt(x)
    assert np.max(amp) < 1.2   # sqrt(2/pi) ~ 0.798 plus small-x excess


def test_wronskian():
    # J0 Y0' - J0' Y0 = 2/(pi x), derivatives via J0' = -J1, Y0' = -Y1
    for x in (0.5, 1.0, 5.0, 20.0):
        w = -sf.bessel_j0(x) * sf.bessel_y1(x) + sf.bessel_j1(x) * sf.bessel_y0(x)
        assert w == pytest.approx(2.0 / (np.pi * x), abs=1e-10)


def test_wronskian_finite_difference():
    h = 1e-6
    for x in (1.0, 5.0):
        dy0 = (sf.bessel_y0(x + h) - sf.bessel_y0(x - h)) / (2 * h)
        dj0 = (sf.bessel_j0(x + h) - sf.bessel_j0(x - h)) / (2 * h)
        w = sf.bessel_j0(x) * dy0 - dj0 * sf.bessel_y0(x)
        assert w == pytest.approx(2.0 / (np.pi * x), abs=1e-4)


def test_j0_zeros_are_roots():
    zs = sf.j0_zeros(12)
    assert np.all(np.abs(sf.bessel_j0(zs)) < 5e-12)
    assert np.all(np.diff(zs) > 3.0)


# ---------------------------------------------------------------------------
# Struve functions of the second kind
# ---------------------------------------------------------------------------

def test_struve_k0_far_field_paper_bound():
    # K0(z) = 2/(pi z) + O(z^-2); at z=10 the deviation is below 0.02
    assert abs(sf.struve_k0(10.0) - 2.0 / (10.0 * np.pi)) <= 0.02


def test_struve_k0_against_struve_weber_identity():
    # K0 = StruveH0 - Y0 on (0, inf); StruveH0 from its power series
    for z in (0.5, 1.0, 3.0):
        expect = struve_h0_series(z) - sf.bessel_y0(z)
        assert sf.struve_k0(z) == pytest.approx(expect, abs=1e-9)


def test_struve_k0_quadrature_oracle():
    # direct finite-interval quadrature of the defining integral plus an
    # averaged oscillatory tail, done with the generic engine only
    from frachelm.quadrature import integrate_oscillatory
    z = 1.0
    res = integrate_oscillatory(lambda t: sf.bessel_j0(t) / (t + z), 1.0, "j0",
                                QuadratureSpec(), intervals=60)
    assert sf.struve_k0(z) == pytest.approx(2.0 / np.pi * res.value, abs=1e-9)


def test_struve_k0_real_positive():
    for z in (0.05, 0.5, 2.0, 25.0):
        val = sf.struve_k0(z)
        assert abs(val.imag) < 1e-12
        assert val.real > 0.0


def test_struve_derivative_identity():
    # (K0(k(r+h)) - K0(k(r-h)))/(2h) ~ 2k/pi - k K1(kr) at r=2, k=1
    k, r, h = 1.0, 2.0, 1e-5
    fd = (sf.struve_k0(k * (r + h)) - sf.struve_k0(k * (r - h))) / (2 * h)
    rhs = 2.0 * k / np.pi - k * sf.struve_k1(k * r)
    assert fd == pytest.approx(rhs, abs=1e-7)


def test_struve_k1_far_field():
    assert sf.struve_k1(40.0) == pytest.approx(2.0 / np.pi, abs=2e-3)


def test_struve_branch_cut():
    with pytest.raises(DomainError):
        sf.struve_k0(-2.0 + 0.0j)


# ---------------------------------------------------------------------------
# exponential integral
# ---------------------------------------------------------------------------

def test_e1_at_one_quadrature_oracle():
    qr = integrate_adaptive(lambda t: np.exp(-t) / t, 1.0, 60.0, QuadratureSpec())
    assert qr.value.real == pytest.approx(0.219383934395520, abs=1e-12)
    assert sf.expint_e1(1.0) == pytest.approx(0.219383934395520, rel=1e-10)


def test_e1_large_argument_asymptotic():
    z = 50.0
    lead = np.exp(-z) / z * (1.0 + 1.0 / z)
    assert sf.expint_e1(z) == pytest.approx(lead, rel=1e-3)


def test_e1_derivative_identity():
    h = 1e-6
    for z in (0.8, 2.0 + 1.5j, 5.0j):
        fd = (sf.expint_e1(z + h) - sf.expint_e1(z - h)) / (2 * h)
        assert fd == pytest.approx(-np.exp(-z) / z, rel=1e-7)


def test_e1_series_cf_crossover():
    # both branches agree around |z| = 3
    # the derivative identity couples nearby points across the series/CF
    # boundary, so a mismatch between branches would show up here
    for z in (2.9, 3.1, 2.9j, 3.1j, 2.0 + 2.0j, 2.3 + 2.0j):
        direct = sf.expint_e1(z)
        h = 0.05
        fd = (sf.expint_e1(z + h) - sf.expint_e1(z - h)) / (2 * h)
        assert fd == pytest.approx(-np.exp(-z) / z, rel=2e-3)
        assert np.isfinite(direct.real) and np.isfinite(direct.imag)


def test_e1_domain():
    with pytest.raises(DomainError):
        sf.expint_e1(0.0)
    with pytest.raises(DomainError):
        sf.expint_e1(-3.0 + 0.0j)
