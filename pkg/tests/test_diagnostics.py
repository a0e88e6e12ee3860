"""Diagnostics tests: rate fits with negative controls, radiation verdicts,
limiting-absorption slopes, convolution norms."""

import numpy as np
import pytest

from frachelm.errors import AccuracyError, DomainError
from frachelm.diagnostics import (
    convolution_norm_check, decay_rate_check, green_radial_field,
    hankel_incoming_field, hankel_outgoing_field, lap_slope, radiation_classify,
    singularity_rate_check,
)
from frachelm.kernels import Problem
from frachelm.quadrature import QuadratureSpec
from frachelm.scattering import PotentialGrid


def test_decay_check_examples_and_negative_control():
    p = Problem(1, 0.75, 1.0)
    fit = decay_rate_check(p, "j_tail", (10.0, 1e4), 2.5, n_points=9)
    assert fit.envelope_bounded
    assert fit.drift_ratio < 100.0          # sharp rate: tight two-sided drift
    fit = decay_rate_check(p, "j_tail", (10.0, 1e4), 3.5, n_points=9)
    assert not fit.envelope_bounded          # inflated by +1: product grows


def test_decay_check_3d_low_branch():
    p = Problem(3, 0.3, 1.0)
    fit = decay_rate_check(p, "j_tail", (10.0, 1e4), 3.0 - 2.0 * 0.3, n_points=9)
    assert fit.envelope_bounded
    assert fit.fitted_slope == pytest.approx(-(3.0 - 2.0 * 0.3), abs=0.1)


def test_singularity_check_examples():
    fit = singularity_rate_check(Problem(1, 0.3, 1.0), "j_tail", (1e-3, 0.5), 0.4)
    assert fit.envelope_bounded and fit.drift_ratio < 100.0
    fit = singularity_rate_check(Problem(1, 0.5, 1.0), "j_tail", (1e-3, 0.5),
                                 0.0, log_correction=True)
    assert fit.envelope_bounded
    fit = singularity_rate_check(Problem(3, 0.75, 1.0), "j_tail", (1e-3, 0.5), 1.5)
    assert fit.envelope_bounded and fit.drift_ratio < 100.0


def test_singularity_negative_control_two_sided():
    # sharp singular rates expose inflation through the two-sided drift
    fit = singularity_rate_check(Problem(1, 0.3, 1.0), "j_tail", (1e-3, 0.5), 1.4)
    assert fit.drift_ratio > 100.0


def test_rate_check_windows_validated():
    p = Problem(1, 0.3, 1.0)
    with pytest.raises(DomainError):
        decay_rate_check(p, "j_tail", (10.0, 5.0), 1.0)
    with pytest.raises(DomainError):
        singularity_rate_check(p, "j_tail", (0.1, 0.9), 1.0)
    with pytest.raises(DomainError):
        decay_rate_check(p, "nope", (10.0, 100.0), 1.0)


def test_radiation_battery():
    rep1 = radiation_classify(hankel_outgoing_field(1.0), 1.0, 10.0, 1e3, 0.75)
    assert (rep1.verdict_src, rep1.verdict_gsrc) == (True, True)
    rep2 = radiation_classify(hankel_incoming_field(1.0), 1.0, 10.0, 1e3, 0.75)
    assert (rep2.verdict_src, rep2.verdict_gsrc) == (False, False)
    p = Problem(3, 0.3, 1.0)
    rep3 = radiation_classify(green_radial_field(p), 1.0, 10.0, 1e3, 0.75)
    assert (rep3.verdict_src, rep3.verdict_gsrc) == (True, True)
    for rep in (rep1, rep2, rep3):
        assert rep.verdict_src == rep.verdict_gsrc


def test_radiation_gsrc_partial_nondecreasing():
    rep = radiation_classify(hankel_outgoing_field(1.0), 1.0, 10.0, 500.0, 0.8)
    cum = [v for _, v in rep.gsrc_partial]
    assert np.all(np.diff(cum) >= 0.0)
    assert rep.delta == 0.8


def test_radiation_general_field_path_matches_radial():
    # wrap the radial Hankel field as a general (gradient-only) field; the
    # angular sampling rule must reproduce the radial fast path
    radial = hankel_outgoing_field(1.0)

    class General:
        n = 2

        def value(self, x):
            return radial.value(x)

        def gradient(self, x):
            return radial.gradient(x)

    rep_r = radiation_classify(radial, 1.0, 10.0, 200.0, 0.75, profile_points=4)
    rep_g = radiation_classify(General(), 1.0, 10.0, 200.0, 0.75, profile_points=4)
    for (_, a), (_, b) in zip(rep_r.src_profile, rep_g.src_profile):
        assert a == pytest.approx(b, rel=1e-10)
    assert rep_g.verdict_src and rep_g.verdict_gsrc


def test_radiation_requires_gradient():
    class NoGrad:
        n = 2

        def value(self, x):
            return 1.0

    with pytest.raises(DomainError):
        radiation_classify(NoGrad(), 1.0, 10.0, 100.0, 0.75)
    with pytest.raises(DomainError):
        radiation_classify(hankel_outgoing_field(1.0), 1.0, 10.0, 100.0, 0.4)


def test_lap_slope_regimes():
    assert 0.8 <= lap_slope(Problem(1, 0.3, 1.0), 2.0, [1e-1, 1e-2, 1e-3]) <= 1.2
    assert 0.8 <= lap_slope(Problem(3, 0.75, 1.0), 1.0, [1e-1, 1e-2, 1e-3]) <= 1.2


def test_lap_slope_guards():
    p = Problem(1, 0.3, 1.0)
    with pytest.raises(DomainError):
        lap_slope(p, 2.0, [1e-2, 1e-2])          # not strictly decreasing
    with pytest.raises(DomainError):
        lap_slope(p, 2.0, [0.0, 0.0])
    # differences below 10x the quadrature error are inconclusive
    with pytest.raises(AccuracyError):
        lap_slope(p, 2.0, [1e-5, 1e-6], QuadratureSpec(rel_tol=1e-4, abs_tol=1e-6))


def test_convolution_norm_single_cell_and_scaling():
    p = Problem(1, 0.3, 1.0)
    q = np.zeros(8)
    q[3] = 1.0
    src = PotentialGrid.build([-1.0], [1.0], 8, q)
    ratio = convolution_norm_check(p, src, 0.75, 10.0)
    assert np.isfinite(ratio) and ratio > 0.0
    src2 = PotentialGrid.build([-1.0], [1.0], 8, 2.0 * q)
    ratio2 = convolution_norm_check(p, src2, 0.75, 10.0)
    assert ratio2 == pytest.approx(ratio, rel=1e-12)


def test_convolution_norm_truncation_stability():
    p = Problem(1, 0.3, 1.0)
    src = PotentialGrid.build([-1.0], [1.0], 12, lambda x: np.exp(-4 * x[:, 0] ** 2))
    r20 = convolution_norm_check(p, src, 0.75, 20.0)
    r40 = convolution_norm_check(p, src, 0.75, 40.0)
    assert abs(r40 - r20) / r20 < 0.2


def test_convolution_norm_guards():
    p = Problem(1, 0.3, 1.0)
    src = PotentialGrid.build([-1.0], [1.0], 8, 0.0)
    with pytest.raises(DomainError):
        convolution_norm_check(p, src, 0.75, 10.0)    # identically zero source
    src = PotentialGrid.build([-1.0], [1.0], 8, 1.0)
    with pytest.raises(DomainError):
        convolution_norm_check(p, src, 0.3, 10.0)     # delta outside (1/2, 1)
