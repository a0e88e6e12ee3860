"""Quantitative verification harness for the analytic claims.

Rate checks evaluate a designated part of the fundamental solution on a log
grid and form value * r^rate products.  ``envelope_bounded`` is a bound check,
not a sharpness check: it fails only when the product grows systematically
toward the asymptotic end (max over the window exceeding ``drift_factor``
times the product at the benign end).  The two-sided max/min ratio is also
reported for rows with sharp rates, where it powers the negative controls.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyError, DomainError
from .green import green_eval, green_eval_batch, green_radial_derivative
from .quadrature import DEFAULT_SPEC
from .specfun import hankel1_0, hankel1_1

DRIFT_FACTOR = 100.0
GSRC_TAIL_FRACTION = 0.05

_SPHERE_RULES = {}


@dataclass
class RateFit:
    """Product diagnostics for one claimed asymptotic rate."""

    radii: np.ndarray
    values: np.ndarray
    claimed_rate: float
    fitted_slope: float
    growth_ratio: float      # max(product) / product at the benign end
    drift_ratio: float       # max(product) / min(product), two-sided
    envelope_bounded: bool


@dataclass
class RadiationReport:
    src_profile: list
    gsrc_partial: list
    delta: float
    verdict_src: bool
    verdict_gsrc: bool


def _part_values(p, part, radii, spec):
    helm, riesz, jt, err = green_eval_batch(p, 0.0, radii, spec)
    if part == "j_tail":
        vals = jt
    elif part == "nonhelm_total":
        vals = riesz + jt
    else:
        raise DomainError(f"unknown part {part!r}; use 'j_tail' or 'nonhelm_total'")
    return np.abs(vals), err


def _rate_fit(radii, values, claimed_rate, product, anchor_index, drift_factor):
    slope = float(np.polyfit(np.log(radii), np.log(np.maximum(values, 1e-300)), 1)[0])
    growth = float(np.max(product) / product[anchor_index])
    drift = float(np.max(product) / np.min(product))
    return RateFit(radii, values, float(claimed_rate), slope, growth, drift,
                   bool(growth <= drift_factor))


def decay_rate_check(p, part, r_window, claimed_rate, spec=DEFAULT_SPEC,
                     n_points=13, drift_factor=DRIFT_FACTOR):
    """Check |part(r)| <= C / r^claimed_rate over a far-field window."""
    lo, hi = float(r_window[0]), float(r_window[-1])
    if not (0.0 < lo < hi):
        raise DomainError("decay window must satisfy 0 < rmin < rmax")
    radii = np.logspace(np.log10(lo), np.log10(hi), n_points)
    values, _ = _part_values(p, part, radii, spec)
    product = values * radii ** claimed_rate
    return _rate_fit(radii, values, claimed_rate, product, 0, drift_factor)


def singularity_rate_check(p, part, r_window, claimed_rate, spec=DEFAULT_SPEC,
                           n_points=11, log_correction=False,
                           drift_factor=DRIFT_FACTOR):
    """Check |part(r)| <= C / r^claimed_rate (or C |ln r| when log-corrected)
    over a window shrinking to 0; the benign anchor is the largest radius."""
    lo, hi = float(r_window[0]), float(r_window[-1])
    if not (0.0 < lo < hi <= 0.5):
        raise DomainError("singularity window must lie inside (0, 0.5]")
    radii = np.logspace(np.log10(lo), np.log10(hi), n_points)
    values, _ = _part_values(p, part, radii, spec)
    product = values * radii ** claimed_rate
    if log_correction:
        product = product / (-np.log(radii))
    return _rate_fit(radii, values, claimed_rate, product, len(radii) - 1, drift_factor)


# ---------------------------------------------------------------------------
# Radiation-condition classification
# ---------------------------------------------------------------------------

@dataclass
class RadialField:
    """Point-evaluable radial field with a radial derivative."""

    n: int
    value_fn: callable
    deriv_fn: callable
    radial: bool = field(default=True, init=False)

    def value(self, x):
        return self.value_fn(float(np.linalg.norm(np.atleast_1d(x))))

    def gradient(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        r = float(np.linalg.norm(x))
        return self.deriv_fn(r) * x / r


def hankel_outgoing_field(k):
    """H0^(1)(k r) on the plane: the reference outgoing test field."""
    return RadialField(2, lambda r: hankel1_0(k * r), lambda r: -k * hankel1_1(k * r))


def hankel_incoming_field(k):
    """H0^(2)(k r): the incoming control (fails both radiation conditions)."""
    return RadialField(2, lambda r: np.conj(hankel1_0(k * r)),
                       lambda r: np.conj(-k * hankel1_1(k * r)))


def green_radial_field(p, spec=DEFAULT_SPEC):
    """The assembled fundamental solution as a radial test field."""
    return RadialField(p.n,
                       lambda r: green_eval(p, 0.0, r, spec).total,
                       lambda r: green_radial_derivative(p, 0.0, r))


def _sphere_rule(n, n_theta=32, n_phi=64):
    key = (n, n_theta, n_phi)
    if key in _SPHERE_RULES:
        return _SPHERE_RULES[key]
    if n == 1:
        dirs = np.array([[1.0], [-1.0]])
        w = np.array([0.5, 0.5])
    elif n == 2:
        ang = 2.0 * np.pi * np.arange(n_phi) / n_phi
        dirs = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        w = np.full(n_phi, 1.0 / n_phi)
    else:
        mu, wmu = np.polynomial.legendre.leggauss(n_theta)
        phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
        st = np.sqrt(1.0 - mu ** 2)
        dirs = np.stack([np.outer(st, np.cos(phi)).ravel(),
                         np.outer(st, np.sin(phi)).ravel(),
                         np.outer(mu, np.ones(n_phi)).ravel()], axis=1)
        w = np.outer(wmu / 2.0, np.full(n_phi, 1.0 / n_phi)).ravel()
    _SPHERE_RULES[key] = (dirs, w)
    return dirs, w


def _mean_sq_residual(field, k, r):
    """Sphere average of |grad u - i k x_hat u|^2 at radius r."""
    if getattr(field, "radial", False):
        res = field.deriv_fn(r) - 1j * k * field.value_fn(r)
        return abs(res) ** 2
    dirs, w = _sphere_rule(field.n)
    acc = 0.0
    for d, wt in zip(dirs, w):
        x = r * d
        res = np.asarray(field.gradient(x)) - 1j * k * d * field.value(x)
        acc += wt * float(np.sum(np.abs(res) ** 2))
    return acc


def _surface_measure(n, r):
    return {1: 2.0, 2: 2.0 * np.pi * r, 3: 4.0 * np.pi * r ** 2}[n]


def radiation_classify(field, k, r0, r_max, delta, profile_points=7,
                       shell_order=6, tail_fraction=GSRC_TAIL_FRACTION):
    """Classify a field against both radiation conditions.

    src verdict: the profile r^{(n-1)/2} sqrt(mean |d_r u - i k u|^2) decays
    below 0.1 of its first value.  gsrc verdict: the cumulative weighted
    annulus integrals with weight (1+r^2)^{delta-1} are Cauchy-converging
    (last shell adds less than `tail_fraction` of the total).
    """
    if not hasattr(field, "gradient"):
        raise DomainError("radiation_classify requires a field exposing a gradient")
    if not (0.5 < delta < 1.0):
        raise DomainError("delta must lie in (1/2, 1)")
    if not (0.0 < r0 < r_max):
        raise DomainError("need 0 < R0 < R_max")
    n = field.n
    radii = np.logspace(np.log10(r0), np.log10(r_max), profile_points)
    profile = [(float(r), float(r ** ((n - 1) / 2.0) * np.sqrt(_mean_sq_residual(field, k, r))))
               for r in radii]
    xg, wg = np.polynomial.legendre.leggauss(shell_order)
    partial = []
    total = 0.0
    for a, b in zip(radii[:-1], radii[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        shell = 0.0
        for xi, wi in zip(xg, wg):
            r = mid + half * xi
            shell += half * wi * _mean_sq_residual(field, k, r) \
                * (1.0 + r ** 2) ** (delta - 1.0) * _surface_measure(n, r)
        total += shell
        partial.append((float(b), float(total)))
    increments = np.diff([0.0] + [p[1] for p in partial])
    verdict_src = profile[-1][1] < 0.1 * profile[0][1]
    verdict_gsrc = bool(increments[-1] < tail_fraction * max(total, 1e-300))
    return RadiationReport(profile, partial, float(delta), bool(verdict_src), verdict_gsrc)


# ---------------------------------------------------------------------------
# Limiting-absorption slope
# ---------------------------------------------------------------------------

def lap_slope(p, r, eps_list, spec=DEFAULT_SPEC):
    """Log-log slope of |G^{k_eps}(r) - G^k(r)| against eps."""
    eps = np.asarray(eps_list, dtype=float)
    if eps.size < 2 or np.any(np.diff(eps) >= 0.0) or np.any(eps <= 0.0):
        raise DomainError("eps_list must be positive and strictly decreasing")
    base = green_eval(p, 0.0, r, spec)
    diffs = np.empty(eps.size)
    for i, e in enumerate(eps):
        ge = green_eval(p, float(e), r, spec)
        d = abs(ge.total - base.total)
        if d < 10.0 * (ge.err_estimate + base.err_estimate):
            raise AccuracyError(
                f"absorption difference at eps={e} is below 10x the quadrature "
                "error estimate; slope would be inconclusive", value=d)
        diffs[i] = d
    return float(np.polyfit(np.log(eps), np.log(diffs), 1)[0])


# ---------------------------------------------------------------------------
# Weighted-norm convolution check
# ---------------------------------------------------------------------------

def convolution_norm_check(p, source, delta, truncation_radius, oversample=1.0,
                           spec=DEFAULT_SPEC):
    """Ratio ||G * f||_{L^{2,-delta}} / ||f||_{L^2} on a truncated sample grid.

    `source` is a PotentialGrid whose q_values play the role of f.  The
    convolution is sampled on a uniform grid out to the truncation radius
    (staggered so samples never coincide with source nodes) and the weighted
    norm accumulated discretely.
    """
    from .scattering import _scatter_weights

    if not (0.5 < delta < 1.0):
        raise DomainError("delta must lie in (1/2, 1)")
    n = p.n
    if source.dim != n:
        raise DomainError("source grid dimension mismatch")
    h = float(np.max(source.cell_sizes)) / float(oversample)
    m = int(np.ceil(truncation_radius / h))
    axes = [(-m + 0.5 + np.arange(2 * m)) * h for _ in range(n)]
    grids = np.meshgrid(*axes, indexing="ij")
    samples = np.stack([g.ravel() for g in grids], axis=1)
    f = source.q_values
    acc = 0.0
    for x in samples:
        w = _scatter_weights(p, source, x, spec)
        conv = np.sum(w * f)
        acc += abs(conv) ** 2 * (1.0 + float(x @ x)) ** (-delta)
    num = np.sqrt(acc * h ** n)
    den = np.sqrt(np.sum(np.abs(f) ** 2) * source.cell_volume)
    if den == 0.0:
        raise DomainError("source is identically zero")
    return float(num / den)
