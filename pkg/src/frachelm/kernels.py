"""Scalar kernel building blocks: regimes, P, F_m, F~_m, the multiplier M,
Helmholtz parts, and the pointwise tail integrands.

The removable singularities (F_m and F~_m at r = k_eps, M at xi = |z| for real
z) are evaluated through a power-series window in u = r/k_eps - 1 of relative
width ``TAYLOR_WINDOW``; outside the window the closed forms are used
directly.  The window width is validated by the continuity tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .specfun import bessel_j0, hankel1_0

TAYLOR_WINDOW = 1e-3      # relative window |r - kc| < TAYLOR_WINDOW * |kc|
_SERIES_TERMS = 6
REGIME_SNAP = 1e-12       # s within this of a 1/(2s)-integer boundary snaps to it

HIGH = "HIGH"
LOW_GENERIC = "LOW_GENERIC"
LOW_INTEGER = "LOW_INTEGER"


@dataclass(frozen=True)
class Problem:
    """Dimension, fractional order and wavenumber defining one operator."""

    n: int
    s: float
    k: float

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise DomainError(f"dimension must be 1, 2 or 3, got {self.n}")
        if not (0.0 < self.s < 1.0):
            raise DomainError(f"fractional order must lie in (0,1), got {self.s}")
        if not self.k > 0.0:
            raise DomainError(f"wavenumber must be positive, got {self.k}")

    @property
    def k2s(self):
        return self.k ** (2.0 * self.s)


@dataclass(frozen=True)
class Regime:
    """Formula branch: HIGH (s>1/2, m=0), LOW_GENERIC (1/(2s) not integer),
    or LOW_INTEGER (2sm = 1)."""

    branch: str
    m: int


def classify_regime(s):
    """Classify the fractional order into its Table-1 formula branch."""
    if not (0.0 < s < 1.0):
        raise DomainError(f"fractional order must lie in (0,1), got {s}")
    p = 1.0 / (2.0 * s)
    pr = round(p)
    if pr >= 1 and abs(s - 1.0 / (2.0 * pr)) <= REGIME_SNAP:
        return Regime(LOW_INTEGER, pr)
    if s > 0.5:
        return Regime(HIGH, 0)
    return Regime(LOW_GENERIC, int(np.floor(p)))


@dataclass(frozen=True)
class SpectralShift:
    """Absorption parameter and the shifted wavenumber k_eps = (k^{2s}+i eps)^{1/(2s)}."""

    epsilon: float
    k_eps: complex


def spectral_shift(problem, epsilon):
    """Build the SpectralShift for a problem, enforcing the first-quadrant
    admissibility arctan(eps / k^{2s}) < s pi (strict for eps > 0)."""
    if epsilon < 0.0:
        raise DomainError("negative absorption selects the incoming solution; not supported")
    if epsilon == 0.0:
        return SpectralShift(0.0, complex(problem.k))
    if not np.arctan2(epsilon, problem.k2s) < problem.s * np.pi:
        raise DomainError(
            f"inadmissible shift: arctan(eps/k^(2s)) = {np.arctan2(epsilon, problem.k2s):.6f} "
            f"is not < s*pi = {problem.s * np.pi:.6f}; k_eps leaves the open first quadrant")
    k_eps = (problem.k2s + 1j * epsilon) ** (1.0 / (2.0 * problem.s))
    return SpectralShift(float(epsilon), complex(k_eps))


def poly_P(X, kappa, s):
    """P(X, kappa) = X^2 + kappa^{4s} - 2 kappa^{2s} cos(s pi) X.

    Strictly positive: bounded below by kappa^{4s}(1 - cos^2(s pi)).
    """
    X = np.asarray(X, dtype=float)
    if np.any(X < 0.0):
        raise DomainError("poly_P requires X >= 0")
    if not kappa > 0.0:
        raise DomainError("poly_P requires kappa > 0")
    k2s = kappa ** (2.0 * s)
    out = X * X + k2s * k2s - 2.0 * k2s * np.cos(s * np.pi) * X
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Series coefficients for the removable singularities at r = kc
# ---------------------------------------------------------------------------

def _poly_mul(a, b, nmax):
    out = np.zeros(nmax + 1)
    for i, ai in enumerate(a[: nmax + 1]):
        jmax = nmax - i
        out[i: i + jmax + 1] += ai * b[: jmax + 1]
    return out


def _poly_inv(a, nmax):
    # power-series inverse, a[0] must be 1
    inv = np.zeros(nmax + 1)
    inv[0] = 1.0
    for k in range(1, nmax + 1):
        inv[k] = -np.dot(a[1: k + 1], inv[k - 1:: -1][: k])
    return inv


def _binom_series(alpha, nmax):
    # coefficients of (1+u)^alpha up to degree nmax
    c = np.ones(nmax + 1)
    for j in range(1, nmax + 1):
        c[j] = c[j - 1] * (alpha - (j - 1)) / j
    return c


@lru_cache(maxsize=64)
def _fm_window_coeffs(s, m):
    """Coefficients c_1.. of F_m(r,kc) = kc^{-2s}/(2s) * sum_j c_j u^{j-1},
    u = r/kc - 1."""
    nmax = _SERIES_TERMS + 1
    bs = _binom_series(2.0 * s, nmax + 1)
    a = bs[1:] / (2.0 * s)          # ((1+u)^{2s}-1)/(2 s u)
    b = _binom_series(2.0 * s * m, nmax)
    ab = _poly_mul(a, b, nmax)
    inv = _poly_inv(ab, nmax)
    d = (-0.5) ** np.arange(nmax + 1)   # 1/(1+u/2)
    c = inv - d
    return c[1:]


@lru_cache(maxsize=64)
def _m_window_coeffs(s):
    """Coefficients e_1.. of M(xi;z) = z^{2-2s}/(2s) * sum_j e_j u^{j-1},
    u = xi/z - 1."""
    nmax = _SERIES_TERMS + 1
    num = _binom_series(2.0 - 2.0 * s, nmax + 1) - _binom_series(2.0 * s, nmax + 1)
    bs = _binom_series(2.0 * s, nmax + 1)
    a = bs[1:] / (2.0 * s)
    inv_a = _poly_inv(a, nmax)
    e = _poly_mul(num[1:], inv_a, nmax)
    return e


def _poly_eval(coeffs, u):
    acc = np.zeros_like(u)
    for c in coeffs[::-1]:
        acc = acc * u + c
    return acc


def _poly_eval_deriv(coeffs, u):
    # d/du of sum_j coeffs[j-1] u^{j-1}
    acc = np.zeros_like(u)
    for j in range(len(coeffs) - 1, 0, -1):
        acc = acc * u + j * coeffs[j]
    return acc


# ---------------------------------------------------------------------------
# F_m and its LOW_INTEGER corrector variant
# ---------------------------------------------------------------------------

def _fm_direct(r, kc, s, m):
    t1 = kc ** (2.0 * s * m) / (r ** (2.0 * s * m) * (r ** (2.0 * s) - kc ** (2.0 * s)))
    t2 = kc ** (2.0 - 2.0 * s) / (s * (r * r - kc * kc))
    return t1 - t2


def F_m(r, kc, s, m):
    """Regularized spectral kernel F_m(r, kc); removable singularity at r = kc.

    Vectorized over r > 0; kc may be complex (closed first quadrant).
    """
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    if np.any(r <= 0.0):
        raise DomainError("F_m requires r > 0")
    out = np.empty(r.shape, dtype=complex)
    near = np.abs(r - kc) < TAYLOR_WINDOW * abs(kc)
    if np.any(~near):
        out[~near] = _fm_direct(r[~near].astype(complex), kc, s, m)
    if np.any(near):
        u = r[near] / kc - 1.0
        coeffs = _fm_window_coeffs(float(s), int(m))
        out[near] = kc ** (-2.0 * s) / (2.0 * s) * _poly_eval(coeffs, u.astype(complex))
    return complex(out[0]) if scalar else out


def dF_m_dr(r, kc, s, m):
    """Radial derivative of F_m, with the same Taylor window at r = kc."""
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    if np.any(r <= 0.0):
        raise DomainError("dF_m_dr requires r > 0")
    out = np.empty(r.shape, dtype=complex)
    near = np.abs(r - kc) < TAYLOR_WINDOW * abs(kc)
    if np.any(~near):
        rr = r[~near].astype(complex)
        r2s = rr ** (2.0 * s)
        k2s = kc ** (2.0 * s)
        t1 = -kc ** (2.0 * s * m) * (2.0 * s * m * (r2s - k2s) + 2.0 * s * r2s) \
            / (rr ** (2.0 * s * m + 1.0) * (r2s - k2s) ** 2)
        t2 = 2.0 * kc ** (2.0 - 2.0 * s) * rr / (s * (rr * rr - kc * kc) ** 2)
        out[~near] = t1 + t2
    if np.any(near):
        u = r[near] / kc - 1.0
        coeffs = _fm_window_coeffs(float(s), int(m))
        out[near] = kc ** (-2.0 * s) / (2.0 * s) * _poly_eval_deriv(coeffs, u.astype(complex)) / kc
    return complex(out[0]) if scalar else out


def _require_low_integer(s, m):
    reg = classify_regime(s)
    if reg.branch != LOW_INTEGER or reg.m != m:
        raise DomainError(
            f"F_tilde_m is defined only on the 1/(2s)-integer branch; got s={s}, m={m}")


def F_tilde_m(r, kc, s, m):
    """Corrected kernel F~_m = F_m + kc^{2-2s}/(r(r+kc)); LOW_INTEGER branch only.

    Identically zero (to round-off) at s = 1/2.
    """
    _require_low_integer(s, m)
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    corr = kc ** (2.0 - 2.0 * s) / (r_arr.astype(complex) * (r_arr + kc))
    base = np.atleast_1d(F_m(r_arr, kc, s, m))
    out = base + corr
    return complex(out[0]) if np.asarray(r).ndim == 0 else out


def dF_tilde_m_dr(r, kc, s, m):
    """Radial derivative of F~_m."""
    _require_low_integer(s, m)
    r_arr = np.atleast_1d(np.asarray(r, dtype=float)).astype(complex)
    dcorr = -kc ** (2.0 - 2.0 * s) * (1.0 / (r_arr ** 2 * (r_arr + kc))
                                      + 1.0 / (r_arr * (r_arr + kc) ** 2))
    base = np.atleast_1d(dF_m_dr(r_arr.real, kc, s, m))
    out = base + dcorr
    return complex(out[0]) if np.asarray(r).ndim == 0 else out


# ---------------------------------------------------------------------------
# Fourier multiplier M
# ---------------------------------------------------------------------------

def multiplier_M(xi, z, s):
    """M(xi; z) = (z^{2s} xi^{2-2s} - z^{2-2s} xi^{2s}) / (xi^{2s} - z^{2s}).

    Continuous across xi = |z| for real z, with limit (1-2s) k^{2-2s} / s.
    Vectorized over xi >= 0; z in the closed first quadrant, z != 0.
    """
    if z == 0:
        raise DomainError("multiplier_M requires z != 0")
    xi = np.asarray(xi, dtype=float)
    scalar = xi.ndim == 0
    xi = np.atleast_1d(xi)
    if np.any(xi < 0.0):
        raise DomainError("multiplier_M requires xi >= 0")
    z = complex(z)
    out = np.empty(xi.shape, dtype=complex)
    near = np.abs(xi - z) < TAYLOR_WINDOW * abs(z)
    far = ~near
    if np.any(far):
        x = xi[far].astype(complex)
        x2s = x ** (2.0 * s)
        # xi = 0: both numerator terms vanish (2-2s > 0, 2s > 0)
        num = z ** (2.0 * s) * x ** (2.0 - 2.0 * s) - z ** (2.0 - 2.0 * s) * x2s
        out[far] = num / (x2s - z ** (2.0 * s))
    if np.any(near):
        u = xi[near] / z - 1.0
        coeffs = _m_window_coeffs(float(s))
        out[near] = z ** (2.0 - 2.0 * s) / (2.0 * s) * _poly_eval(coeffs, u.astype(complex))
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Helmholtz parts
# ---------------------------------------------------------------------------

def _check_kc(kc):
    kc = complex(kc)
    if kc == 0 or kc.real < 0.0 or kc.imag < 0.0:
        raise DomainError(f"shifted wavenumber must lie in the closed first quadrant, got {kc}")
    return kc


def helm_part(n, s, kc, r):
    """Helmholtz component of the fundamental solution (per-dimension closed form)."""
    kc = _check_kc(kc)
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    if np.any(r <= 0.0):
        raise DomainError("helm_part requires r > 0")
    if n == 1:
        out = 1j * np.exp(1j * r * kc) / (2.0 * s * kc ** (2.0 * s - 1.0))
    elif n == 2:
        out = 1j * kc ** (2.0 - 2.0 * s) / (4.0 * s) * hankel1_0(kc * r)
    elif n == 3:
        out = kc ** (2.0 - 2.0 * s) / s * np.exp(1j * r * kc) / (4.0 * np.pi * r)
    else:
        raise DomainError(f"dimension must be 1, 2 or 3, got {n}")
    return complex(out[0]) if scalar else out


def helm_part_dr(n, s, kc, r):
    """Radial derivative of the Helmholtz component (closed forms)."""
    kc = _check_kc(kc)
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    if n == 1:
        out = -kc ** (2.0 - 2.0 * s) / (2.0 * s) * np.exp(1j * r * kc)
    elif n == 2:
        from .specfun import hankel1_1
        out = -1j * kc ** (3.0 - 2.0 * s) / (4.0 * s) * hankel1_1(kc * r)
    elif n == 3:
        out = kc ** (2.0 - 2.0 * s) / s * (1j * kc / r - 1.0 / r ** 2) \
            * np.exp(1j * r * kc) / (4.0 * np.pi)
    else:
        raise DomainError(f"dimension must be 1, 2 or 3, got {n}")
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Tail integrands
# ---------------------------------------------------------------------------

def _bracket_1d(y, c, s):
    # 1/(y^{2s} e^{i pi s} - c) - 1/(y^{2s} e^{-i pi s} - c)
    y2s = np.asarray(y, dtype=complex) ** (2.0 * s)
    ep = np.exp(1j * np.pi * s)
    return 1.0 / (y2s * ep - c) - 1.0 / (y2s / ep - c)


def _bracket_3d(y, c, s, m):
    # e^{i pi s m}/(y^{2s} e^{-i pi s} - c) - e^{-i pi s m}/(y^{2s} e^{i pi s} - c)
    y2s = np.asarray(y, dtype=complex) ** (2.0 * s)
    ep = np.exp(1j * np.pi * s)
    em = np.exp(1j * np.pi * s * m)
    return em / (y2s / ep - c) - 1.0 / (em * (y2s * ep - c))


def j_tail_integrand(n, s, m, kc, r, y):
    """Pointwise tail integrand at quadrature variable y > 0.

    For n = 1 and n = 3 this is the complete e^{-y}-weighted integrand of the
    scaled tail integral (prefactor included), so the tail equals
    ``int_0^inf j_tail_integrand dy``.  For n = 2 it is J0(y r) * y * F(y, kc)
    with F = F~_m on the LOW_INTEGER branch and F_m otherwise; the 1/(2 pi)
    prefactor of the Bessel transform is excluded.
    """
    kc = _check_kc(kc)
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    if np.any(y <= 0.0) or not r > 0.0:
        raise DomainError("j_tail_integrand requires y > 0 and r > 0")
    if n == 2:
        if classify_regime(s).branch == LOW_INTEGER:
            fv = F_tilde_m(y, kc, s, m)
        else:
            fv = F_m(y, kc, s, m)
        out = bessel_j0(y * r) * y * np.atleast_1d(fv)
    else:
        c = kc ** (2.0 * s) * r ** (2.0 * s)
        if n == 1:
            pref = 1j / (2.0 * np.pi * r ** (1.0 - 2.0 * s))
            out = pref * np.exp(-y) * _bracket_1d(y, c, s)
        elif n == 3:
            pref = kc ** (2.0 * s * m) / (4j * np.pi ** 2 * r ** (3.0 - 2.0 * s * (m + 1.0)))
            out = pref * np.exp(-y) * y ** (1.0 - 2.0 * s * m) * _bracket_3d(y, c, s, m)
        else:
            raise DomainError(f"dimension must be 1, 2 or 3, got {n}")
    return complex(out[0]) if scalar else out
