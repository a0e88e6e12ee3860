"""Self-contained special functions used by the Green's-function formulas.

Everything here is evaluated from first principles (power series near the
origin, Hankel asymptotic expansions at large argument, and a contour-type
integral representation in between), so the library carries no special-function
dependency.  The crossover radii are validated by overlap-band tests.

Branch convention: all complex powers/logs are principal, with the cut on
(-inf, 0].  Arguments on the cut raise :class:`DomainError`.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

EULER_GAMMA = 0.5772156649015328606

# Crossover radii between evaluation regimes.  Chosen so series round-off and
# truncated-asymptotic error are both below ~1e-13 on the overlap band.
_ASYM_RADIUS = 14.0
_SERIES_IM_MAX = 2.5      # above this the J0+iY0 combination cancels too hard
_SERIES_TERMS = 48
_ASYM_TERMS = 16

_HARMONIC = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, _SERIES_TERMS + 2))])

# Lanczos coefficients, g = 7.
_LANCZOS_G = 7.0
_LANCZOS_C = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])


def gamma_fn(x):
    """Gamma function for real x > 0 (Lanczos approximation)."""
    x = float(x)
    if not x > 0.0 or not np.isfinite(x):
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    z = x - 1.0
    acc = _LANCZOS_C[0]
    for i in range(1, len(_LANCZOS_C)):
        acc += _LANCZOS_C[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return np.sqrt(2.0 * np.pi) * t ** (z + 0.5) * np.exp(-t) * acc


def riesz_constant(n, s, j):
    """Riesz-potential constant c_{n,j} = Gamma(n/2 - s(j+1)) / (4^{s(j+1)} pi^{n/2} Gamma(s(j+1))).

    Defined when 0 < s(j+1) < n/2, which holds for every term retained by the
    m-selection rule.
    """
    if n not in (1, 2, 3):
        raise DomainError(f"dimension must be 1, 2 or 3, got {n}")
    if j < 0 or int(j) != j:
        raise DomainError(f"index j must be a nonnegative integer, got {j}")
    a = s * (j + 1)
    if not (0.0 < a < 0.5 * n):
        raise DomainError(f"riesz_constant needs 0 < s(j+1) < n/2; got s(j+1)={a}, n={n}")
    return gamma_fn(0.5 * n - a) / (4.0 ** a * np.pi ** (0.5 * n) * gamma_fn(a))


# ---------------------------------------------------------------------------
# Bessel functions of order 0 and 1 (series region)
# ---------------------------------------------------------------------------

def _j0_series(z):
    q = -0.25 * z * z
    term = np.ones_like(q)
    acc = np.ones_like(q)
    for j in range(1, _SERIES_TERMS):
        term = term * q / (j * j)
        acc = acc + term
    return acc


def _y0_series(z):
    # (2/pi)[(ln(z/2)+gamma) J0 + sum_{j>=1} (-1)^{j+1} H_j (z^2/4)^j / (j!)^2]
    q = 0.25 * z * z
    term = np.ones_like(q)
    acc = np.zeros_like(q)
    for j in range(1, _SERIES_TERMS):
        term = term * q / (j * j)
        sgn = -1.0 if (j % 2 == 0) else 1.0
        acc = acc + sgn * _HARMONIC[j] * term
    return (2.0 / np.pi) * ((np.log(0.5 * z) + EULER_GAMMA) * _j0_series(z) + acc)


def _j1_series(z):
    q = -0.25 * z * z
    term = np.ones_like(q)
    acc = np.ones_like(q)
    for j in range(1, _SERIES_TERMS):
        term = term * q / (j * (j + 1.0))
        acc = acc + term
    return 0.5 * z * acc


def _y1_series(z):
    # DLMF 10.8.1 specialized to order 1.
    q = -0.25 * z * z
    term = np.ones_like(q)
    acc = (_HARMONIC[0] + _HARMONIC[1] - 2.0 * EULER_GAMMA) * term
    for j in range(1, _SERIES_TERMS):
        term = term * q / (j * (j + 1.0))
        acc = acc + (_HARMONIC[j] + _HARMONIC[j + 1] - 2.0 * EULER_GAMMA) * term
    return (2.0 / np.pi) * np.log(0.5 * z) * _j1_series(z) - (2.0 / np.pi) / z \
        - (0.5 * z / np.pi) * acc


# ---------------------------------------------------------------------------
# Hankel asymptotic expansions, |z| large, -pi < arg z < 2 pi
# ---------------------------------------------------------------------------

def _hankel_asym_coeffs(nu):
    # a_k(nu) = prod_{j=1..k} (4 nu^2 - (2j-1)^2) / (k! 8^k)
    mu = 4.0 * nu * nu
    coeffs = [1.0]
    a = 1.0
    for k in range(1, _ASYM_TERMS):
        a *= (mu - (2 * k - 1) ** 2) / (k * 8.0)
        coeffs.append(a)
    return np.array(coeffs)


_A0 = _hankel_asym_coeffs(0)
_A1 = _hankel_asym_coeffs(1)


def _hankel1_asym(z, nu):
    coeffs = _A0 if nu == 0 else _A1
    acc = np.zeros_like(z)
    zinv = 1.0 / z
    p = np.ones_like(z)
    for k in range(_ASYM_TERMS):
        acc = acc + coeffs[k] * (1j ** k) * p
        p = p * zinv
    phase = z - 0.5 * nu * np.pi - 0.25 * np.pi
    return np.sqrt(2.0 / (np.pi * z)) * np.exp(1j * phase) * acc


def _hankel2_asym(z, nu):
    coeffs = _A0 if nu == 0 else _A1
    acc = np.zeros_like(z)
    zinv = 1.0 / z
    p = np.ones_like(z)
    for k in range(_ASYM_TERMS):
        acc = acc + coeffs[k] * ((-1j) ** k) * p
        p = p * zinv
    phase = z - 0.5 * nu * np.pi - 0.25 * np.pi
    return np.sqrt(2.0 / (np.pi * z)) * np.exp(-1j * phase) * acc


# ---------------------------------------------------------------------------
# Real-argument J0 / Y0 / J1 / Y1 (vectorized; quadrature hot path)
# ---------------------------------------------------------------------------

def _real_bessel(x, nu, kind):
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(x < 0.0):
        raise DomainError("negative argument; callers must pass |x|")
    out = np.empty_like(x)
    small = x < _ASYM_RADIUS
    if np.any(small):
        xs = x[small]
        if kind == "j":
            out[small] = (_j0_series(xs) if nu == 0 else _j1_series(xs))
        else:
            if np.any(xs == 0.0):
                raise DomainError("Y_nu is singular at 0")
            out[small] = (_y0_series(xs) if nu == 0 else _y1_series(xs))
    if np.any(~small):
        h = _hankel1_asym(x[~small].astype(complex), nu)
        out[~small] = h.real if kind == "j" else h.imag
    return float(out[0]) if scalar else out


def bessel_j0(x):
    """Bessel function J0 for real x >= 0 (scalar or ndarray)."""
    return _real_bessel(x, 0, "j")


def bessel_y0(x):
    """Bessel function Y0 for real x > 0 (scalar or ndarray)."""
    return _real_bessel(x, 0, "y")


def bessel_j1(x):
    """Bessel function J1 for real x >= 0 (scalar or ndarray)."""
    return _real_bessel(x, 1, "j")


def bessel_y1(x):
    """Bessel function Y1 for real x > 0 (scalar or ndarray)."""
    return _real_bessel(x, 1, "y")


# ---------------------------------------------------------------------------
# Hankel functions of complex argument
# ---------------------------------------------------------------------------

def _check_off_cut(z, name):
    z = np.asarray(z, dtype=complex)
    if np.any((z.real <= 0.0) & (z.imag == 0.0)):
        raise DomainError(f"{name} is not defined on the branch cut (-inf, 0]")
    return z


def _hankel1_cosh_integral(z, nu):
    # H0^(1)(z) = (2/(i pi)) int_0^inf e^{i z cosh t} dt,  Im z > 0.
    # H1^(1)(z) = -(2/pi)    int_0^inf e^{i z cosh t} cosh t dt.
    im = z.imag
    t_max = np.arccosh(1.0 + 46.0 / im)
    # panel count follows the total phase swing along the path
    cycles = (abs(z.real) * np.sinh(t_max) + im * (np.cosh(t_max) - 1.0)) / (2.0 * np.pi)
    npan = max(12, int(4 * cycles) + 4)
    xg, wg = np.polynomial.legendre.leggauss(16)
    edges = np.linspace(0.0, t_max, npan + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    t = (mid + half * xg[None, :]).ravel()
    w = (half * wg[None, :]).ravel()
    ch = np.cosh(t)
    core = np.exp(1j * z * ch)
    if nu == 0:
        return (2.0 / (1j * np.pi)) * np.sum(w * core)
    return -(2.0 / np.pi) * np.sum(w * core * ch)


def _hankel1_scalar(z, nu):
    if abs(z) >= _ASYM_RADIUS:
        return complex(_hankel1_asym(np.complex128(z), nu))
    if z.imag > _SERIES_IM_MAX:
        return _hankel1_cosh_integral(z, nu)
    if z.imag < -_SERIES_IM_MAX:
        # reflection through H^(2): H1(z) = 2 J(z) - conj(H1(conj z))
        jv = _j0_series(np.complex128(z)) if nu == 0 else _j1_series(np.complex128(z))
        return 2.0 * complex(jv) - np.conj(_hankel1_scalar(np.conj(z), nu))
    if nu == 0:
        return complex(_j0_series(np.complex128(z)) + 1j * _y0_series(np.complex128(z)))
    return complex(_j1_series(np.complex128(z)) + 1j * _y1_series(np.complex128(z)))


def _hankel1(z, nu):
    z = _check_off_cut(z, "hankel1")
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty(z.shape, dtype=complex)
    big = np.abs(z) >= _ASYM_RADIUS
    if np.any(big):
        out[big] = _hankel1_asym(z[big], nu)
    series = ~big & (np.abs(z.imag) <= _SERIES_IM_MAX)
    if np.any(series):
        zs = z[series]
        if nu == 0:
            out[series] = _j0_series(zs) + 1j * _y0_series(zs)
        else:
            out[series] = _j1_series(zs) + 1j * _y1_series(zs)
    rest = ~big & ~series
    for idx in np.flatnonzero(rest):
        out[idx] = _hankel1_scalar(complex(z[idx]), nu)
    return complex(out[0]) if scalar else out


def hankel1_0(z):
    """Hankel function H0^(1)(z) = J0(z) + i Y0(z) on C \\ (-inf, 0]."""
    return _hankel1(z, 0)


def hankel1_1(z):
    """Hankel function H1^(1)(z) = -d/dz H0^(1)(z), used for radial derivatives."""
    return _hankel1(z, 1)


def hankel2_0(x):
    """H0^(2) for real x > 0 (incoming-wave test helper)."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("hankel2_0 helper requires real x > 0")
    return np.conj(_hankel1(x.astype(complex), 0))


# ---------------------------------------------------------------------------
# Zeros of J0, used by the oscillatory quadrature partitions
# ---------------------------------------------------------------------------

_J0_ZEROS_CACHE: list[float] = []


def j0_zeros(count):
    """First `count` positive zeros of J0 (McMahon start + Newton polish)."""
    while len(_J0_ZEROS_CACHE) < count:
        ell = len(_J0_ZEROS_CACHE) + 1
        beta = (ell - 0.25) * np.pi
        x = beta + 1.0 / (8.0 * beta) - 31.0 / (384.0 * beta ** 3)
        for _ in range(4):
            x += bessel_j0(x) / bessel_j1(x)  # J0' = -J1
        _J0_ZEROS_CACHE.append(float(x))
    return np.array(_J0_ZEROS_CACHE[:count])


# ---------------------------------------------------------------------------
# Struve functions of the second kind, K0(z) = (2/pi) int_0^inf J0(t)/(t+z) dt
# ---------------------------------------------------------------------------

_GL24 = np.polynomial.legendre.leggauss(24)
_STRUVE_INTERVALS = 48


def _averaged_tail(partials):
    t = np.asarray(partials, dtype=complex)
    while t.size > 1:
        t = 0.5 * (t[:-1] + t[1:])
    return complex(t[0])


def _struve_integral(z, power):
    """int_0^inf J0(t) / (t+z)^power dt by J0-zero partition + iterated averaging."""
    xg, wg = _GL24
    zeros = j0_zeros(_STRUVE_INTERVALS)

    def panel(a, b):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        t = mid + half * xg
        return half * np.sum(wg * bessel_j0(t) / (t + z) ** power)

    # head [0, j_{0,1}]: grade toward 0 when |z| is small so 1/(t+z)^p is resolved
    head = 0.0
    edges = [0.0]
    scale = min(abs(z), zeros[0])
    if scale < zeros[0] / 4.0:
        g = scale / 8.0
        while g < zeros[0] / 4.0:
            edges.append(g)
            g *= 2.0
    edges.append(zeros[0])
    for a, b in zip(edges[:-1], edges[1:]):
        head += panel(a, b)

    partials = []
    acc = head
    for a, b in zip(zeros[:-1], zeros[1:]):
        acc = acc + panel(a, b)
        partials.append(acc)
    return _averaged_tail(partials)


def struve_k0(z):
    """Struve function of the second kind of order zero on C \\ (-inf, 0]."""
    z = complex(np.asarray(z, dtype=complex))
    _check_off_cut(z, "struve_k0")
    return (2.0 / np.pi) * _struve_integral(z, 1)


def struve_k1(z):
    """Order-one companion, defined through d/dz K0(z) = 2/pi - K1(z)."""
    z = complex(np.asarray(z, dtype=complex))
    _check_off_cut(z, "struve_k1")
    return 2.0 / np.pi + (2.0 / np.pi) * _struve_integral(z, 2)


# ---------------------------------------------------------------------------
# Exponential integral E1
# ---------------------------------------------------------------------------

_E1_SERIES_RADIUS = 3.0


def expint_e1(z):
    """Principal-branch exponential integral E1(z), z != 0, z not in (-inf, 0]."""
    z = complex(np.asarray(z, dtype=complex))
    if z == 0:
        raise DomainError("expint_e1 is singular at 0")
    _check_off_cut(z, "expint_e1")
    if abs(z) <= _E1_SERIES_RADIUS:
        # E1 = -gamma - ln z + sum_{k>=1} (-1)^{k+1} z^k / (k k!)
        acc = 0.0 + 0.0j
        term = 1.0 + 0.0j
        for k in range(1, 120):
            term *= -z / k
            delta = -term / k
            acc += delta
            if abs(delta) < 1e-18 * (1.0 + abs(acc)):
                break
        return -EULER_GAMMA - np.log(z) + acc
    # modified-Lentz continued fraction: E1 = e^{-z} / (z + 1 - 1/(z+3 - 4/(z+5 - ...)))
    tiny = 1e-300
    b = z + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 400):
        a = -(i * i)
        b += 2.0
        d = a * d + b
        if d == 0:
            d = tiny
        c = b + a / c
        if c == 0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * np.exp(-z)
