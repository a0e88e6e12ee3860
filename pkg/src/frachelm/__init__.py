"""Outgoing fundamental solutions and scattering for the fractional Helmholtz
operator (-Laplacian)^s - k^{2s} in dimensions 1-3."""

__version__ = "0.1.0"

from .errors import AccuracyError, DomainError, NearResonanceError
from .kernels import Problem, Regime, SpectralShift, classify_regime, spectral_shift
from .green import (
    GreenDecomposition, green_closed_form_3d_half, green_eval, green_eval_batch,
    green_radial_derivative, src_residual,
)
from .oracle import fourier_invert
from .quadrature import QuadratureSpec, QuadResult
from .scattering import (
    IncidentField, NystromSystem, PotentialGrid, ScatterSolution, born_approx,
    build_nystrom, eval_scattered, resonance_scan, solve_ls,
)

__all__ = [
    "AccuracyError", "DomainError", "NearResonanceError",
    "Problem", "Regime", "SpectralShift", "classify_regime", "spectral_shift",
    "GreenDecomposition", "green_closed_form_3d_half", "green_eval",
    "green_eval_batch", "green_radial_derivative", "src_residual",
    "fourier_invert", "QuadratureSpec", "QuadResult",
    "IncidentField", "NystromSystem", "PotentialGrid", "ScatterSolution",
    "born_approx", "build_nystrom", "eval_scattered", "resonance_scan", "solve_ls",
    "__version__",
]
