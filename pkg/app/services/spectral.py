"""
Spectral Service

Transforms, differentiation, quadrature and the norms used by every
functional in the package. All functions are pure: they read GridFunctions
and return new ones.

Fourier convention: u_hat(k) = (1/2pi) * integral of u(x) exp(-ikx) dx,
realized as fft(values) / n. Odd-order multipliers (odd derivatives and the
Hilbert transform) zero the Nyquist mode.
"""

import logging
from typing import Tuple

import numpy as np

from app.models.grid import Grid, GridFunction, SpectrumField, is_power_of_two

# Configure logging
logger = logging.getLogger(__name__)

SUPPORTED_DERIVATIVE_ORDERS = (1, 2, 3, 4)


# --------------------------------------------------------------------------
# Transforms
# --------------------------------------------------------------------------

def to_spectrum(f: GridFunction) -> SpectrumField:
    """Discrete Fourier coefficients of f under the 1/2pi normalization."""
    return SpectrumField(f.grid, np.fft.fft(f.values) / f.n)


def from_spectrum(s: SpectrumField) -> GridFunction:
    """Inverse of to_spectrum; the imaginary residue of a real field is dropped."""
    values = np.fft.ifft(s.coefficients * s.grid.n)
    return GridFunction(s.grid, values.real)


def _apply_real_multiplier(f: GridFunction, multiplier: np.ndarray) -> np.ndarray:
    """Apply a Fourier multiplier given on the rfft half-spectrum k = 0..n/2."""
    coeffs = np.fft.rfft(f.values)
    return np.fft.irfft(coeffs * multiplier, n=f.n)


# --------------------------------------------------------------------------
# Differentiation
# --------------------------------------------------------------------------

def _derivative_multiplier(grid: Grid, order: int) -> np.ndarray:
    k = grid.rfft_wavenumbers
    multiplier = (1j * k) ** order
    if order % 2 == 1:
        multiplier[-1] = 0.0
    return multiplier


def derivative(f: GridFunction, order: int = 1) -> GridFunction:
    """
    Spectral derivative of the given order.

    Args:
        f (GridFunction): periodic samples
        order (int): 1, 2, 3 or 4

    Returns:
        GridFunction: d^order f / dx^order
    """
    if order not in SUPPORTED_DERIVATIVE_ORDERS:
        raise ValueError(f"derivative order must be one of {SUPPORTED_DERIVATIVE_ORDERS}, got {order}")
    return f.like(_apply_real_multiplier(f, _derivative_multiplier(f.grid, order)))


def derivative_pair(f: GridFunction) -> Tuple[np.ndarray, np.ndarray]:
    """First and second spectral derivatives from a single forward transform."""
    coeffs = np.fft.rfft(f.values)
    first = np.fft.irfft(coeffs * _derivative_multiplier(f.grid, 1), n=f.n)
    second = np.fft.irfft(coeffs * _derivative_multiplier(f.grid, 2), n=f.n)
    return first, second


def fd_derivative(f: GridFunction) -> GridFunction:
    """Second-order central difference with periodic wraparound."""
    v = f.values
    return f.like((np.roll(v, -1) - np.roll(v, 1)) / (2.0 * f.grid.dx))


# --------------------------------------------------------------------------
# Quadrature and norms
# --------------------------------------------------------------------------

def quadrature(f: GridFunction) -> float:
    """Periodic trapezoid rule; exact for trig polynomials of degree < n/2."""
    return float(f.grid.dx * np.sum(f.values))


def mean(f: GridFunction) -> float:
    return quadrature(f) / f.grid.length


def norm_l1(f: GridFunction) -> float:
    return float(f.grid.dx * np.sum(np.abs(f.values)))


def norm_l2(f: GridFunction) -> float:
    return float(np.sqrt(f.grid.dx * np.sum(f.values ** 2)))


def norm_linf(f: GridFunction) -> float:
    return float(np.max(np.abs(f.values)))


def min_value(f: GridFunction) -> float:
    return float(np.min(f.values))


def max_value(f: GridFunction) -> float:
    return float(np.max(f.values))


def w11_seminorm(f: GridFunction) -> float:
    """Homogeneous W^{1,1} seminorm: integral of |f'|."""
    return norm_l1(derivative(f, 1))


def wiener_norm(f: GridFunction, alpha: float) -> float:
    """
    Wiener-algebra norm sum_k |k|^alpha |f_hat(k)| over the represented
    wavenumbers, with 0^0 = 1 for the constant mode of A^0.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    s = to_spectrum(f)
    weights = np.abs(s.wavenumbers) ** alpha
    return float(np.sum(weights * np.abs(s.coefficients)))


# --------------------------------------------------------------------------
# Fourier multipliers
# --------------------------------------------------------------------------

def heat_mollify(f: GridFunction, kappa: float) -> GridFunction:
    """Convolution with the periodic heat kernel at time kappa (multiplier exp(-kappa k^2))."""
    if kappa <= 0:
        raise ValueError(f"kappa must be > 0, got {kappa}")
    k = f.grid.rfft_wavenumbers
    return f.like(_apply_real_multiplier(f, np.exp(-kappa * k ** 2)))


def hilbert(f: GridFunction) -> GridFunction:
    """Periodic Hilbert transform, multiplier -i*sign(k); constants map to zero."""
    k = f.grid.rfft_wavenumbers
    multiplier = -1j * np.sign(k)
    multiplier[-1] = 0.0
    return f.like(_apply_real_multiplier(f, multiplier))


def refine(f: GridFunction, factor: int) -> GridFunction:
    """
    Band-limited interpolation onto a grid ``factor`` times finer.

    The Nyquist coefficient is split evenly between +n/2 and -n/2 so the
    interpolant is the real trigonometric one.
    """
    if factor == 1:
        return f
    if not is_power_of_two(factor):
        raise ValueError(f"refinement factor must be a power of two, got {factor}")
    fine = f.grid.refined(factor)
    coeffs = np.fft.rfft(f.values)
    padded = np.zeros(fine.n // 2 + 1, dtype=complex)
    half = f.n // 2
    padded[:half] = coeffs[:half]
    padded[half] = 0.5 * coeffs[half]
    values = np.fft.irfft(padded, n=fine.n) * factor
    return GridFunction(fine, values)
