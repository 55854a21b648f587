"""
Grid Models

Value types for the uniform periodic discretization of the circle. They are
immutable after construction (the numpy buffers are flagged read-only) and
can be shared freely between threads.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

CIRCLE_LENGTH = 2.0 * math.pi
MIN_POINTS = 8


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """
    Uniform periodic grid on [0, 2*pi) with ``n`` points.

    Attributes:
        n (int): point count, a power of two and at least 8
    """

    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise ValueError(f"n must be an integer, got {self.n!r}")
        if self.n < MIN_POINTS or not is_power_of_two(int(self.n)):
            raise ValueError(f"n must be a power of two >= {MIN_POINTS}, got {self.n}")

    @property
    def length(self) -> float:
        return CIRCLE_LENGTH

    @property
    def dx(self) -> float:
        return CIRCLE_LENGTH / self.n

    @cached_property
    def points(self) -> np.ndarray:
        x = CIRCLE_LENGTH * np.arange(self.n) / self.n
        x.flags.writeable = False
        return x

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavenumbers in FFT order; the Nyquist mode is reported as +n/2."""
        k = np.fft.fftfreq(self.n, d=1.0 / self.n)
        k[self.n // 2] = self.n // 2
        k.flags.writeable = False
        return k

    @cached_property
    def rfft_wavenumbers(self) -> np.ndarray:
        k = np.arange(self.n // 2 + 1, dtype=float)
        k.flags.writeable = False
        return k

    def sample(self, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        """Evaluate ``fn`` on the grid points."""
        return GridFunction(self, fn(self.points))

    def constant(self, value: float) -> "GridFunction":
        return GridFunction(self, np.full(self.n, float(value)))

    def refined(self, factor: int) -> "Grid":
        return Grid(self.n * factor)


@dataclass(frozen=True)
class GridFunction:
    """
    Real samples of a periodic function on a Grid.

    Carrier for u, theta and w. Values must be finite.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise ValueError(
                f"values must have shape ({self.grid.n},), got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("GridFunction values must be finite (no NaN/Inf)")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.grid.n

    def like(self, values: np.ndarray) -> "GridFunction":
        """New GridFunction on the same grid."""
        return GridFunction(self.grid, values)

    def scaled(self, factor: float) -> "GridFunction":
        return self.like(self.values * factor)

    def shifted(self, offset: float) -> "GridFunction":
        return self.like(self.values + offset)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _check_same_grid(self, other)
        return self.like(self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _check_same_grid(self, other)
        return self.like(self.values - other.values)


@dataclass(frozen=True)
class SpectrumField:
    """
    Fourier coefficients of a GridFunction, normalized so that
    u_hat(k) = (1/2pi) * integral of u(x) exp(-ikx) dx.

    ``coefficients`` are stored in FFT order, aligned with ``grid.wavenumbers``.
    """

    grid: Grid
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        coefficients = np.array(self.coefficients, dtype=complex)
        if coefficients.shape != (self.grid.n,):
            raise ValueError(
                f"coefficients must have shape ({self.grid.n},), got {coefficients.shape}"
            )
        coefficients.flags.writeable = False
        object.__setattr__(self, "coefficients", coefficients)

    @property
    def wavenumbers(self) -> np.ndarray:
        return self.grid.wavenumbers

    def coefficient(self, k: int) -> complex:
        """Coefficient at integer wavenumber k in {-n/2+1, ..., n/2}."""
        half = self.grid.n // 2
        if not -half < k <= half:
            raise IndexError(f"wavenumber {k} outside (-{half}, {half}]")
        return complex(self.coefficients[k % self.grid.n])

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        c = self.coefficients
        scale = max(float(np.max(np.abs(c))), 1.0)
        mirrored = np.conj(np.roll(c[::-1], 1))
        half = self.grid.n // 2
        # the Nyquist slot has no distinct partner
        mask = np.ones(self.grid.n, dtype=bool)
        mask[half] = False
        return bool(np.max(np.abs(c - mirrored)[mask]) <= tol * scale)


def _check_same_grid(a: GridFunction, b: GridFunction) -> None:
    if a.grid != b.grid:
        raise ValueError(f"grid mismatch: n={a.grid.n} vs n={b.grid.n}")
