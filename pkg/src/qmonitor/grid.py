"""Uniform spatial grid, wavefunction samples on it, and state constructors."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .core import ConfigError, ContainmentError, DoublePeakStart, GaussianStart

MIN_POINTS = 256
RESOLUTION = 8  # grid points per initial width


@dataclass(frozen=True)
class Grid:
    """Symmetric domain ``[x_min, x_max]`` sampled at ``n_points`` (endpoints included)."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_max > 0 or not np.isclose(self.x_min, -self.x_max, rtol=1e-12, atol=0):
            raise ConfigError(f"grid must be symmetric about 0, got [{self.x_min}, {self.x_max}]")
        if self.n_points < MIN_POINTS:
            raise ConfigError(f"grid needs at least {MIN_POINTS} points, got {self.n_points}")

    @classmethod
    def symmetric(cls, x_max, n_points):
        return cls(-float(x_max), float(x_max), int(n_points))

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @cached_property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @cached_property
    def k(self):
        """Angular wavenumbers in FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.n_points, self.dx)

    def check_fits(self, half_extent, sigma):
        if half_extent > self.x_max:
            raise ConfigError(
                f"grid half-width {self.x_max} too small: state needs {half_extent:.6g}")
        if self.dx > sigma / RESOLUTION:
            raise ConfigError(
                f"grid spacing {self.dx:.4g} does not resolve width {sigma}: need <= {sigma / RESOLUTION:.4g}")


class Moments(NamedTuple):
    norm2: float
    mean: float
    second_moment: float
    width: float


@dataclass
class GridState:
    grid: Grid
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.grid.n_points,):
            raise ConfigError("amplitude array does not match the grid")

    @property
    def density(self):
        return np.abs(self.amplitudes) ** 2

    def norm2(self) -> float:
        return float(np.trapezoid(self.density, dx=self.grid.dx))

    def normalized(self) -> "GridState":
        n2 = self.norm2()
        if not n2 > 0:
            raise ContainmentError("cannot normalize a null state", module="grid")
        return GridState(self.grid, self.amplitudes / np.sqrt(n2))

    def moments(self) -> Moments:
        return moments(self)

    def copy(self):
        return GridState(self.grid, self.amplitudes.copy())

    def rows(self):
        psi = self.amplitudes
        return zip(self.grid.x, psi.real, psi.imag, np.abs(psi) ** 2)


def moments(state: GridState) -> Moments:
    """Norm, mean, second moment and width by trapezoidal quadrature.

    The width is ``sqrt(2 <x^2> - 2 <x>^2)``, so a Gaussian with density
    proportional to ``exp(-x^2/sigma^2)`` reports ``sigma``.
    """
    x, dx, rho = state.grid.x, state.grid.dx, state.density
    n2 = float(np.trapezoid(rho, dx=dx))
    if not n2 > 0:
        raise ContainmentError("state has zero norm", module="grid")
    mean = float(np.trapezoid(x * rho, dx=dx)) / n2
    second = float(np.trapezoid(x * x * rho, dx=dx)) / n2
    var = max(second - mean * mean, 0.0)
    return Moments(n2, mean, second, float(np.sqrt(2 * var)))


def init_gaussian(grid: Grid, sigma: float, x0: float = 0.0) -> GridState:
    """Normalized Gaussian ``(pi sigma^2)^(-1/4) exp(-(x-x0)^2 / 2 sigma^2)``."""
    if not sigma > 0:
        raise ConfigError("sigma must be positive")
    grid.check_fits(abs(x0) + 6 * sigma, sigma)
    psi = np.exp(-((grid.x - x0) ** 2) / (2 * sigma ** 2)) / (np.pi * sigma ** 2) ** 0.25
    return GridState(grid, psi).normalized()


def init_double_peak(grid: Grid, sigma_p: float = 1.0, x0: float = 3.0) -> GridState:
    """Even superposition of two Gaussians centred at ``+x0`` and ``-x0``."""
    if not (sigma_p > 0 and x0 > 0):
        raise ConfigError("double peak needs sigma_p > 0 and x0 > 0")
    grid.check_fits(x0 + 6 * sigma_p, sigma_p)
    x = grid.x
    psi = np.exp(-((x - x0) ** 2) / (2 * sigma_p ** 2)) + np.exp(-((x + x0) ** 2) / (2 * sigma_p ** 2))
    return GridState(grid, psi).normalized()


def initial_state(grid, descriptor) -> GridState:
    if isinstance(descriptor, GaussianStart):
        return init_gaussian(grid, descriptor.sigma)
    if isinstance(descriptor, DoublePeakStart):
        return init_double_peak(grid, descriptor.sigma_p, descriptor.x0)
    raise ConfigError(f"unknown initial state {descriptor!r}")
