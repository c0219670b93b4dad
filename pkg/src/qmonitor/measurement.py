"""
Applying a measurement to a grid state and estimating the effective
uncertainty from the distribution of constant readouts ``eps``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from .core import ConfigError, MeasurementSpec, NumericalError, Oscillator, UnitSystem, critical_time
from .grid import GridState
from .propagator import DEFAULT_PARAMS, DEFAULT_UNITS, EvolutionParams, evolve_measured, evolve_measured_batch

EPS_POINTS = 61
EPS_SPAN = 5.0
MIN_EPS_POINTS = 41
TAIL_TOL = 1e-6
IMPULSIVE_RATIO = 1e-3  # tau / tau_c below which "auto" uses the impulsive path


class CoverageError(NumericalError):
    """The readout grid does not contain the distribution."""


@dataclass
class ReadoutDistribution:
    epsilons: np.ndarray
    weights: np.ndarray
    normalization: float

    @property
    def density(self):
        return self.weights / self.normalization

    def mean(self):
        return float(np.trapezoid(self.epsilons * self.weights, self.epsilons)) / self.normalization

    def fit_gaussian(self):
        """Least-squares fit of ``A exp(-(eps - mu)^2 / w^2)`` to the density.

        Returns ``(w, mu, residual)`` with the residual the largest absolute
        deviation relative to the peak density.
        """
        p = self.density
        peak = p.max()

        def model(e, a, mu, w):
            return a * np.exp(-((e - mu) ** 2) / w ** 2)

        guess = (peak, self.mean(), effective_uncertainty_numeric(self) or 1.0)
        with warnings.catch_warnings():
            # an exact fit leaves the covariance undefined; only the parameters are used
            warnings.simplefilter("ignore", OptimizeWarning)
            (a, mu, w), _ = curve_fit(model, self.epsilons, p, p0=guess)
        resid = float(np.max(np.abs(model(self.epsilons, a, mu, w) - p)) / peak)
        return abs(w), mu, resid

    def rows(self):
        return zip(self.epsilons, self.density)


def default_eps_grid(state: GridState, delta_a: float, n=EPS_POINTS, span=EPS_SPAN):
    """Readout grid centred on the state mean spanning ``span sqrt(width^2 + delta_a^2)``."""
    mom = state.moments()
    half = span * np.sqrt(mom.width ** 2 + delta_a ** 2)
    return np.linspace(mom.mean - half, mom.mean + half, n)


def impulsive_collapse(state: GridState, delta_a: float, epsilon: float = 0.0) -> GridState:
    """Multiply by the amplitude window ``exp(-(x - eps)^2 / 2 delta_a^2)`` and renormalize."""
    if not delta_a > 0:
        raise ConfigError("delta_a must be positive")
    if np.isinf(delta_a):
        return state.copy()
    window = np.exp(-((state.grid.x - epsilon) ** 2) / (2 * delta_a ** 2))
    return GridState(state.grid, state.amplitudes * window).normalized()


def choose_path(state, osc, meas, units=DEFAULT_UNITS, path="auto"):
    if path not in ("auto", "impulsive", "finite"):
        raise ConfigError(f"unknown measurement path {path!r}")
    if path == "finite" and meas.impulsive:
        raise ConfigError("finite-duration path needs tau > 0")
    if path != "auto":
        return path
    if meas.impulsive:
        return "impulsive"
    tau_c = critical_time(units, osc, state.moments().width, meas.delta_a)
    return "impulsive" if meas.tau / tau_c < IMPULSIVE_RATIO else "finite"


def readout_distribution(state: GridState, osc: Oscillator, meas: MeasurementSpec, eps_grid=None,
                         params: EvolutionParams = DEFAULT_PARAMS, units: UnitSystem = DEFAULT_UNITS,
                         path="auto") -> ReadoutDistribution:
    """Unnormalized probability weights of constant readouts.

    The impulsive path integrates the density against
    ``exp(-(x - eps)^2 / delta_a^2)``; the finite path uses the squared norm
    of each measured branch after ``tau``.
    """
    if eps_grid is None:
        eps_grid = default_eps_grid(state, meas.delta_a)
    eps = np.asarray(eps_grid, dtype=float)
    if eps.ndim != 1 or eps.size < MIN_EPS_POINTS:
        raise ConfigError(f"readout grid needs at least {MIN_EPS_POINTS} points")
    if choose_path(state, osc, meas, units, path) == "impulsive":
        x, rho = state.grid.x, state.density
        kernel = np.exp(-((eps[:, None] - x[None, :]) ** 2) / meas.delta_a ** 2)
        weights = np.trapezoid(kernel * rho[None, :], dx=state.grid.dx, axis=-1)
    else:
        branches = evolve_measured_batch(state, osc, meas, eps, params, units)
        weights = np.trapezoid(np.abs(branches) ** 2, dx=state.grid.dx, axis=-1)
    top = weights.max()
    if not top > 0:
        raise NumericalError("readout distribution vanishes", module="measurement")
    tail = max(weights[0], weights[-1]) / top
    if tail > TAIL_TOL:
        raise CoverageError("readout grid does not cover the distribution tails",
                            module="measurement", tail_ratio=f"{tail:.3g}")
    return ReadoutDistribution(eps, weights, float(np.trapezoid(weights, eps)))


def effective_uncertainty_numeric(dist: ReadoutDistribution) -> float:
    """``sqrt(2 var(eps))`` under the readout distribution."""
    if not dist.normalization > 0:
        raise NumericalError("readout distribution has zero normalization", module="measurement")
    e, w = dist.epsilons, dist.weights
    mean = np.trapezoid(e * w, e) / dist.normalization
    var = np.trapezoid((e - mean) ** 2 * w, e) / dist.normalization
    return float(np.sqrt(2 * max(var, 0.0)))


def apply_measurement(state, osc, meas, outcome=0.0, params=DEFAULT_PARAMS, units=DEFAULT_UNITS, path="auto"):
    """Collapse onto readout ``outcome`` and renormalize."""
    if choose_path(state, osc, meas, units, path) == "impulsive":
        return impulsive_collapse(state, meas.delta_a, outcome)
    return evolve_measured(state, osc, meas, outcome, params=params, units=units).normalized()
