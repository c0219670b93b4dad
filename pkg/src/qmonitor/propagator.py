"""
Time evolution of grid states.

Free evolution uses ``H = p^2/2m + V(x)``. Measured evolution adds the
imaginary potential ``-i hbar (x - eps)^2 / (2 tau delta_a^2)``, whose
exponential over the full duration is the Gaussian readout weight
``exp(-(x - eps)^2 / (2 delta_a^2))``.

Two schemes are available for free evolution:

``split``
    Strang splitting, potential half steps in position space and the kinetic
    step in momentum space via FFT.
``eigen``
    Exact in time: the grid Hamiltonian (same FFT kinetic operator, so the
    two schemes share a spatial discretization) is diagonalized once per
    (grid, oscillator) and cached. Long quiescent intervals cost two
    matrix-vector products.

Measured evolution always uses the split scheme; the imaginary part of the
potential enters as an exact real decay factor, so the norm cannot grow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.linalg import circulant

from .core import ConfigError, ContainmentError, MeasurementSpec, NumericalError, Oscillator, UnitSystem, potential
from .grid import Grid, GridState

DEFAULT_UNITS = UnitSystem()


@dataclass(frozen=True)
class EvolutionParams:
    """Stepping controls.

    ``dt_free`` defaults to ``T/1000``; ``dt_measured`` defaults to the
    smaller of ``tau / min_measured_steps`` and ``T/1000``.
    ``kinetic=False`` freezes the kinetic term (test mode, infinite mass).
    """

    scheme: str = "eigen"
    dt_free: Optional[float] = None
    dt_measured: Optional[float] = None
    min_measured_steps: int = 20
    boundary_guard: float = 1e-10
    momentum_guard: float = 1e-5
    kinetic: bool = True

    def __post_init__(self):
        if self.scheme not in ("eigen", "split"):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        for name in ("dt_free", "dt_measured"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ConfigError(f"{name} must be positive")


DEFAULT_PARAMS = EvolutionParams()


def check_containment(grid: Grid, amplitudes, params=DEFAULT_PARAMS, where="", joint=False, **context):
    """Raise ``ContainmentError`` if amplitude sits at the spatial or spectral edge.

    ``amplitudes`` may be a single state or a stack of states (last axis = x).
    With ``joint`` the stack is judged against its overall peak, so branches
    of negligible weight cannot trip the guard.
    """
    psi = np.atleast_2d(amplitudes)
    peak = np.abs(psi).max(axis=-1)
    if joint:
        peak = np.full_like(peak, peak.max())
    edge = np.maximum(np.abs(psi[:, 0]), np.abs(psi[:, -1]))
    live = peak > 0
    bad = live & (edge >= params.boundary_guard * peak)
    if bad.any():
        ratio = float((edge[bad] / peak[bad]).max())
        raise ContainmentError(f"wavefunction reached the grid boundary{where}",
                               module="propagator", edge_ratio=f"{ratio:.3g}", **context)
    phi = np.abs(np.fft.fft(psi, axis=-1))
    k = np.abs(grid.k)
    outer = k >= 0.9 * k.max()
    spec_peak = phi.max(axis=-1)
    if joint:
        spec_peak = np.full_like(spec_peak, spec_peak.max())
    spec_edge = phi[:, outer].max(axis=-1)
    bad = live & (spec_edge >= params.momentum_guard * spec_peak)
    if bad.any():
        ratio = float((spec_edge[bad] / spec_peak[bad]).max())
        raise ContainmentError(f"wavefunction is not resolved by the grid spacing{where}",
                               module="propagator", momentum_edge_ratio=f"{ratio:.3g}", **context)


def _kinetic_phase(grid, osc, dt, hbar):
    return np.exp(-1j * hbar * grid.k ** 2 * dt / (2 * osc.m))


def _split_free(psi, grid, osc, duration, dt_max, hbar, params, trace):
    steps = max(1, math.ceil(duration / dt_max - 1e-9))
    dt = duration / steps
    half_v = np.exp(-1j * potential(osc, grid.x) * dt / (2 * hbar))
    kin = _kinetic_phase(grid, osc, dt, hbar)
    for i in range(steps):
        psi = half_v * np.fft.ifft(kin * np.fft.fft(half_v * psi))
        check_containment(grid, psi, params, where=" during free evolution", step=i + 1)
        if trace is not None:
            trace.append(((i + 1) * dt, *_norm_width(grid, psi)))
    return psi


@lru_cache(maxsize=8)
def grid_eigenbasis(grid: Grid, osc: Oscillator, hbar: float = 1.0):
    """Eigenpairs of the FFT-discretized Hamiltonian (cached)."""
    kin = hbar ** 2 * grid.k ** 2 / (2 * osc.m)
    column = np.fft.ifft(kin).real
    h = circulant(column)
    h[np.diag_indices_from(h)] += potential(osc, grid.x)
    energies, vectors = np.linalg.eigh(h)
    return energies, np.ascontiguousarray(vectors)


def _eigen_free(psi, grid, osc, duration, hbar):
    energies, vectors = grid_eigenbasis(grid, osc, hbar)
    coeff = vectors.T @ psi
    return vectors @ (np.exp(-1j * energies * duration / hbar) * coeff)


def _norm_width(grid, psi):
    rho = np.abs(psi) ** 2
    n2 = np.trapezoid(rho, dx=grid.dx)
    x = grid.x
    mean = np.trapezoid(x * rho, dx=grid.dx) / n2
    var = np.trapezoid(x * x * rho, dx=grid.dx) / n2 - mean ** 2
    return float(n2), float(np.sqrt(max(2 * var, 0.0)))


def evolve_free(state: GridState, osc: Oscillator, duration: float,
                params: EvolutionParams = DEFAULT_PARAMS, units: UnitSystem = DEFAULT_UNITS,
                trace: Optional[list] = None) -> GridState:
    """Unitary evolution for ``duration``.

    If ``trace`` is a list, ``(t, norm2, width)`` rows are appended to it
    after every step (only the end point for the eigen scheme).
    """
    if duration < 0:
        raise ConfigError("duration must be >= 0")
    if duration == 0:
        return state.copy()
    grid, psi = state.grid, state.amplitudes
    hbar = units.hbar
    if params.scheme == "split" or not params.kinetic:
        if not params.kinetic:
            raise ConfigError("frozen kinetic mode applies to measured evolution only")
        dt_max = params.dt_free or osc.period() / 1000
        psi = _split_free(psi, grid, osc, duration, dt_max, hbar, params, trace)
    else:
        psi = _eigen_free(psi, grid, osc, duration, hbar)
        check_containment(grid, psi, params, where=" after free evolution", duration=duration)
        if trace is not None:
            trace.append((duration, *_norm_width(grid, psi)))
    return GridState(grid, psi)


def _measured_steps(osc, meas, params):
    dt_max = params.dt_measured or min(meas.tau / params.min_measured_steps, osc.period() / 1000)
    return max(params.min_measured_steps, math.ceil(meas.tau / dt_max - 1e-9))


def evolve_measured_batch(state: GridState, osc: Oscillator, meas: MeasurementSpec, epsilons,
                          params: EvolutionParams = DEFAULT_PARAMS, units: UnitSystem = DEFAULT_UNITS,
                          trace: Optional[list] = None):
    """Measured evolution for several readouts at once.

    Returns an array of shape ``(len(epsilons), n_points)``; rows are not
    renormalized. ``trace`` rows are ``(t, norm2, width)`` for a single
    branch and ``(t, norm2 of each branch...)`` otherwise.
    """
    if not meas.tau > 0:
        raise ConfigError("measured evolution needs tau > 0; use impulsive_collapse for tau = 0")
    grid, hbar = state.grid, units.hbar
    eps = np.atleast_1d(np.asarray(epsilons, dtype=float))
    if np.any(eps < grid.x_min) or np.any(eps > grid.x_max):
        raise ConfigError("readout lies outside the grid")
    steps = _measured_steps(osc, meas, params)
    dt = meas.tau / steps
    x = grid.x
    decay = np.exp(-((x[None, :] - eps[:, None]) ** 2) * dt / (4 * meas.tau * meas.delta_a ** 2))
    half = decay * np.exp(-1j * potential(osc, x) * dt / (2 * hbar))[None, :]
    kin = _kinetic_phase(grid, osc, dt, hbar) if params.kinetic else None
    psi = np.broadcast_to(state.amplitudes, (eps.size, grid.n_points)).astype(complex)
    prev = np.trapezoid(np.abs(psi) ** 2, dx=grid.dx, axis=-1)
    for i in range(steps):
        psi = half * psi
        if kin is not None:
            psi = np.fft.ifft(kin[None, :] * np.fft.fft(psi, axis=-1), axis=-1)
        psi = half * psi
        norms = np.trapezoid(np.abs(psi) ** 2, dx=grid.dx, axis=-1)
        if np.any(norms > prev * (1 + 1e-12) + 1e-300):
            raise NumericalError("norm increased during measured evolution", module="propagator", step=i + 1)
        prev = norms
        check_containment(grid, psi, params, where=" during measured evolution", joint=True, step=i + 1)
        if trace is not None:
            if eps.size == 1:
                trace.append(((i + 1) * dt, *_norm_width(grid, psi[0])))
            else:
                trace.append(((i + 1) * dt, *norms))
    return psi


def evolve_measured(state: GridState, osc: Oscillator, meas: MeasurementSpec, epsilon=None,
                    duration=None, params: EvolutionParams = DEFAULT_PARAMS,
                    units: UnitSystem = DEFAULT_UNITS, trace: Optional[list] = None) -> GridState:
    """Non-unitary evolution during a measurement with constant readout.

    The result is deliberately not renormalized: its squared norm is the
    (unnormalized) probability weight of the readout ``epsilon``.
    ``trace`` rows are ``(t, norm2, width)``.
    """
    eps = meas.epsilon if epsilon is None else epsilon
    if duration is not None and not math.isclose(duration, meas.tau, rel_tol=1e-12):
        raise ConfigError("measured evolution lasts exactly the measurement duration")
    psi = evolve_measured_batch(state, osc, meas, [eps], params, units, trace=trace)[0]
    return GridState(state.grid, psi)
