"""
Repeated measurement protocol: measure (outcome 0), wait ``quiescent``,
repeat, until the per-measurement effective uncertainty settles.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, NamedTuple, Optional, Sequence

from .analytic import analytic_trace
from .core import ConfigError, GaussianStart, NumericalError, QMonitorError, StrategySpec
from .grid import Grid, initial_state
from .measurement import apply_measurement, effective_uncertainty_numeric, readout_distribution
from .propagator import DEFAULT_PARAMS, EvolutionParams, evolve_free, grid_eigenbasis
from .traces import Asymptote, UncertaintyTrace, asymptotic_value

__all__ = [
    "Asymptote", "UncertaintyTrace", "ScanPoint", "ScanResult", "asymptotic_value",
    "default_grid", "run_strategy", "scan_quiescent",
]


def default_grid(spec: StrategySpec) -> Grid:
    """Grid wide enough for the start state and the states the protocol visits.

    Harmonic runs need room for the quarter-period spreading of strongly
    collapsed states; quartic confinement keeps later states near the origin.
    """
    init = spec.initial_state
    extent = 7 * init.sigma if isinstance(init, GaussianStart) else init.x0 + 7 * init.sigma_p
    if spec.oscillator.harmonic:
        return Grid.symmetric(max(64.0, extent), 2048)
    return Grid.symmetric(max(36.0, extent), 1024)


def _check_engine(spec, engine):
    if engine not in ("analytic", "numeric"):
        raise ConfigError(f"unknown engine {engine!r}")
    if engine == "analytic":
        if not spec.oscillator.harmonic:
            raise ConfigError("analytic engine requires lam = 0")
        if not isinstance(spec.initial_state, GaussianStart):
            raise ConfigError("analytic engine requires a Gaussian initial state")


def run_strategy(spec: StrategySpec, engine="numeric", grid: Optional[Grid] = None,
                 params: EvolutionParams = DEFAULT_PARAMS, path="auto",
                 realize_mean=False, stop_on_converge=True) -> UncertaintyTrace:
    """Uncertainty of each measurement in the sequence.

    ``path`` picks the numeric measurement model (``auto``, ``impulsive`` or
    ``finite``). With ``realize_mean`` the realized outcome is the readout
    mean instead of 0.
    """
    _check_engine(spec, engine)
    if engine == "analytic":
        return analytic_trace(spec, stop_on_converge=stop_on_converge)
    osc, meas, units = spec.oscillator, spec.measurement, spec.units
    grid = grid or default_grid(spec)
    state = initial_state(grid, spec.initial_state)
    trace = UncertaintyTrace()
    for n in range(1, spec.n_max + 1):
        try:
            dist = readout_distribution(state, osc, meas, params=params, units=units, path=path)
            trace.append(n, effective_uncertainty_numeric(dist), state.moments().width)
            if trace.update_asymptote(spec.rel_tol, spec.window) and stop_on_converge:
                break
            if n == spec.n_max:
                break
            outcome = dist.mean() if realize_mean else 0.0
            state = apply_measurement(state, osc, meas, outcome, params, units, path)
            state = evolve_free(state, osc, spec.quiescent, params, units)
        except NumericalError as exc:
            exc.context.setdefault("measurement", n)
            raise
    return trace


class ScanPoint(NamedTuple):
    quiescent: float
    asymptote: float
    n_used: int
    converged: bool
    error: str = ""


@dataclass
class ScanResult:
    points: List[ScanPoint]

    @property
    def quiescent(self):
        return [p.quiescent for p in self.points]

    @property
    def asymptotes(self):
        return [p.asymptote for p in self.points]

    def rows(self, period=1.0):
        return [(p.quiescent / period, p.asymptote) for p in self.points]


def _scan_point(spec, dt, engine, grid, params, path):
    point_spec = replace(spec, quiescent=float(dt))
    try:
        trace = run_strategy(point_spec, engine, grid, params, path)
    except QMonitorError as exc:
        return ScanPoint(float(dt), math.nan, 0, False, f"{type(exc).__name__}: {exc}")
    est = asymptotic_value(trace.values, spec.rel_tol, min(spec.window, len(trace)))
    return ScanPoint(float(dt), est.value, len(trace), trace.converged)


def scan_quiescent(spec: StrategySpec, delta_t_values: Sequence[float], engine="numeric",
                   grid: Optional[Grid] = None, params: EvolutionParams = DEFAULT_PARAMS,
                   path="auto", threads=1) -> ScanResult:
    """Asymptotic uncertainty for each quiescent time.

    A failing point is recorded with its error message and a NaN asymptote;
    the scan carries on. Output order is by quiescent time regardless of
    ``threads``.
    """
    values = sorted(float(v) for v in delta_t_values)
    if not values:
        raise ConfigError("no quiescent times to scan")
    if values[0] < 0:
        raise ConfigError("quiescent times must be >= 0")
    _check_engine(spec, engine)
    if engine == "numeric":
        grid = grid or default_grid(spec)
        if params.scheme == "eigen":
            grid_eigenbasis(grid, spec.oscillator, spec.units.hbar)

    def job(dt):
        return _scan_point(spec, dt, engine, grid, params, path)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(job, values))
    else:
        points = [job(v) for v in values]
    return ScanResult(points)
