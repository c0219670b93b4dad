"""
Closed-form results for a Gaussian state in a measured harmonic oscillator.

A position measurement of duration ``tau`` and accuracy ``delta_a`` dresses
the oscillator frequency into the complex value
``omega_r^2 = omega^2 - i hbar / (m tau delta_a^2)``. The effective readout
uncertainty and the width of the collapsed Gaussian follow from it in closed
form. Below ``TAU_SWITCH * T`` their impulsive limits are used instead,
because the auxiliary quantities ``beta`` and ``gamma`` are 0/0-like as
``tau -> 0``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .core import (
    ConfigError,
    EvaluationSingularity,
    GaussianStart,
    MeasurementSpec,
    Oscillator,
    StrategySpec,
    UnitSystem,
)
from .traces import UncertaintyTrace

TAU_SWITCH = 1e-8  # in units of the period T
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class RenormalizedParams:
    omega_r: complex
    alpha: complex
    beta: complex
    gamma: complex


def _require_harmonic(osc):
    if not osc.harmonic:
        raise ConfigError("closed-form results exist only for the harmonic oscillator (lam = 0)")


def renormalized_frequency(units: UnitSystem, osc: Oscillator, meas: MeasurementSpec) -> complex:
    """Principal root (``Re > 0``) of the measurement-dressed frequency squared."""
    _require_harmonic(osc)
    if meas.tau <= 0:
        raise ConfigError("renormalized frequency needs tau > 0; use the impulsive limits")
    damping = units.hbar / (osc.m * meas.tau * meas.delta_a ** 2)
    omega_r = cmath.sqrt(complex(osc.omega ** 2, -damping))
    if omega_r.real < 0:
        omega_r = -omega_r
    return omega_r


def renormalized_params(units, osc, meas, sigma) -> RenormalizedParams:
    omega_r = renormalized_frequency(units, osc, meas)
    z = omega_r * meas.tau
    s = cmath.sin(z)
    if abs(s) < SINGULAR_TOL:
        raise EvaluationSingularity("sin(omega_r tau) vanishes", module="analytic", tau=meas.tau)
    alpha = osc.m * omega_r * sigma ** 2 / units.hbar
    beta = (cmath.cos(z) - 1) / (z * s)
    gamma = 1 / (1 - 1j * alpha * cmath.cos(z) / s)
    return RenormalizedParams(omega_r, alpha, beta, gamma)


def impulsive_uncertainty(sigma, delta_a):
    return math.sqrt(delta_a ** 2 + sigma ** 2)


def impulsive_width(sigma, delta_a):
    if math.isinf(delta_a):
        return sigma
    return sigma * delta_a / math.sqrt(sigma ** 2 + delta_a ** 2)


def _use_limit(osc, meas):
    return meas.tau <= TAU_SWITCH * osc.period()


def _check_finite(value, what, tau):
    if not math.isfinite(value) or value <= 0:
        raise EvaluationSingularity(f"non-finite {what}", module="analytic", tau=tau, value=value)
    return value


def effective_uncertainty_analytic(units, osc, meas, sigma) -> float:
    """Effective readout uncertainty for a zero-chirp Gaussian of width ``sigma``."""
    _require_harmonic(osc)
    if not sigma > 0:
        raise ConfigError("sigma must be positive")
    if _use_limit(osc, meas):
        return impulsive_uncertainty(sigma, meas.delta_a)
    p = renormalized_params(units, osc, meas, sigma)
    da2 = meas.delta_a ** 2
    z = p.omega_r * meas.tau
    tan_z = cmath.tan(z)
    first = (1 + (sigma ** 2 / da2) * (1j * (2 * p.beta + 1) / (p.alpha * z) - p.beta ** 2 * p.gamma)).real / da2
    cross = (p.beta * (1 - 1j * p.alpha * p.gamma / cmath.sin(z))).real
    denom = ((1 + 1j * p.alpha * tan_z) / (1 + 1j / p.alpha * tan_z)).real
    inv_sq = first - sigma ** 2 / da2 ** 2 * cross ** 2 / denom
    _check_finite(inv_sq, "inverse squared uncertainty", meas.tau)
    return inv_sq ** -0.5


def collapsed_width(units, osc, meas, sigma) -> float:
    """Width of the Gaussian after a measurement with outcome 0."""
    _require_harmonic(osc)
    if not sigma > 0:
        raise ConfigError("sigma must be positive")
    if _use_limit(osc, meas):
        return impulsive_width(sigma, meas.delta_a)
    p = renormalized_params(units, osc, meas, sigma)
    z = p.omega_r * meas.tau
    s, c, a = cmath.sin(z), cmath.cos(z), p.alpha
    ratio = ((a ** 2 * s - 1j * a * c) / (s - 1j * a * c)).real
    _check_finite(ratio, "width ratio", meas.tau)
    return sigma * ratio ** -0.5


def free_width(units, osc, sigma_tau, t) -> float:
    """Width of an unchirped Gaussian after free harmonic evolution for ``t``.

    Written as ``sqrt(cos^2 + q^2 sin^2)`` with ``q = hbar/(m omega sigma^2)``,
    the same expression as the ``tan`` form without its poles at ``T/4``.
    """
    _require_harmonic(osc)
    if not sigma_tau > 0:
        raise ConfigError("width must be positive")
    q = units.hbar / (osc.m * osc.omega * sigma_tau ** 2)
    wt = osc.omega * t
    return sigma_tau * math.sqrt(math.cos(wt) ** 2 + (q * math.sin(wt)) ** 2)


def analytic_trace(spec: StrategySpec, stop_on_converge=True) -> UncertaintyTrace:
    """Iterate uncertainty, collapse and free spreading for each measurement."""
    osc, meas, units = spec.oscillator, spec.measurement, spec.units
    _require_harmonic(osc)
    if not isinstance(spec.initial_state, GaussianStart):
        raise ConfigError("analytic engine needs a Gaussian initial state")
    trace = UncertaintyTrace()
    sigma = spec.initial_state.sigma
    for n in range(1, spec.n_max + 1):
        try:
            da_eff = effective_uncertainty_analytic(units, osc, meas, sigma)
            trace.append(n, da_eff, sigma)
            if trace.update_asymptote(spec.rel_tol, spec.window) and stop_on_converge:
                break
            sigma = free_width(units, osc, collapsed_width(units, osc, meas, sigma), spec.quiescent)
        except EvaluationSingularity as exc:
            exc.context["measurement"] = n
            raise
    return trace
