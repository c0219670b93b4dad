"""
Physical model shared by every engine: units, oscillator, measurement and
strategy descriptors, plus the scalar formulas that need no state.

All descriptors are frozen dataclasses, so they hash (the propagator caches
eigenbases on them) and can be passed freely between threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union


class QMonitorError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(QMonitorError, ValueError):
    """Invalid parameters or configuration."""


class NumericalError(QMonitorError, RuntimeError):
    """A computation failed; ``context`` carries diagnostics."""

    def __init__(self, message, module="", **context):
        super().__init__(message)
        self.message = message
        self.module = module
        self.context = context

    def __str__(self):
        detail = ", ".join(f"{k}={v}" for k, v in self.context.items())
        return self.message + (f" [{detail}]" if detail else "")


class EvaluationSingularity(NumericalError):
    """Closed-form expression hit a (near) pole."""


class ContainmentError(NumericalError):
    """Wavefunction reached the edge of the spatial or momentum grid."""


@dataclass(frozen=True)
class UnitSystem:
    hbar: float = 1.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise ConfigError(f"hbar must be positive, got {self.hbar}")


@dataclass(frozen=True)
class Oscillator:
    """V(x) = m omega^2 x^2 / 2 + lam x^4 / 4; ``lam == 0`` is harmonic."""

    m: float = 0.5
    omega: float = 1.0
    lam: float = 0.0

    def __post_init__(self):
        if not self.m > 0:
            raise ConfigError(f"mass must be positive, got {self.m}")
        if not self.omega > 0:
            raise ConfigError(f"omega must be positive, got {self.omega}")
        if not self.lam >= 0:
            raise ConfigError(f"quartic coupling must be >= 0, got {self.lam}")

    @property
    def harmonic(self) -> bool:
        return self.lam == 0

    def period(self) -> float:
        return 2 * math.pi / self.omega


@dataclass(frozen=True)
class MeasurementSpec:
    """Instrumental error, duration (0 = impulsive) and constant readout."""

    delta_a: float = 1.0
    tau: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if not self.delta_a > 0:
            raise ConfigError(f"delta_a must be positive, got {self.delta_a}")
        if not self.tau >= 0:
            raise ConfigError(f"tau must be >= 0, got {self.tau}")

    @property
    def impulsive(self) -> bool:
        return self.tau == 0


@dataclass(frozen=True)
class GaussianStart:
    sigma: float = 5.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class DoublePeakStart:
    sigma_p: float = 1.0
    x0: float = 3.0

    def __post_init__(self):
        if not (self.sigma_p > 0 and self.x0 > 0):
            raise ConfigError("double peak needs sigma_p > 0 and x0 > 0")


InitialState = Union[GaussianStart, DoublePeakStart]


@dataclass(frozen=True)
class StrategySpec:
    """Measure for ``tau``, evolve freely for ``quiescent``, repeat."""

    oscillator: Oscillator = field(default_factory=Oscillator)
    measurement: MeasurementSpec = field(default_factory=MeasurementSpec)
    quiescent: float = 0.0
    n_max: int = 200
    initial_state: InitialState = field(default_factory=GaussianStart)
    units: UnitSystem = field(default_factory=UnitSystem)
    rel_tol: float = 1e-4
    window: int = 3

    def __post_init__(self):
        if self.n_max < 1:
            raise ConfigError(f"n_max must be >= 1, got {self.n_max}")
        if not self.quiescent >= 0:
            raise ConfigError(f"quiescent time must be >= 0, got {self.quiescent}")
        if self.window < 1:
            raise ConfigError("window must be >= 1")


def potential(osc: Oscillator, x):
    """Evaluate V(x); works elementwise on arrays."""
    return 0.5 * osc.m * osc.omega ** 2 * x ** 2 + 0.25 * osc.lam * x ** 4


def critical_time(units: UnitSystem, osc: Oscillator, sigma: float, delta_a: float) -> float:
    """Time scale separating impulsive from measurement-dominated regimes.

    ``1/tau_c = (hbar/m) (1/delta_a^2 + 1/sigma^2)``. ``delta_a = inf`` is
    accepted and drops that term.
    """
    if not (sigma > 0 and delta_a > 0):
        raise ConfigError("sigma and delta_a must be positive")
    rate = units.hbar / osc.m * (1.0 / delta_a ** 2 + 1.0 / sigma ** 2)
    return 1.0 / rate
