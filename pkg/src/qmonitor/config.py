"""
Flat ``section.key=value`` run configuration.

Resolution order: built-in defaults, then the command preset, then the
config file, then command-line flags. Every key is validated before any
computation starts; :meth:`RunConfig.manifest` echoes the resolved values in
the same format so a run can be reproduced with ``--config manifest.txt``.
Times are given in units of the oscillator period ``T = 2 pi / omega``.
"""
from __future__ import annotations

import math
import os
from pathlib import Path
from typing import Dict, List

from .core import (
    ConfigError, DoublePeakStart, GaussianStart, MeasurementSpec, Oscillator, StrategySpec, UnitSystem,
)
from .grid import Grid
from .propagator import EvolutionParams

OUT_ENV = "QMONITOR_OUT"

# key -> (kind, default); kinds: float, int, bool, str, floats (comma list), choice:<a|b>
SCHEMA = {
    "units.hbar": ("float", "1"),
    "oscillator.m": ("float", "0.5"),
    "oscillator.omega": ("float", "1"),
    "oscillator.lambda": ("float", "0"),
    "measurement.delta_a": ("float", "1"),
    "measurement.tau_over_T": ("float", "1e-5"),
    "measurement.epsilon": ("float", "0"),
    "measurement.path": ("choice:auto|impulsive|finite", "auto"),
    "strategy.quiescent_over_T": ("float", "0.25"),
    "strategy.n_max": ("int", "200"),
    "strategy.rel_tol": ("float", "1e-4"),
    "strategy.window": ("int", "3"),
    "strategy.realize_mean": ("bool", "false"),
    "strategy.stop_on_converge": ("bool", "true"),
    "initial.kind": ("choice:gaussian|double_peak", "gaussian"),
    "initial.sigma": ("float", "5"),
    "initial.sigma_p": ("float", "1"),
    "initial.x0": ("float", "3"),
    "grid.x_max": ("float?", "auto"),
    "grid.n_points": ("int?", "auto"),
    "evolution.scheme": ("choice:eigen|split", "eigen"),
    "evolution.dt_free_over_T": ("float", "1e-3"),
    "evolution.measured_steps": ("int", "20"),
    "scan.start_over_T": ("float", "0"),
    "scan.stop_over_T": ("float", "1.6"),
    "scan.points": ("int", "161"),
    "figure.quiescent_over_T": ("floats", "0.25,0.5,0.75"),
    "figure.tau_over_T": ("floats", "0,1e-5,0.1"),
    "spectrum.levels": ("int", "10"),
    "engine": ("choice:analytic|numeric|both", "numeric"),
    "threads": ("int", "1"),
}

PRESETS = {
    "fig1": {"strategy.n_max": "20", "strategy.stop_on_converge": "false", "engine": "both",
             "figure.quiescent_over_T": "0.25,0.5,0.75"},
    "fig2": {"engine": "analytic", "scan.start_over_T": "0", "scan.stop_over_T": "1.6",
             "scan.points": "161", "figure.tau_over_T": "0,1e-5,0.1"},
    # quartic scenario: unit mass, under which lambda = 4 gives T20/T ~ 0.225 and T40/T ~ 0.098
    "fig3": {"oscillator.m": "1", "oscillator.lambda": "4", "measurement.path": "finite",
             "strategy.n_max": "30", "strategy.stop_on_converge": "false",
             "figure.quiescent_over_T": "0.25,0.5"},
    "fig4": {"oscillator.m": "1", "oscillator.lambda": "4", "measurement.tau_over_T": "0",
             "scan.start_over_T": "0.05", "scan.stop_over_T": "1", "scan.points": "191"},
    "spectrum": {"oscillator.m": "1", "oscillator.lambda": "4"},
}


def parse_text(text: str, source="<config>") -> Dict[str, str]:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def parse_file(path) -> Dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_text(text, str(path))


def _convert(key, kind, raw):
    optional = kind.endswith("?")
    kind = kind.rstrip("?")
    if optional and raw == "auto":
        return None
    try:
        if kind == "float":
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError
            return value
        if kind == "int":
            return int(raw)
        if kind == "bool":
            lowered = raw.lower()
            if lowered not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError
            return lowered in ("true", "1", "yes")
        if kind == "floats":
            return [float(v) for v in raw.split(",") if v.strip()]
        if kind.startswith("choice:"):
            options = kind.split(":", 1)[1].split("|")
            if raw not in options:
                raise ValueError
            return raw
        return raw
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {raw!r} (expected {kind})") from None


class RunConfig:
    """Resolved, validated configuration."""

    def __init__(self, raw: Dict[str, str], command=""):
        self.command = command
        self.raw = {k: raw.get(k, default) for k, (_, default) in SCHEMA.items()}
        self.values = {k: _convert(k, SCHEMA[k][0], v) for k, v in self.raw.items()}
        self.validate()

    @classmethod
    def resolve(cls, command="", file_values=None, overrides=None):
        merged = dict(PRESETS.get(command, {}))
        merged.update(file_values or {})
        merged.update({k: str(v) for k, v in (overrides or {}).items() if v is not None})
        unknown = set(merged) - set(SCHEMA)
        if unknown:
            raise ConfigError(f"unknown keys: {sorted(unknown)}")
        return cls(merged, command)

    def __getitem__(self, key):
        return self.values[key]

    def validate(self):
        # building the domain objects runs their invariant checks
        self.units()
        osc = self.oscillator()
        self.measurement(self["measurement.tau_over_T"])
        self.strategy_spec()
        self.evolution_params()
        if self["grid.x_max"] is not None or self["grid.n_points"] is not None:
            self.grid()
        if self["scan.points"] < 1 or self["scan.stop_over_T"] < self["scan.start_over_T"]:
            raise ConfigError("scan range is empty")
        if self["scan.start_over_T"] < 0:
            raise ConfigError("scan must start at a non-negative time")
        if any(v < 0 for v in self["figure.quiescent_over_T"] + self["figure.tau_over_T"]):
            raise ConfigError("figure times must be >= 0")
        if self["threads"] < 1:
            raise ConfigError("threads must be >= 1")
        if not 1 <= self["spectrum.levels"] <= 10:
            raise ConfigError("spectrum.levels must be in [1, 10]")
        if self.command in ("fig3", "fig4") and osc.harmonic:
            raise ConfigError(f"{self.command} needs a quartic oscillator (lambda > 0)")

    @property
    def period(self):
        return 2 * math.pi / self["oscillator.omega"]

    def units(self):
        return UnitSystem(self["units.hbar"])

    def oscillator(self):
        return Oscillator(self["oscillator.m"], self["oscillator.omega"], self["oscillator.lambda"])

    def measurement(self, tau_over_T=None):
        tau = self["measurement.tau_over_T"] if tau_over_T is None else tau_over_T
        return MeasurementSpec(self["measurement.delta_a"], tau * self.period, self["measurement.epsilon"])

    def initial_state(self, kind=None):
        kind = kind or self["initial.kind"]
        if kind == "gaussian":
            return GaussianStart(self["initial.sigma"])
        return DoublePeakStart(self["initial.sigma_p"], self["initial.x0"])

    def strategy_spec(self, quiescent_over_T=None, tau_over_T=None, kind=None):
        q = self["strategy.quiescent_over_T"] if quiescent_over_T is None else quiescent_over_T
        return StrategySpec(
            oscillator=self.oscillator(), measurement=self.measurement(tau_over_T),
            quiescent=q * self.period, n_max=self["strategy.n_max"],
            initial_state=self.initial_state(kind), units=self.units(),
            rel_tol=self["strategy.rel_tol"], window=self["strategy.window"])

    def grid(self, spec=None):
        """Configured grid; unspecified fields fall back to the protocol default."""
        from .strategy import default_grid

        base = default_grid(spec or self.strategy_spec())
        x_max = self["grid.x_max"] if self["grid.x_max"] is not None else base.x_max
        n = self["grid.n_points"] if self["grid.n_points"] is not None else base.n_points
        return Grid.symmetric(x_max, n)

    def evolution_params(self):
        return EvolutionParams(scheme=self["evolution.scheme"],
                               dt_free=self["evolution.dt_free_over_T"] * self.period,
                               min_measured_steps=self["evolution.measured_steps"])

    def scan_values(self) -> List[float]:
        """Quiescent times (absolute) of the configured scan."""
        n = self["scan.points"]
        a, b = self["scan.start_over_T"], self["scan.stop_over_T"]
        if n == 1:
            return [a * self.period]
        return [(a + (b - a) * i / (n - 1)) * self.period for i in range(n)]

    def manifest(self) -> str:
        lines = [f"# command: {self.command}"] if self.command else []
        lines += [f"{k}={self.raw[k]}" for k in sorted(self.raw)]
        return "\n".join(lines) + "\n"


def default_out_dir():
    return Path(os.environ.get(OUT_ENV, "qmonitor-out"))
