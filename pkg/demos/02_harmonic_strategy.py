"""Repeated measurements of a harmonic oscillator: which spacing gives the best readout."""
import math

import numpy as np

from qmonitor.core import MeasurementSpec, Oscillator, StrategySpec
from qmonitor.strategy import run_strategy, scan_quiescent

osc = Oscillator(m=0.5, omega=1.0)
T = osc.period()


def spec(q, tau=1e-5 * T, n_max=200):
    return StrategySpec(oscillator=osc, measurement=MeasurementSpec(1.0, tau), quiescent=q * T, n_max=n_max)


# Half-period spacing returns the collapsed state to itself: the uncertainty falls towards delta_a.
for q in (0.25, 0.5, 0.75):
    trace = run_strategy(spec(q, n_max=8), "analytic", stop_on_converge=False)
    print(f"dT = {q}T:", " ".join(f"{v:.4f}" for v in trace.values))

# The grid engine reproduces the closed-form recursion.
a = run_strategy(spec(0.25, n_max=10), "analytic", stop_on_converge=False).values
b = run_strategy(spec(0.25, n_max=10), "numeric", stop_on_converge=False).values
print(f"largest numeric/analytic deviation at dT = T/4: {np.max(np.abs(b / a - 1)):.1e}")
print(f"quarter-period fixed point 1 + sqrt 2 = {1 + math.sqrt(2):.6f}")

# Asymptote versus spacing, for a quasi-impulsive and a slow measurement.
# dT = 0 (back-to-back measurements) is the trivial member of the half-period family.
values = np.linspace(0.0, 1.6, 65) * T
for tau in (1e-5, 0.1):
    a = scan_quiescent(spec(0.0, tau * T), values, "analytic").asymptotes
    mins = [i for i in range(1, len(a) - 1) if a[i] < a[i - 1] and a[i] < a[i + 1]]
    print(f"tau = {tau}T: local minima", ", ".join(f"{values[i] / T:.3f}T -> {a[i]:.4f}" for i in mins))
