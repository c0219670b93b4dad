"""Repeated measurements of the quartic oscillator."""
import numpy as np

from qmonitor.core import DoublePeakStart, GaussianStart, MeasurementSpec, Oscillator, StrategySpec
from qmonitor.strategy import run_strategy, scan_quiescent

osc = Oscillator(m=1.0, omega=1.0, lam=4.0)
T = osc.period()

# The asymptote forgets the initial state.
for q in (0.25, 0.5):
    for start in (GaussianStart(5.0), DoublePeakStart(1.0, 3.0)):
        spec = StrategySpec(oscillator=osc, measurement=MeasurementSpec(1.0, 1e-5 * T), quiescent=q * T,
                            n_max=30, initial_state=start)
        trace = run_strategy(spec, path="finite", stop_on_converge=False)
        print(f"dT = {q}T {type(start).__name__:>15}: last values {np.round(trace.values[-3:], 5)}")

# A coarse impulsive scan: the best spacing sits near 3 T20 but never reaches delta_a.
spec = StrategySpec(oscillator=osc, measurement=MeasurementSpec(1.0, 0.0))
values = np.linspace(0.6, 0.75, 16) * T
result = scan_quiescent(spec, values)
for q, a in result.rows(T):
    print(f"dT = {q:.2f}T  asymptote {a:.4f}")
