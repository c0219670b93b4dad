"""One finite-accuracy position measurement of a harmonic oscillator."""
import math

from qmonitor.analytic import collapsed_width, effective_uncertainty_analytic, renormalized_frequency
from qmonitor.core import MeasurementSpec, Oscillator, UnitSystem, critical_time
from qmonitor.grid import Grid, init_gaussian
from qmonitor.measurement import apply_measurement, effective_uncertainty_numeric, readout_distribution

units = UnitSystem()
osc = Oscillator(m=0.5, omega=1.0)  # 2m = hbar = omega = 1
T = osc.period()
sigma, delta_a = 5.0, 1.0

# The critical time separates impulsive from measurement-dominated readout.
tau_c = critical_time(units, osc, sigma, delta_a)
print(f"tau_c = {tau_c:.6f} = {tau_c / T:.4f} T")

grid = Grid.symmetric(64.0, 2048)
state = init_gaussian(grid, sigma)

# Short and long measurements: the closed form and the grid engine side by side.
for tau in (0.0, 1e-5 * T, 0.1 * T):
    meas = MeasurementSpec(delta_a, tau)
    dist = readout_distribution(state, osc, meas)
    numeric = effective_uncertainty_numeric(dist)
    analytic = effective_uncertainty_analytic(units, osc, meas, sigma)
    after = apply_measurement(state, osc, meas).moments().width
    print(f"tau/T={tau / T:<7g} delta_a_eff numeric {numeric:.6f} analytic {analytic:.6f}   "
          f"collapsed width numeric {after:.6f} analytic {collapsed_width(units, osc, meas, sigma):.6f}")

# During a measurement the oscillator responds at a complex frequency.
print("omega_r at tau = T/10:", renormalized_frequency(units, osc, MeasurementSpec(delta_a, 0.1 * T)))

# The readout distribution of a Gaussian is itself Gaussian; the fit width is delta_a_eff.
w, mu, resid = readout_distribution(state, osc, MeasurementSpec(delta_a, 0.0)).fit_gaussian()
print(f"fitted width {w:.6f} (sqrt 26 = {math.sqrt(26):.6f}), centre {mu:.1e}, residual {resid:.1e}")
