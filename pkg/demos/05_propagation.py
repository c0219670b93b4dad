"""Free and measured evolution on the grid, and what happens when the grid is too small."""
import math

from qmonitor.core import ContainmentError, MeasurementSpec, Oscillator
from qmonitor.grid import Grid, init_gaussian
from qmonitor.propagator import EvolutionParams, evolve_free, evolve_measured

osc = Oscillator(m=0.5, omega=1.0)
T = osc.period()
grid = Grid.symmetric(40.0, 2048)
state = init_gaussian(grid, 5.0)

# A wide Gaussian breathes: width 5 -> 0.4 at a quarter period -> 5 at half a period.
for scheme in ("eigen", "split"):
    params = EvolutionParams(scheme=scheme)
    widths = [evolve_free(state, osc, f * T, params).moments().width for f in (0.25, 0.5)]
    print(f"{scheme:>5}: width at T/4 {widths[0]:.7f}, at T/2 {widths[1]:.7f}")

# Measured evolution loses norm monotonically; the final norm is the readout weight.
rows = []
evolve_measured(state, osc, MeasurementSpec(1.0, 0.1 * T), epsilon=0.0, trace=rows)
for t, norm2, width in rows[::20] + rows[-1:]:
    print(f"t = {t / T:.3f}T  norm^2 {norm2:.6f}  width {width:.5f}")

# A squeezed state outgrows a small box; the propagator refuses to continue.
small = Grid.symmetric(20.0, 2048)
try:
    evolve_free(init_gaussian(small, 0.2), osc, T / 4, EvolutionParams(scheme="split"))
except ContainmentError as exc:
    print("stopped:", exc)
print(f"(expected width at T/4: {2 / 0.2:.1f}, box half-width {small.x_max})")
