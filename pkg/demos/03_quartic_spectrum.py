"""Levels of the quartic oscillator and the quiescent times they favour."""
from qmonitor.core import Oscillator
from qmonitor.spectral import eigenvalues_fd, eigenvalues_wkb, predict_minima

# unit mass, hbar = omega = 1, lam = 4
osc = Oscillator(m=1.0, omega=1.0, lam=4.0)

fd = eigenvalues_fd(osc, 6)
wkb = eigenvalues_wkb(osc, 6)
print(" n   finite difference       WKB")
for n, (a, b) in enumerate(zip(fd.energies, wkb.energies)):
    print(f"{n:2d}   {a:16.10f}   {b:12.8f}")

# Only even levels are populated by the symmetric protocol; their spacings set the recurrences.
for name, spec in (("diagonalization", fd), ("wkb", wkb)):
    print(f"{name:>16}: T20/T = {spec.period(2, 0):.4f}  T40/T = {spec.period(4, 0):.4f}")

# Quiescent times close to multiples of both periods should read out best.
for dt, score in predict_minima(fd, 1.0)[:5]:
    print(f"candidate dT = {dt:.3f}T  score {score:.3f}")
