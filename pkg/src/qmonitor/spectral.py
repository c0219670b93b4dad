"""
Energy levels of ``H = p^2/2m + m omega^2 x^2/2 + lam x^4/4`` and the
recurrence periods they imply.

Two independent routes are provided: a finite-difference tridiagonal matrix
whose lowest eigenvalues are isolated by Sturm-sequence bisection, and
leading-order WKB quantization. Periods are reported in units of the
harmonic period, ``T_ij / T = hbar omega / |E_i - E_j|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .core import ConfigError, NumericalError, Oscillator, UnitSystem, potential
from .grid import Grid

DEGENERATE_TOL = 1e-12
MAX_LEVEL = 10


@dataclass
class SpectrumResult:
    energies: np.ndarray
    method: str
    hbar_omega: float
    periods: Dict[Tuple[int, int], float] = field(default_factory=dict)
    relevant: Set[Tuple[int, int]] = field(default_factory=set)
    degenerate: List[Tuple[int, int]] = field(default_factory=list)

    def period(self, i, j):
        return self.periods[(i, j)]

    def level_rows(self):
        return list(enumerate(self.energies))

    def period_rows(self):
        return [(i, j, t) for (i, j), t in sorted(self.periods.items()) if i > j]


def sturm_count(diag, off, shifts):
    """Number of eigenvalues below each shift for the symmetric tridiagonal
    matrix with diagonal ``diag`` and off-diagonal ``off``."""
    shifts = np.asarray(shifts, dtype=float)
    off2 = np.concatenate(([0.0], np.asarray(off, dtype=float) ** 2))
    tiny = np.finfo(float).tiny ** 0.5
    count = np.zeros(shifts.shape, dtype=int)
    q = np.ones_like(shifts)
    for d, e2 in zip(diag, off2):
        q = d - shifts - e2 / q
        q = np.where(np.abs(q) < tiny, -tiny, q)
        count += q < 0
    return count


def lowest_eigenvalues(diag, off, count, rtol=1e-14):
    """Lowest ``count`` eigenvalues by simultaneous bisection."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    radius = np.zeros_like(diag)
    radius[:-1] += np.abs(off)
    radius[1:] += np.abs(off)
    lo_bound = float((diag - radius).min())
    hi = max(abs(lo_bound), 1.0)
    while sturm_count(diag, off, [hi])[0] < count:
        hi *= 2
        if not math.isfinite(hi):
            raise NumericalError("cannot bracket eigenvalues", module="spectral")
    index = np.arange(count)
    lo = np.full(count, lo_bound)
    up = np.full(count, hi)
    for _ in range(200):
        mid = 0.5 * (lo + up)
        below = sturm_count(diag, off, mid) <= index
        lo = np.where(below, mid, lo)
        up = np.where(below, up, mid)
        if np.all(up - lo <= rtol * np.maximum(np.abs(mid), 1.0)):
            return 0.5 * (lo + up)
    raise NumericalError("bisection did not converge", module="spectral")


def _fd_levels(osc, grid, count, hbar):
    x = grid.x
    t = hbar ** 2 / (2 * osc.m * grid.dx ** 2)
    diag = 2 * t + potential(osc, x)
    off = np.full(grid.n_points - 1, -t)
    return lowest_eigenvalues(diag, off, count)


def oscillator_length(osc, units):
    return math.sqrt(units.hbar / (osc.m * osc.omega))


def turning_point(osc: Oscillator, energy):
    """Positive root of ``V(x) = E``."""
    a = 0.5 * osc.m * osc.omega ** 2
    b = 0.25 * osc.lam
    return math.sqrt(2 * energy / (a + math.sqrt(a * a + 4 * b * energy)))


def default_fd_grid(osc, k, units=UnitSystem(), n_points=2001):
    e_guess = 1.5 * eigenvalues_wkb(osc, k, units).energies[-1]
    half = turning_point(osc, e_guess) + 6 * oscillator_length(osc, units)
    return Grid.symmetric(half, n_points)


def _check_k(k):
    if not (0 <= k <= MAX_LEVEL):
        raise ConfigError(f"level index must be in [0, {MAX_LEVEL}], got {k}")


def eigenvalues_fd(osc: Oscillator, k: int, grid: Optional[Grid] = None,
                   units: UnitSystem = UnitSystem(), richardson=True) -> SpectrumResult:
    """Lowest ``k + 1`` levels of the central-difference Hamiltonian (Dirichlet box).

    With ``richardson`` the levels from spacings ``h`` and ``h/2`` are
    combined as ``(4 E_{h/2} - E_h) / 3``, cancelling the ``h^2`` error.
    """
    _check_k(k)
    grid = grid or default_fd_grid(osc, k, units)
    length = oscillator_length(osc, units)
    levels = _fd_levels(osc, grid, k + 1, units.hbar)
    if grid.x_max < turning_point(osc, levels[-1]) + 3 * length:
        raise ConfigError("grid does not contain the turning point of the highest level with margin")
    if richardson:
        fine = Grid(grid.x_min, grid.x_max, 2 * grid.n_points - 1)
        levels = (4 * _fd_levels(osc, fine, k + 1, units.hbar) - levels) / 3
    result = SpectrumResult(np.asarray(levels), "diagonalization", units.hbar * osc.omega)
    return characteristic_periods(result)


def wkb_action(osc: Oscillator, energy):
    """Closed-orbit action ``2 int sqrt(2m(E - V)) dx`` between turning points.

    With ``x = x_t sin(theta)`` the integrand is smooth:
    ``E - V = cos^2(theta) (a x_t^2 + b x_t^4 (1 + sin^2 theta))``.
    """
    a = 0.5 * osc.m * osc.omega ** 2
    b = 0.25 * osc.lam
    xt = turning_point(osc, energy)

    def integrand(th):
        s2 = math.sin(th) ** 2
        return math.cos(th) ** 2 * math.sqrt(2 * osc.m * (a * xt ** 2 + b * xt ** 4 * (1 + s2)))

    value, _ = quad(integrand, -math.pi / 2, math.pi / 2, epsabs=0, epsrel=1e-13, limit=200)
    return 2 * xt * value


def eigenvalues_wkb(osc: Oscillator, k: int, units: UnitSystem = UnitSystem()) -> SpectrumResult:
    """Levels from ``action(E_n) = 2 pi hbar (n + 1/2)``."""
    _check_k(k)
    hw = units.hbar * osc.omega
    energies = []
    for n in range(k + 1):
        target = 2 * math.pi * units.hbar * (n + 0.5)
        lo, hi = 1e-12 * hw, (n + 1) * hw
        while wkb_action(osc, hi) < target:
            hi *= 2
            if hi > 1e12 * hw:
                raise NumericalError("cannot bracket WKB level", module="spectral", n=n)
        energies.append(brentq(lambda e: wkb_action(osc, e) - target, lo, hi, xtol=1e-14, rtol=1e-14))
    return characteristic_periods(SpectrumResult(np.array(energies), "wkb", hw))


def characteristic_periods(spectrum: SpectrumResult) -> SpectrumResult:
    """Fill ``T_ij / T`` for every level pair; even-even pairs are marked relevant."""
    e = np.asarray(spectrum.energies)
    if e.size < 2:
        raise ConfigError("need at least two levels")
    spectrum.periods.clear()
    spectrum.relevant.clear()
    spectrum.degenerate.clear()
    for i in range(e.size):
        for j in range(i):
            gap = abs(e[i] - e[j])
            if gap < DEGENERATE_TOL:
                spectrum.degenerate.append((i, j))
                continue
            spectrum.periods[(i, j)] = spectrum.periods[(j, i)] = spectrum.hbar_omega / gap
            if i % 2 == 0 and j % 2 == 0:
                spectrum.relevant.update({(i, j), (j, i)})
    return spectrum


def commensurability_score(delta_t, t20, t40, w20=2.0, w40=1.0):
    """Weighted relative distance of ``delta_t`` to the nearest multiples of both periods."""
    d20 = abs(delta_t - t20 * round(delta_t / t20))
    d40 = abs(delta_t - t40 * round(delta_t / t40))
    return w20 * d20 / t20 + w40 * d40 / t40


def predict_minima(periods, delta_t_max, max_score=0.1, w20=2.0, w40=1.0):
    """Quiescent times where the uncertainty should have its deepest minima.

    ``periods`` is a mapping holding ``(2, 0)`` and ``(4, 0)`` (a
    ``SpectrumResult`` works too); times share its units. The score is
    piecewise linear with kinks only at multiples and half multiples of the
    two periods, so its local minima are found exactly among those points.
    Returns ``(delta_t, score)`` pairs, best first.
    """
    if isinstance(periods, SpectrumResult):
        periods = periods.periods
    t20, t40 = periods[(2, 0)], periods[(4, 0)]
    knots = set()
    for p in (t20, t40):
        for j in range(1, int(2 * delta_t_max / p) + 1):
            knots.add(round(0.5 * j * p, 15))
    xs = sorted(v for v in knots if 0 < v < delta_t_max) + [delta_t_max]
    xs = [0.0] + xs
    scores = [commensurability_score(v, t20, t40, w20, w40) for v in xs]
    found = []
    for i in range(1, len(xs) - 1):
        if scores[i] <= scores[i - 1] and scores[i] <= scores[i + 1] and scores[i] < max_score:
            found.append((xs[i], scores[i]))
    found.sort(key=lambda item: (item[1], item[0]))
    return found
