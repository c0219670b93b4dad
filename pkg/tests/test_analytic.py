import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from qmonitor.analytic import (
    TAU_SWITCH, analytic_trace, collapsed_width, effective_uncertainty_analytic, free_width, impulsive_uncertainty,
    impulsive_width, renormalized_frequency, renormalized_params,
)
from qmonitor.core import (
    ConfigError, DoublePeakStart, EvaluationSingularity, GaussianStart, MeasurementSpec, Oscillator, StrategySpec,
)

T = 2 * math.pi


def test_renormalized_frequency_tenth_period(units, harmonic):
    w = renormalized_frequency(units, harmonic, MeasurementSpec(1.0, T / 10))
    # independent oracle: the principal root of 1 - i/(0.5 * 0.1 * 2 pi)
    w2 = complex(1.0, -1 / (0.5 * 0.1 * T))
    assert w2.imag == pytest.approx(-3.18310, abs=1e-5)
    assert w ** 2 == pytest.approx(w2, rel=1e-14)
    assert w.real > 0
    assert w == pytest.approx(1.472495 - 1.080852j, abs=1e-6)


def test_renormalized_frequency_fig1_tau(units, harmonic):
    w = renormalized_frequency(units, harmonic, MeasurementSpec(1.0, T * 1e-5))
    assert (w ** 2).real == pytest.approx(1.0, rel=1e-12)
    assert (w ** 2).imag == pytest.approx(-31831.0, rel=1e-5)


def test_renormalized_frequency_weak_measurement(units, harmonic):
    w = renormalized_frequency(units, harmonic, MeasurementSpec(math.inf, 1.0))
    assert w == 1.0


@given(da=st.floats(1e-2, 1e3), tau=st.floats(1e-4, 10), m=st.floats(0.1, 10), om=st.floats(0.1, 10))
def test_renormalized_frequency_principal_branch(da, tau, m, om):
    from qmonitor.core import UnitSystem
    w = renormalized_frequency(UnitSystem(), Oscillator(m, om), MeasurementSpec(da, tau))
    assert w.real > 0
    assert w.imag <= 0
    assert w * w == pytest.approx(complex(om ** 2, -1 / (m * tau * da ** 2)), rel=1e-10)


def test_renormalized_frequency_rejects(units, harmonic):
    with pytest.raises(ConfigError):
        renormalized_frequency(units, Oscillator(lam=1.0), MeasurementSpec(1.0, 1.0))
    with pytest.raises(ConfigError):
        renormalized_frequency(units, harmonic, MeasurementSpec(1.0, 0.0))


def test_impulsive_values():
    assert impulsive_uncertainty(5.0, 1.0) == pytest.approx(5.09902, abs=1e-5)
    assert impulsive_width(5.0, 1.0) == pytest.approx(0.980581, abs=1e-6)
    assert impulsive_width(impulsive_width(5.0, 1.0), 1.0) == pytest.approx(0.700140, abs=1e-6)
    assert impulsive_width(5.0, math.inf) == pytest.approx(5.0)


@pytest.mark.parametrize("tau", [0.0, 1e-5 * T])
def test_reference_configuration(units, harmonic, tau):
    meas = MeasurementSpec(1.0, tau)
    assert effective_uncertainty_analytic(units, harmonic, meas, 5.0) == pytest.approx(math.sqrt(26), rel=1e-3)
    assert collapsed_width(units, harmonic, meas, 5.0) == pytest.approx(math.sqrt(25 / 26), rel=1e-3)


def test_classical_regime(units, harmonic):
    meas = MeasurementSpec(1e3, 1e-5 * T)
    assert effective_uncertainty_analytic(units, harmonic, meas, 5.0) == pytest.approx(1e3, rel=1e-4)


def test_switch_is_continuous(units, harmonic):
    """Just above the switch the full formulas reproduce the limits."""
    meas = MeasurementSpec(1.0, 1.5 * TAU_SWITCH * T)
    assert effective_uncertainty_analytic(units, harmonic, meas, 5.0) == pytest.approx(math.sqrt(26), rel=1e-6)
    assert collapsed_width(units, harmonic, meas, 5.0) == pytest.approx(math.sqrt(25 / 26), rel=1e-6)


def test_finite_tau_matches_grid_engine(units, harmonic):
    # frozen from the grid engine (2048 points on [-64, 64], 400 measured steps)
    meas = MeasurementSpec(1.0, 0.1 * T)
    assert effective_uncertainty_analytic(units, harmonic, meas, 5.0) == pytest.approx(4.64104, rel=1e-5)
    assert collapsed_width(units, harmonic, meas, 5.0) == pytest.approx(0.979886, rel=1e-5)


def test_auxiliary_quantities(units, harmonic):
    meas = MeasurementSpec(1.0, 0.1 * T)
    p = renormalized_params(units, harmonic, meas, 5.0)
    z = p.omega_r * meas.tau
    assert p.alpha == pytest.approx(0.5 * p.omega_r * 25)
    assert p.beta == pytest.approx((cmath.cos(z) - 1) / (z * cmath.sin(z)))
    assert p.gamma == pytest.approx(1 / (1 - 1j * p.alpha / cmath.tan(z)))


def test_singular_sine_is_reported(units, harmonic):
    # a negligible damping leaves omega_r real, so sin(omega_r T/2) vanishes
    meas = MeasurementSpec(1e9, T / 2)
    with pytest.raises(EvaluationSingularity) as info:
        effective_uncertainty_analytic(units, harmonic, meas, 5.0)
    assert info.value.module == "analytic"


def test_free_width_values(units, harmonic):
    s = math.sqrt(25 / 26)
    assert free_width(units, harmonic, s, T / 2) == pytest.approx(s, rel=1e-12)
    assert free_width(units, harmonic, s, T / 4) == pytest.approx(2 / s, rel=1e-12)
    assert free_width(units, harmonic, s, T / 4) == pytest.approx(2.03961, abs=1e-5)
    assert free_width(units, harmonic, 5.0, 0.0) == 5.0


@given(t=st.floats(0, 20))
def test_coherent_width_is_stationary(t):
    from qmonitor.core import UnitSystem
    assert free_width(UnitSystem(), Oscillator(), math.sqrt(2), t) == pytest.approx(math.sqrt(2), rel=1e-12)


@given(s=st.floats(0.05, 20), t=st.floats(0, 20))
@settings(max_examples=50)
def test_free_width_quarter_period_inversion(s, t):
    """The width after ``t`` and ``t + T/2`` agree; a quarter period maps sigma to hbar/(m omega sigma)."""
    from qmonitor.core import UnitSystem
    u, osc = UnitSystem(), Oscillator()
    assert free_width(u, osc, s, t + T / 2) == pytest.approx(free_width(u, osc, s, t), rel=1e-9)
    assert free_width(u, osc, s, T / 4) == pytest.approx(2 / s, rel=1e-9)


def _impulsive_recursion(sigma, delta_t, steps):
    """Independent oracle: widths and uncertainties of the tau -> 0 recursion."""
    out = []
    for _ in range(steps):
        out.append(math.sqrt(1 + sigma ** 2))
        s = sigma / math.sqrt(1 + sigma ** 2)
        q = 2 / s ** 2
        sigma = s * math.sqrt(math.cos(delta_t) ** 2 + (q * math.sin(delta_t)) ** 2)
    return out


def _spec(q, tau=0.0, **kw):
    return StrategySpec(oscillator=Oscillator(), measurement=MeasurementSpec(1.0, tau), quiescent=q * T, **kw)


def test_half_period_trace():
    trace = analytic_trace(_spec(0.5, 1e-5 * T))
    assert trace.values[:3] == pytest.approx([5.09902, 1.40056, 1.22074], abs=2e-5)
    assert trace.converged
    assert trace.asymptote == pytest.approx(1.0, rel=1e-2)
    # the approach is algebraic: Delta a_eff^2 = 1 + 1/(n - 1 + 1/25) to leading order
    assert all(a > b > 1.0 for a, b in zip(trace.values[1:], trace.values[2:]))
    n = trace.n[-1]
    assert trace.values[-1] ** 2 == pytest.approx(1 + 1 / (n - 1 + 1 / 25), rel=1e-4)


def test_quarter_period_fixed_point():
    oracle = _impulsive_recursion(5.0, T / 4, 50)
    assert oracle[-1] == pytest.approx(1 + math.sqrt(2), rel=1e-12)
    trace = analytic_trace(_spec(0.25), stop_on_converge=False)
    assert list(trace.values[:10]) == pytest.approx(oracle[:10], rel=1e-12)
    assert trace.values[-1] == pytest.approx(1 + math.sqrt(2), rel=1e-12)


def test_back_to_back_measurements():
    trace = analytic_trace(_spec(0.0, n_max=3), stop_on_converge=False)
    assert trace.pre_widths == pytest.approx([5.0, 0.980581, 0.700140], abs=1e-6)


def test_trace_bookkeeping():
    trace = analytic_trace(_spec(0.3, n_max=7), stop_on_converge=False)
    assert list(trace.n) == list(range(1, 8))
    assert trace.pre_widths[0] == 5.0


def test_trace_requires_gaussian():
    with pytest.raises(ConfigError):
        analytic_trace(_spec(0.5, initial_state=DoublePeakStart()))
    with pytest.raises(ConfigError):
        analytic_trace(StrategySpec(oscillator=Oscillator(lam=1.0), initial_state=GaussianStart()))


def test_trace_singularity_carries_measurement_index():
    spec = StrategySpec(oscillator=Oscillator(), measurement=MeasurementSpec(1e9, T / 2), quiescent=1.0)
    with pytest.raises(EvaluationSingularity) as info:
        analytic_trace(spec)
    assert info.value.context["measurement"] == 1
