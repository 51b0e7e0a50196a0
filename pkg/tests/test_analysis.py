import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bcsquench.analysis import (
    PhaseMetrics,
    RegressionError,
    Thresholds,
    WindowError,
    classify_phase_dynamical,
    decay_time,
    higgs_regression,
    oscillation_metrics,
    oscillation_peak,
    spectrum,
    window_metrics,
)
from bcsquench.dynamics import Trajectory
from bcsquench.lax import PhaseLabel

T = np.arange(0.0, 20e-6, 1e-9)


@given(st.floats(0.3e6, 5e6), st.floats(0.01, 0.3), st.floats(0, 2 * math.pi), st.integers(0, 3))
def test_sinusoid_peak_frequency_and_amplitude(f, b, phase, order):
    y = 0.4 + b * np.cos(2 * math.pi * f * T + phase)
    peak = oscillation_peak(spectrum((T, y), 0.0, 20e-6, detrend_order=order))
    assert peak.freq == pytest.approx(f, rel=2e-3)
    assert peak.amplitude == pytest.approx(b, rel=0.03)


@given(st.integers(0, 1000))
def test_parseval_for_noise(seed):
    y = np.random.default_rng(seed).normal(size=4096)
    t = np.arange(4096.0)
    spec = spectrum((t, y), 0, 4096, detrend_order=1)
    assert spec.integrated_variance() == pytest.approx(spec.variance, rel=0.1)


def test_flat_signal_has_no_peak():
    spec = spectrum((T, np.full(T.size, 0.7)), 0, 20e-6)
    assert not oscillation_peak(spec).found


def test_explicit_floor_suppresses_white_noise():
    y = np.random.default_rng(0).normal(size=T.size) * 1e-3
    spec = spectrum((T, y), 0, 20e-6)
    assert not oscillation_peak(spec, floor=1e-8).found
    tone = y + 0.01 * np.cos(2 * math.pi * 1.5e6 * T)
    peak = oscillation_peak(spectrum((T, tone), 0, 20e-6), floor=1e-8)
    assert peak.freq == pytest.approx(1.5e6, rel=1e-3)


def test_window_rules():
    y = np.ones(T.size)
    with pytest.raises(WindowError):
        window_metrics((T, y), 5e-6, 5e-6)
    with pytest.raises(WindowError):
        window_metrics((T, y), 0, 30e-6)
    with pytest.raises(WindowError):
        window_metrics((T, y), 0, 10e-9)
    # the end of the trajectory (plus one step) is a valid closing edge
    assert window_metrics((T, y), 0, 20e-6).avg == 1.0


def test_window_metrics_values():
    y = 0.5 + 0.1 * np.sin(2 * math.pi * 1e6 * T)
    m = window_metrics((T, y), 0, 20e-6)
    assert m.avg == pytest.approx(0.5, abs=1e-6)
    assert m.std == pytest.approx(0.1 / math.sqrt(2), rel=1e-4)


def test_trajectory_input_uses_normalised_modulus():
    delta = 3.0 * np.exp(1j * 7e6 * T)
    tr = Trajectory(T, delta, 3.0)
    assert window_metrics(tr, 1e-6, 5e-6).avg == pytest.approx(1.0)
    assert spectrum(tr, 1e-6, 5e-6, quantity="abs2").variance < 1e-20
    with pytest.raises(ValueError):
        spectrum(tr, 1e-6, 5e-6, quantity="phase")


def test_oscillation_metrics_bundle():
    y = 0.3 + 0.05 * np.cos(2 * math.pi * 2e6 * T)
    m = oscillation_metrics((T, y), 0, 20e-6)
    assert m.osc_freq == pytest.approx(2e6, rel=1e-3) and m.avg == pytest.approx(0.3, abs=1e-4)


@given(st.floats(0.5e-6, 8e-6))
def test_exponential_fit_recovers_tau(tau):
    fit = decay_time((T, np.exp(-T / tau)), 0, 20e-6)
    assert fit.tau == pytest.approx(tau, rel=1e-6)
    assert not fit.unbounded and float(fit) == fit.tau


def test_crossing_method():
    tau = 3e-6
    fit = decay_time((T, 0.8 * np.exp(-T / tau)), 0, 20e-6, method="crossing")
    assert fit.tau == pytest.approx(tau, rel=1e-4)
    flat = decay_time((T, np.ones(T.size)), 0, 20e-6, method="crossing")
    assert flat.unbounded and math.isinf(flat.tau)
    with pytest.raises(ValueError):
        decay_time((T, np.ones(T.size)), 0, 20e-6, method="median")


def test_non_decaying_trace_is_unbounded():
    assert decay_time((T, np.ones(T.size)), 0, 20e-6).unbounded


def test_sinc_decay_law():
    # free dephasing of a flat band of width E: |Delta| = |sinc(E t / 2)|
    e = 1.0
    t = np.linspace(0, 40, 40001)
    y = np.abs(np.sinc(e * t / (2 * math.pi)))
    cross = decay_time((t, y), 0, 20, method="crossing")
    assert e * cross.tau / (2 * math.pi) == pytest.approx(0.7, rel=0.02)


@pytest.mark.parametrize("avg,osc,label", [
    (0.01, 0.5, PhaseLabel.I),
    (0.5, 0.001, PhaseLabel.II),
    (0.5, 0.1, PhaseLabel.III),
])
def test_classifier(avg, osc, label):
    assert classify_phase_dynamical(PhaseMetrics(avg, 0.0, osc)) is label


def test_plateau_label():
    th = Thresholds(plateau=0.2)
    assert classify_phase_dynamical(PhaseMetrics(0.1, 0.0, 0.0), th) is PhaseLabel.II_PRIME
    assert classify_phase_dynamical(PhaseMetrics(0.3, 0.0, 0.0), th) is PhaseLabel.II


@given(st.floats(0.2, 5.0), st.floats(-1.0, 1.0))
def test_higgs_regression_exact_line(slope, intercept):
    d = np.array([0.3, 0.5, 0.7, 1.1])
    fit = higgs_regression([(slope * 2 * x + intercept, x) for x in d])
    assert fit.slope == pytest.approx(slope, rel=1e-9)
    assert fit.intercept == pytest.approx(intercept, abs=1e-9)


def test_higgs_regression_degenerate():
    with pytest.raises(RegressionError):
        higgs_regression([(1.0, 0.5), (1.1, 0.5)])
    with pytest.raises(RegressionError):
        higgs_regression([(1.0, 0.5)] * 4)
