import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bcsquench.dynamics import evolve
from bcsquench.twospin import (
    TwoSpinParams,
    two_spin_conserved,
    two_spin_delta,
    two_spin_delta_min,
    two_spin_frequency,
    two_spin_model,
    two_spin_potential,
)

ratios = st.floats(0.05, 3.0).filter(lambda r: abs(r - 1) > 1e-3)


@given(ratios)
def test_starts_at_one_half(r):
    assert two_spin_delta(0.0, TwoSpinParams(1.0, r)) == pytest.approx(0.5)


@given(ratios, st.floats(0.0, 40.0))
def test_trajectory_stays_in_allowed_region(r, t):
    p = TwoSpinParams(1.0, r)
    d = two_spin_delta(t, p)
    assert two_spin_delta_min(p) - 1e-12 <= d <= 0.5 + 1e-12
    assert two_spin_potential(d, p) <= 1e-12


@given(ratios)
def test_frequency_is_period_of_trace(r):
    p = TwoSpinParams(1.0, r)
    w = two_spin_frequency(p).omega
    t = np.linspace(0, 5, 11)
    assert np.allclose(two_spin_delta(t + 2 * math.pi / w, p), two_spin_delta(t, p), atol=1e-9)


def test_dip_at_unit_ratio():
    f = two_spin_frequency(TwoSpinParams(2.0, 2.0))
    assert f.dip and f.omega == 0.0
    # omega vanishes logarithmically from both sides
    below = [two_spin_frequency(TwoSpinParams(1.0, 1 - 10.0**-k)).omega for k in range(1, 8)]
    above = [two_spin_frequency(TwoSpinParams(1.0, 1 + 10.0**-k)).omega for k in range(1, 8)]
    assert np.all(np.diff(below) < 0) and np.all(np.diff(above) < 0)
    assert below[-1] < 0.2 and above[-1] < 0.2


def test_limits():
    # no splitting: Delta frozen at 1/2
    assert np.allclose(two_spin_delta(np.linspace(0, 10, 5), TwoSpinParams(1.0, 0.0)), 0.5)
    # strong splitting: |cos(delta_s t / 2)| / 2 and omega -> delta_s
    p = TwoSpinParams(1.0, 1e4)
    assert two_spin_frequency(p).omega == pytest.approx(1e4, rel=1e-7)


@pytest.mark.parametrize("r", [0.3, 0.8, 1.4, 2.5])
def test_numerical_two_spin_run(r):
    p = TwoSpinParams(1.0, r)
    s0, mp = two_spin_model(p, n=4.0)
    tr = evolve(s0, mp, dt=0.005, t_end=10.0, snapshot_times=[10.0])
    assert np.max(np.abs(np.abs(tr.delta) / mp.chi_n - two_spin_delta(tr.times, p))) < 1e-8
    a = two_spin_conserved(s0.bloch[:, 0], s0.bloch[:, 1], p, 4.0)
    b = two_spin_conserved(tr.snapshots[10.0][:, 0], tr.snapshots[10.0][:, 1], p, 4.0)
    assert np.allclose(a, b, atol=1e-10)
