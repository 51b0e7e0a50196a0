import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bcsquench.core import (
    ConfigurationError,
    DispersionSpec,
    ModelParams,
    SpinEnsembleState,
    build_dispersion,
    prepare_initial_state,
    sample_couplings,
)
from bcsquench.dynamics import (
    FIRST_MINIMUM,
    QuenchSchedule,
    Stage,
    StepSizeError,
    TriggerTimeout,
    continuous_restore_protocol,
    derivative,
    derivative_pairwise,
    energy,
    evolve,
    evolve_batch,
    staged_quench,
)


def _random_model(n, seed, dissipative=True):
    rng = np.random.default_rng(seed)
    c = sample_couplings("random_cos", n, seed=seed)
    rates = dict(gamma=0.3, big_gamma=0.2, gamma_el=0.1) if dissipative else {}
    p = ModelParams(0.7, c, rng.normal(size=n), **rates)
    s = SpinEnsembleState(rng.normal(size=(3, n)) * 0.2)
    return s, p


@given(st.integers(1, 40), st.integers(0, 10_000), st.booleans())
def test_collective_field_matches_pair_sum(n, seed, dissipative):
    s, p = _random_model(n, seed, dissipative)
    ref = derivative_pairwise(s, p)
    assert np.max(np.abs(derivative(s, p) - ref)) <= 1e-12 * max(1.0, np.max(np.abs(ref)))


@given(st.integers(0, 1000))
def test_unitary_flow_preserves_invariants_instantaneously(seed):
    s, p = _random_model(12, seed, dissipative=False)
    d = derivative(s, p)
    assert np.allclose(np.sum(s.bloch * d, axis=0), 0.0, atol=1e-13)  # |s_k| constant
    assert abs(np.sum(d[2])) < 1e-13  # total Sz constant


def test_step_guard():
    c = sample_couplings("homogeneous", 10)
    p = ModelParams(1.0, c, np.zeros(10))
    s = prepare_initial_state(c, math.pi / 2)
    with pytest.raises(StepSizeError) as err:
        evolve(s, p, dt=0.01, t_end=1.0)
    assert err.value.suggested == pytest.approx(0.005)


def test_spin_count_mismatch():
    c = sample_couplings("homogeneous", 3)
    with pytest.raises(ConfigurationError):
        evolve(prepare_initial_state(sample_couplings("homogeneous", 4), 1.0), ModelParams(1.0, c, np.zeros(3)))


def test_spontaneous_emission_relaxes_to_ground():
    c = sample_couplings("homogeneous", 1)
    s = SpinEnsembleState(np.array([[0.0], [0.0], [0.5]]))
    p = ModelParams(0.0, c, np.zeros(1), gamma=2.0)
    tr = evolve(s, p, dt=0.01, t_end=1.0, snapshot_times=[1.0])
    sz = tr.snapshots[1.0][2, 0]
    assert sz + 0.5 == pytest.approx(math.exp(-2.0), rel=1e-8)


def test_elastic_dephasing_decays_coherence():
    c = sample_couplings("homogeneous", 4)
    s = prepare_initial_state(c, math.pi / 2)
    p = ModelParams(1e-9, c, np.zeros(4), gamma_el=0.5)
    tr = evolve(s, p, dt=0.01, t_end=2.0)
    assert tr.norm_delta[-1] == pytest.approx(math.exp(-1.0), rel=1e-6)


def test_superradiance_drains_collective_coherence():
    n = 50
    c = sample_couplings("homogeneous", n)
    s = prepare_initial_state(c, math.pi / 2)
    p = ModelParams(0.0, c, np.zeros(n), big_gamma=0.1)
    tr = evolve(s, p, dt=0.001, t_end=0.2, snapshot_times=[0.2])
    assert np.all(tr.snapshots[0.2][2] < 0)  # spins pulled towards the ground state
    assert np.allclose(np.linalg.norm(tr.snapshots[0.2], axis=0), 0.5, atol=1e-6)


def test_numpy_batch_is_bit_identical_to_single_runs():
    n = 40
    c = sample_couplings("homogeneous", n)
    eps = build_dispersion(DispersionSpec("uniform", e_w=1.0), n)
    s = prepare_initial_state(c, math.pi / 2)
    chis = np.array([0.02, 0.01, 0.03])
    batch = evolve_batch(np.stack([s.bloch] * 3), c.zeta, chis, eps, 0.01, 3.0, backend="numpy")
    for row, chi in zip(batch, chis):
        single = evolve(s, ModelParams(chi, c, eps), dt=0.01, t_end=3.0)
        assert np.array_equal(row, single.delta)


def test_compiled_backend_agrees_with_numpy():
    n = 60
    c = sample_couplings("random_cos", n, seed=4)
    rng = np.random.default_rng(0)
    eps = rng.normal(size=(2, n))
    s = prepare_initial_state(c, 1.5)
    args = (np.stack([s.bloch] * 2), c.zeta, np.array([0.05, 0.02]), eps, 0.01, 2.0, 0.1, 0.05, 0.02)
    a = evolve_batch(*args, backend="numpy")
    b = evolve_batch(*args, backend="numba")
    assert np.max(np.abs(a - b)) < 1e-12


def test_batch_rows_independent_of_batching():
    n = 30
    c = sample_couplings("random_cos", n, seed=1)
    rng = np.random.default_rng(5)
    eps = rng.normal(size=(3, n))
    s = prepare_initial_state(c, 1.2)
    chis = np.array([0.1, 0.2, 0.3])
    full = evolve_batch(np.stack([s.bloch] * 3), c.zeta, chis, eps, 0.01, 1.0)
    one = evolve_batch(s.bloch[None], c.zeta, chis[1:2], eps[1:2], 0.01, 1.0)
    assert np.array_equal(full[1], one[0])


def test_unknown_backend():
    with pytest.raises(ConfigurationError):
        evolve_batch(np.zeros((1, 3, 2)), np.ones(2), [1.0], np.zeros(2), 0.1, 1.0, backend="gpu")


def test_time_triggered_stage_switches_on_grid():
    n = 20
    c = sample_couplings("homogeneous", n)
    s = prepare_initial_state(c, math.pi / 2)
    p = ModelParams(0.05, c, np.zeros(n))
    sched = QuenchSchedule((Stage(0.5, chi=0.0),))
    tr = evolve(s, p, sched, dt=0.01, t_end=1.0)
    assert tr.switch_times == [pytest.approx(0.5)]
    assert np.all(tr.delta[51:] == 0)  # Delta is reported with the new chi


def test_schedule_validation():
    with pytest.raises(ConfigurationError):
        QuenchSchedule((Stage(1.0), Stage(0.5)))
    with pytest.raises(ConfigurationError):
        QuenchSchedule((Stage(FIRST_MINIMUM), Stage(FIRST_MINIMUM)))


def test_first_minimum_trigger_and_rank_reassignment():
    n = 200
    c = sample_couplings("homogeneous", n)
    e_w = 1.0
    eps = build_dispersion(DispersionSpec("bimodal_uniform", delta_s=3.0, e_w=e_w), n)
    s = prepare_initial_state(c, math.pi / 2)
    p = ModelParams(1.0 / n, c, eps)
    tr = staged_quench(s, p, continuous_restore_protocol(e_w), dt=0.005, t_end=20.0)
    assert len(tr.switch_times) == 1
    k = int(round(tr.switch_times[0] / tr.dt))
    nd = tr.norm_delta
    assert nd[k] <= nd[k - 1] and nd[k] <= nd[k + 1]


def test_trigger_timeout():
    n = 10
    c = sample_couplings("homogeneous", n)
    s = prepare_initial_state(c, math.pi / 2)
    p = ModelParams(0.1 / n, c, np.zeros(n))  # |Delta| constant, never a minimum
    with pytest.raises(TriggerTimeout):
        staged_quench(s, p, continuous_restore_protocol(1.0), dt=0.01, t_end=1.0)


def test_energy_conserved_short_run():
    s, p = _random_model(16, 3, dissipative=False)
    tr = evolve(s, p, dt=0.001, t_end=2.0, snapshot_times=[2.0])
    e0, e1 = energy(s.bloch, p), energy(tr.snapshots[2.0], p)
    assert e1 == pytest.approx(e0, rel=1e-9, abs=1e-12)
