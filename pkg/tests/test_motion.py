import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from bcsquench.core import (
    OPTIMAL_DRIVE_AREA,
    ConfigurationError,
    CouplingProfile,
    DispersionSpec,
    ModelParams,
    build_dispersion,
    prepare_initial_state,
)
from bcsquench.dynamics import StepSizeError, evolve
from bcsquench.motion import (
    MotionParams,
    PhysicalityError,
    bloch_from_motional,
    check_physical,
    default_n_max,
    evolve_motion,
    lamb_dicke_element,
    lamb_dicke_parameter,
    prepare_motional_state,
    site_phases,
    thermal_nbar,
    thermal_sample,
)

OMEGA_T = 2 * math.pi * 165e3


def _displacement_matrix(eta, dim=80):
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    return expm(1j * eta * (a + a.T))


@given(st.integers(0, 20), st.integers(0, 20), st.floats(0.0, 0.6), st.floats(0, 2 * math.pi))
def test_element_matches_fock_space_oracle(n, m, eta, phase):
    ref = (np.exp(1j * phase) * _displacement_matrix(eta)[n, m]).real
    got = lamb_dicke_element(0, n, m, MotionParams(OMEGA_T, eta), site_phase=phase)
    assert got == pytest.approx(ref, abs=1e-10)


def test_element_without_recoil_is_site_cosine():
    p = MotionParams(OMEGA_T, 0.0)
    for j in range(5):
        assert lamb_dicke_element(j, 3, 3, p) == pytest.approx(math.cos(j * p.phi))
        assert lamb_dicke_element(j, 3, 4, p) == 0.0


def test_second_sideband_ratio_grows_with_level():
    p = MotionParams(OMEGA_T, 0.17)
    ratios = [lamb_dicke_element(0, n, n + 2, p) / lamb_dicke_element(0, n, n, p) for n in range(6)]
    assert ratios[0] == pytest.approx(-0.0204, abs=1e-4)
    assert np.all(np.diff(np.abs(ratios)) > 0)


def test_strontium_lamb_dicke_parameter():
    assert lamb_dicke_parameter(OMEGA_T) == pytest.approx(0.17, abs=1e-3)


def test_thermal_occupation():
    nbar = thermal_nbar(15e-6, OMEGA_T)
    assert nbar == pytest.approx(1.438, abs=1e-3)
    assert thermal_nbar(0.0, OMEGA_T) == 0.0


@given(st.floats(0.01, 20.0))
def test_default_cutoff_coverage(nbar):
    q = nbar / (1 + nbar)
    n = default_n_max(nbar)
    assert 1 - q ** (n + 1) >= 0.999 - 1e-12
    assert n == 0 or 1 - q**n < 0.999


def test_thermal_sample_statistics():
    p = MotionParams(OMEGA_T, 0.17, nbar=1.438)
    lv = thermal_sample(p, 20000, seed=1)
    assert lv.min() >= 0 and lv.max() <= p.level_cutoff
    assert lv.mean() == pytest.approx(1.438, rel=0.05)
    assert np.array_equal(lv, thermal_sample(p, 20000, seed=1))


def test_params_validation():
    with pytest.raises(ConfigurationError):
        MotionParams(OMEGA_T, 1.2)
    with pytest.raises(ConfigurationError):
        MotionParams(OMEGA_T, 0.1, reach=3)
    with pytest.raises(ConfigurationError):
        MotionParams(OMEGA_T, 0.1, site_factor="lattice")


def _motionless_pair(n, eta=0.0, nbar=0.0, gamma_mo=0.0, gamma=0.0):
    mp = MotionParams(OMEGA_T, eta, nbar=nbar, gamma_mo=gamma_mo)
    phases = site_phases(mp, n)
    couplings = CouplingProfile("incommensurate", np.cos(phases), n / 2)
    eps = build_dispersion(DispersionSpec("uniform", e_w=2 * math.pi * 2.2e6), n)
    params = ModelParams(2 * math.pi * 1.29e6 / couplings.n_eff, couplings, eps, gamma=gamma)
    state = prepare_motional_state(thermal_sample(mp, n, seed=3), phases, mp, OPTIMAL_DRIVE_AREA)
    return mp, params, state


def test_pulse_without_recoil_matches_bloch_state():
    mp, params, state = _motionless_pair(40)
    ref = prepare_initial_state(params.couplings, OPTIMAL_DRIVE_AREA).bloch
    assert np.allclose(bloch_from_motional(state), ref, atol=1e-14)


def test_reduces_to_motionless_model():
    mp, params, state = _motionless_pair(60)
    a = evolve_motion(state, params, mp, dt=4e-9, t_end=1e-6)
    b = evolve(prepare_initial_state(params.couplings, OPTIMAL_DRIVE_AREA), params, dt=4e-9, t_end=1e-6)
    assert np.max(np.abs(a.delta - b.delta)) / abs(b.delta[0]) < 1e-8


def test_density_matrices_stay_physical():
    mp, params, state = _motionless_pair(30, eta=0.17, nbar=1.438, gamma_mo=2 * math.pi * 15e3,
                                         gamma=2 * math.pi * 7.5e3)
    tr = evolve_motion(state, params, mp, dt=4e-9, t_end=1e-6, check_every=10, snapshot_times=[1e-6])
    rho = tr.snapshots[1e-6]
    assert np.allclose(np.trace(rho, axis1=1, axis2=2), 1.0, atol=1e-10)
    assert np.allclose(rho, np.conj(np.swapaxes(rho, 1, 2)), atol=1e-14)
    check_physical(rho)


def test_physicality_check_rejects_bad_states():
    rho = np.zeros((1, 2, 2), complex)
    rho[0] = [[0.5, 0.6], [0.6, 0.5]]
    with pytest.raises(PhysicalityError):
        check_physical(rho)
    rho[0] = [[1.2, 0], [0, -0.2]]
    with pytest.raises(PhysicalityError):
        check_physical(rho)


def test_motion_step_guard():
    mp, params, state = _motionless_pair(10)
    with pytest.raises(StepSizeError):
        evolve_motion(state, params, mp, dt=1e-7, t_end=1e-6)
