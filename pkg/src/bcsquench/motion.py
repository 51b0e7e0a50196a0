"""Axial motion of the trapped atoms in the mean-field model.

Every atom j sits in harmonic level n_j and only the neighbouring levels
n_j - r .. n_j + r (reach r, default 1) are kept.  The state of atom j is its
one-body density matrix rho_j over the 2(2r+1) states |l, sigma>, ordered
with the up block first.  Its elements are rho_ab = <c_b^dag c_a>, so the
order-parameter contribution is <S_{p down, q up}> = rho_{q up, p down}.

Mean-field dynamics
-------------------
With C = sum_k sum_pq zeta_k^{pq} rho^k_{q up, p down} (Delta = chi C) and the
lowering operator l_j = sum_nm zeta_j^{nm} |m down><n up|, every atom evolves
under

    H_j = sum_l (l - n_j) omega_T + eps_j P_up
          + (chi + i Gamma/2) C^* l_j + (chi - i Gamma/2) C l_j^dag

where the anti-Hermitian looking parts are the mean-field image of the
collective superradiant jump (they keep rho_j Hermitian).  Dissipators:

* spontaneous emission, one jump |l down><l up| per level, rate gamma;
* electronic dephasing, jumps sqrt(gamma_el) P_sigma: every up/down
  coherence decays at gamma_el;
* motional dephasing, jumps sqrt(gamma_mo) Q_l (level projectors): every
  coherence between different levels decays at gamma_mo.

Both dephasing channels act as rho_ab -> -(rate/2)(p_a - p_b)^2 rho_ab per
projector, which is where the rates above come from.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import constants
from scipy.linalg import expm

from .core import ConfigurationError, INCOMMENSURATE_PHASE, ModelParams
from .dynamics import STABILITY_LIMIT, StepSizeError, Trajectory, rk4_step
from .specfun import laguerre

#: cumulative thermal weight kept by the default level cutoff
THERMAL_COVERAGE = 0.999
SR88_MASS = 87.9056 * constants.atomic_mass
CAVITY_WAVELENGTH = 689e-9


class PhysicalityError(RuntimeError):
    """Populations left [0, 1] or a coherence broke Cauchy-Schwarz."""


def lamb_dicke_parameter(omega_t: float, wavelength: float = CAVITY_WAVELENGTH, mass: float = SR88_MASS) -> float:
    """eta = k_c sqrt(hbar / 2 M omega_T)."""
    return 2 * math.pi / wavelength * math.sqrt(constants.hbar / (2 * mass * omega_t))


def thermal_nbar(temperature: float, omega_t: float) -> float:
    """Bose occupation 1 / (exp(hbar omega_T / k_B T) - 1)."""
    if temperature <= 0:
        return 0.0
    return 1.0 / math.expm1(constants.hbar * omega_t / (constants.k * temperature))


def default_n_max(nbar: float, coverage: float = THERMAL_COVERAGE) -> int:
    """Smallest n whose cumulative thermal weight reaches ``coverage``."""
    if nbar <= 0:
        return 0
    q = nbar / (1 + nbar)
    # 1 - q^(n+1) >= coverage
    return max(0, int(math.ceil(math.log(1 - coverage) / math.log(q) - 1 - 1e-12)))


@dataclass(frozen=True)
class MotionParams:
    omega_t: float
    eta: float
    nbar: float = 0.0
    n_max: Optional[int] = None
    phi: float = INCOMMENSURATE_PHASE
    gamma_mo: float = 0.0
    reach: int = 1
    site_factor: str = "incommensurate"  # or "random_cos"

    def __post_init__(self):
        if not 0 <= self.eta < 1:
            raise ConfigurationError("eta must lie in [0, 1)")
        if self.nbar < 0 or not math.isfinite(self.nbar):
            raise ConfigurationError("nbar must be finite and nonnegative")
        if self.omega_t < 0 or self.gamma_mo < 0:
            raise ConfigurationError("omega_t and gamma_mo must be nonnegative")
        if self.reach not in (1, 2):
            raise ConfigurationError("reach must be 1 or 2")
        if self.n_max is not None and self.n_max < 0:
            raise ConfigurationError("n_max must be nonnegative")
        if self.site_factor not in ("incommensurate", "random_cos"):
            raise ConfigurationError(f"unknown site factor {self.site_factor!r}")

    @property
    def level_cutoff(self) -> int:
        return default_n_max(self.nbar) if self.n_max is None else self.n_max


def _element_complex(n: int, m: int, eta: float) -> complex:
    s = abs(n - m)
    lo, hi = min(n, m), max(n, m)
    ratio = math.exp(0.5 * (math.lgamma(lo + 1) - math.lgamma(hi + 1)))
    return (1j * eta) ** s * math.exp(-eta * eta / 2) * ratio * laguerre(lo, s, eta * eta)


def lamb_dicke_element(j: int, n: int, m: int, p: MotionParams, site_phase: Optional[float] = None) -> float:
    """zeta_j^{nm} = cos(j phi) Re[z] - sin(j phi) Im[z] for the level pair (n, m).

    z = (i eta)^s exp(-eta^2/2) sqrt(n_<!/n_>!) L^s_{n_<}(eta^2), s = |n - m|.
    ``site_phase`` replaces j phi (used for randomly placed sites).
    """
    if n < 0 or m < 0:
        raise ConfigurationError("levels must be nonnegative")
    theta = j * p.phi if site_phase is None else site_phase
    z = _element_complex(n, m, p.eta)
    return math.cos(theta) * z.real - math.sin(theta) * z.imag


def thermal_sample(p: MotionParams, n_atoms: int, seed: int = 0) -> np.ndarray:
    """Levels from the thermal distribution truncated at the level cutoff."""
    if p.nbar == 0:
        return np.zeros(n_atoms, dtype=int)
    q = p.nbar / (1 + p.nbar)
    n_max = p.level_cutoff
    u = np.random.default_rng(seed).random(n_atoms)
    # inverse CDF of the geometric law renormalised to 0..n_max
    total = 1 - q ** (n_max + 1)
    n = np.floor(np.log1p(-u * total) / math.log(q)).astype(int)
    return np.clip(n, 0, n_max)


def site_phases(p: MotionParams, n_atoms: int, seed: int = 0) -> np.ndarray:
    if p.site_factor == "incommensurate":
        return np.arange(n_atoms) * p.phi
    return np.random.default_rng(seed).uniform(0, 2 * math.pi, n_atoms)


@dataclass
class MotionalSpinState:
    """Per-atom density matrices rho (N, D, D) with D = 2 (2 reach + 1)."""

    rho: np.ndarray
    levels: np.ndarray
    site_phase: np.ndarray
    reach: int = 1
    time: float = 0.0

    @property
    def n_atoms(self) -> int:
        return self.rho.shape[0]

    @property
    def n_local(self) -> int:
        return 2 * self.reach + 1

    def valid_levels(self) -> np.ndarray:
        """(N, L) mask of retained levels that exist (l >= 0)."""
        offs = np.arange(-self.reach, self.reach + 1)
        return (self.levels[:, None] + offs[None, :]) >= 0


def coupling_blocks(levels: np.ndarray, phases: np.ndarray, p: MotionParams, reach: Optional[int] = None) -> np.ndarray:
    """(N, L, L) matrices Z_j[a, b] = zeta_j^{l_a l_b} over the retained levels."""
    reach = p.reach if reach is None else reach
    offs = np.arange(-reach, reach + 1)
    n_loc = len(offs)
    cache: dict = {}
    re = np.zeros((len(levels), n_loc, n_loc))
    im = np.zeros_like(re)
    for idx, n in enumerate(levels):
        for a in range(n_loc):
            la = int(n + offs[a])
            if la < 0:
                continue
            for b in range(n_loc):
                lb = int(n + offs[b])
                if lb < 0 or abs(la - lb) > reach:
                    continue
                key = (min(la, lb), max(la, lb))
                if key not in cache:
                    cache[key] = _element_complex(key[0], key[1], p.eta)
                z = cache[key]
                re[idx, a, b] = z.real
                im[idx, a, b] = z.imag
    c = np.cos(phases)[:, None, None]
    s = np.sin(phases)[:, None, None]
    return c * re - s * im


def prepare_motional_state(
    levels: np.ndarray,
    phases: np.ndarray,
    p: MotionParams,
    drive_area: float,
    phase_spread: Optional[np.ndarray] = None,
) -> MotionalSpinState:
    """Instantaneous pulse from |n_j, down> with the level-resolved drive.

    U_j = exp((drive_area/2)(l_j^dag - l_j)) reduces to the y-axis rotation
    used by `core.prepare_initial_state` when eta = 0.  ``phase_spread``
    (per atom, radians) then multiplies every up/down coherence by
    exp(-i phi_j).
    """
    levels = np.asarray(levels, dtype=int)
    z = coupling_blocks(levels, phases, p)
    n_at, n_loc = z.shape[0], z.shape[1]
    d = 2 * n_loc
    rho = np.zeros((n_at, d, d), dtype=complex)
    center = p.reach
    for j in range(n_at):
        lower = np.zeros((d, d))
        lower[n_loc:, :n_loc] = z[j]
        u = expm(0.5 * drive_area * (lower.T - lower))
        psi = u[:, n_loc + center]
        rho[j] = np.outer(psi, psi.conj())
    if phase_spread is not None:
        ph = np.exp(-1j * np.asarray(phase_spread))[:, None, None]
        rho[:, :n_loc, n_loc:] *= ph
        rho[:, n_loc:, :n_loc] *= ph.conj()
    return MotionalSpinState(rho, levels, np.asarray(phases, float), p.reach)


class _MotionRHS:
    def __init__(self, state: MotionalSpinState, params: ModelParams, p: MotionParams):
        self.n_loc = state.n_local
        nl = self.n_loc
        self.z = coupling_blocks(state.levels, state.site_phase, p, state.reach)
        offs = np.arange(-state.reach, state.reach + 1)
        lvl = np.concatenate([offs, offs])
        sigma_up = np.concatenate([np.ones(nl, bool), np.zeros(nl, bool)])
        diag = np.tile(lvl * p.omega_t, (state.n_atoms, 1)).astype(complex)
        diag[:, :nl] += params.dispersion[:, None]
        self.h_diag = diag
        self.chi = params.chi
        self.big_gamma = params.big_gamma
        self.gamma = params.gamma
        self.damp = (
            params.gamma_el * (sigma_up[:, None] != sigma_up[None, :])
            + p.gamma_mo * (lvl[:, None] != lvl[None, :])
        )
        # spontaneous emission: anticommutator with P_up decays rows/cols of up states
        up = sigma_up.astype(float)
        self.emission = 0.5 * params.gamma * (up[:, None] + up[None, :])
        self.total_damp = self.damp + self.emission

    def collective(self, rho: np.ndarray) -> complex:
        nl = self.n_loc
        return complex(np.einsum("jpq,jqp->", self.z, rho[:, :nl, nl:]))

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        nl = self.n_loc
        c = self.collective(rho)
        # H = diag + [[0, b Z], [a Z, 0]] with a = (chi + i G/2) C^*, b = conj(a)
        a = (self.chi + 0.5j * self.big_gamma) * c.conjugate()
        b = a.conjugate()
        # -i [H, rho] blockwise, exploiting the off-diagonal block structure
        hr = self.h_diag[:, :, None] * rho
        rh = rho * self.h_diag[:, None, :]
        zr_top = b * (self.z @ rho[:, nl:, :])  # rows of up block
        zr_bot = a * (self.z @ rho[:, :nl, :])  # rows of down block
        rz_left = a * (rho[:, :, nl:] @ self.z)  # cols of up block
        rz_right = b * (rho[:, :, :nl] @ self.z)  # cols of down block
        comm = hr - rh
        comm[:, :nl, :] += zr_top
        comm[:, nl:, :] += zr_bot
        comm[:, :, :nl] -= rz_left
        comm[:, :, nl:] -= rz_right
        out = -1j * comm - self.total_damp * rho
        if self.gamma:
            idx = np.arange(nl)
            out[:, nl + idx, nl + idx] += self.gamma * rho[:, idx, idx]
        return out


def motion_fastest_rate(params: ModelParams, p: MotionParams, reach: int = 1) -> float:
    z2 = float(np.sum(params.zeta**2))
    eps = float(np.max(np.abs(params.dispersion))) if params.n_spins else 0.0
    return max(eps, abs(params.chi) * z2, params.big_gamma * z2, reach * p.omega_t,
               params.gamma, params.gamma_el, p.gamma_mo)


def check_physical(rho: np.ndarray, tol: float = 1e-7) -> None:
    """Populations in [0, 1] and |rho_ab|^2 <= rho_aa rho_bb."""
    pops = np.real(np.diagonal(rho, axis1=1, axis2=2))
    if pops.min() < -tol or pops.max() > 1 + tol:
        raise PhysicalityError("population outside [0, 1]")
    bound = pops[:, :, None] * pops[:, None, :]
    excess = float(np.max(np.abs(rho) ** 2 - bound))
    if excess > tol:
        raise PhysicalityError(f"coherence exceeds the Cauchy-Schwarz bound by {excess:.3g}")


def evolve_motion(
    initial: MotionalSpinState,
    params: ModelParams,
    motion: MotionParams,
    dt: float,
    t_end: float,
    check_every: int = 100,
    snapshot_times=(),
) -> Trajectory:
    """RK4 evolution of the level-resolved mean-field model.

    ``params`` supplies chi, the rates and eps_j (its coupling profile only
    sets the stability scale); ``motion`` supplies omega_T, eta and gamma_mo.
    Snapshots hold the (N, D, D) density matrices.
    """
    if initial.n_atoms != params.n_spins:
        raise ConfigurationError("state and params disagree on the number of atoms")
    rate = motion_fastest_rate(params, motion, initial.reach)
    if dt <= 0 or (rate > 0 and dt * rate > STABILITY_LIMIT * (1 + 1e-12)):
        raise StepSizeError(dt, STABILITY_LIMIT / rate if rate > 0 else math.inf)
    rhs = _MotionRHS(initial, params, motion)
    n_steps = int(round(t_end / dt))
    times = initial.time + dt * np.arange(n_steps + 1)
    delta = np.empty(n_steps + 1, dtype=complex)
    snap_idx = {int(round(t / dt)): t for t in snapshot_times}
    snapshots = {}
    rho = initial.rho.copy()
    delta[0] = params.chi * rhs.collective(rho)
    if 0 in snap_idx:
        snapshots[snap_idx[0]] = rho.copy()
    for i in range(1, n_steps + 1):
        rho = rk4_step(rhs, rho, dt)
        delta[i] = params.chi * rhs.collective(rho)
        if check_every and i % check_every == 0:
            check_physical(rho)
        if i in snap_idx:
            snapshots[snap_idx[i]] = rho.copy()
    return Trajectory(times, delta, float(abs(delta[0])), snapshots)


def bloch_from_motional(state: MotionalSpinState) -> np.ndarray:
    """Level-summed Bloch vectors (3, N) of a motional state."""
    nl = state.n_local
    coh = np.trace(state.rho[:, :nl, nl:], axis1=1, axis2=2)
    pu = np.real(np.trace(state.rho[:, :nl, :nl], axis1=1, axis2=2))
    pd = np.real(np.trace(state.rho[:, nl:, nl:], axis1=1, axis2=2))
    return np.stack([coh.real, -coh.imag, 0.5 * (pu - pd)])
