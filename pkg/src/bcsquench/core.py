"""Domain types, dispersion and coupling construction, state preparation.

Conventions
-----------
* hbar = 1.  Every rate and energy is an angular frequency in rad/s and every
  time is in seconds.  Helpers `mhz` / `to_mhz` convert from and to the
  ordinary frequencies (MHz) used for reporting.
* A spin ensemble is stored as a real array of shape ``(..., 3, N)`` holding
  the mean-field expectation values (Sx, Sy, Sz) of every pseudospin.  Leading
  axes, when present, index independent ensembles integrated side by side.
* The order parameter is ``Delta = chi * sum_k zeta_k <S_k^->`` with
  ``S^- = Sx - i Sy``.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

#: phi = pi * lambda_L / lambda_c for the 813 nm lattice inside the 689 nm cavity
INCOMMENSURATE_PHASE = math.pi * 813.0 / 689.0

#: drive area maximising J1, i.e. the largest initial |Delta| for cosine couplings
OPTIMAL_DRIVE_AREA = 0.586 * math.pi

COUPLING_KINDS = ("homogeneous", "incommensurate", "random_cos")
DISPERSION_KINDS = ("uniform", "bimodal_uniform", "bimodal_imbalanced", "empirical")


class ConfigurationError(ValueError):
    """Inconsistent model or state specification."""


def mhz(f_mhz: float) -> float:
    """Ordinary frequency in MHz -> angular frequency in rad/s."""
    return 2.0 * math.pi * 1e6 * f_mhz


def to_mhz(omega: float) -> float:
    """Angular frequency in rad/s -> ordinary frequency in MHz."""
    return omega / (2.0 * math.pi * 1e6)


@dataclass(frozen=True)
class CouplingProfile:
    kind: str
    zeta: np.ndarray
    n_eff: float

    @property
    def n_spins(self) -> int:
        return len(self.zeta)


@dataclass(frozen=True)
class DispersionSpec:
    """Recipe for the single-particle energies eps_k (rad/s).

    ``uniform`` samples [-e_w/2, e_w/2].  The bimodal kinds put half the spins
    in a band of width ``e_w`` centred at -delta_s/2 and the other half in a
    band centred at +delta_s/2 (of width ``e_w_second`` for the imbalanced
    kind).  With ``stratified`` each band is an equal-weight midpoint grid
    rather than i.i.d. uniform draws.
    """

    kind: str = "uniform"
    delta_s: float = 0.0
    e_w: float = 0.0
    e_w_second: Optional[float] = None
    empirical_samples: Optional[Sequence[float]] = None
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if self.kind not in DISPERSION_KINDS:
            raise ConfigurationError(f"unknown dispersion kind {self.kind!r}")
        if self.e_w < 0 or (self.e_w_second is not None and self.e_w_second < 0):
            raise ConfigurationError("band widths must be nonnegative")
        if self.kind == "bimodal_imbalanced" and self.e_w_second is None:
            raise ConfigurationError("bimodal_imbalanced needs e_w_second")
        if self.kind == "empirical" and self.empirical_samples is None:
            raise ConfigurationError("empirical dispersion needs samples")


@dataclass
class ModelParams:
    """Everything the mean-field equations need.

    ``chi`` is the per-pair exchange rate, so the collective scale is
    ``chi * couplings.n_eff``.  ``dispersion`` is the realised eps_k array.
    """

    chi: float
    couplings: CouplingProfile
    dispersion: np.ndarray
    gamma: float = 0.0
    big_gamma: float = 0.0
    gamma_el: float = 0.0
    gamma_mo: float = 0.0

    def __post_init__(self):
        self.dispersion = np.asarray(self.dispersion, dtype=float)
        for name in ("gamma", "big_gamma", "gamma_el", "gamma_mo"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be nonnegative")
        if self.dispersion.shape != (self.couplings.n_spins,):
            raise ConfigurationError(
                f"dispersion has shape {self.dispersion.shape}, "
                f"expected ({self.couplings.n_spins},)"
            )

    @property
    def n_spins(self) -> int:
        return self.couplings.n_spins

    @property
    def zeta(self) -> np.ndarray:
        return self.couplings.zeta

    @property
    def chi_n(self) -> float:
        """Collective interaction scale chi * N_eff."""
        return self.chi * self.couplings.n_eff

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def ideal(self) -> "ModelParams":
        """Copy with every dissipative rate set to zero."""
        return self.replace(gamma=0.0, big_gamma=0.0, gamma_el=0.0, gamma_mo=0.0)


@dataclass
class SpinEnsembleState:
    bloch: np.ndarray
    time: float = 0.0
    levels: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        self.bloch = np.asarray(self.bloch, dtype=float)
        if self.bloch.ndim != 2 or self.bloch.shape[0] != 3:
            raise ConfigurationError("bloch array must have shape (3, N)")

    @property
    def n_spins(self) -> int:
        return self.bloch.shape[1]

    def copy(self) -> "SpinEnsembleState":
        levels = None if self.levels is None else self.levels.copy()
        return SpinEnsembleState(self.bloch.copy(), self.time, levels)

    def norms(self) -> np.ndarray:
        return np.sqrt(np.sum(self.bloch**2, axis=0))


def _band(lo: float, width: float, count: int, rng, stratified: bool) -> np.ndarray:
    if count == 0:
        return np.empty(0)
    if stratified:
        return lo + width * (np.arange(count) + 0.5) / count
    return lo + width * rng.random(count)


def build_dispersion(spec: DispersionSpec, n: int) -> np.ndarray:
    """Realise the single-particle energies eps_k (rad/s) for ``n`` spins."""
    if n < 1:
        raise ConfigurationError("need at least one spin")
    if spec.kind == "empirical":
        samples = np.asarray(spec.empirical_samples, dtype=float)
        if samples.shape != (n,):
            raise ConfigurationError(
                f"empirical dispersion has {samples.size} samples, need {n}"
            )
        return samples.copy()
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "uniform":
        return _band(-spec.e_w / 2, spec.e_w, n, rng, spec.stratified)
    n1 = n // 2
    n2 = n - n1
    w2 = spec.e_w if spec.kind == "bimodal_uniform" else spec.e_w_second
    lower = _band(-spec.delta_s / 2 - spec.e_w / 2, spec.e_w, n1, rng, spec.stratified)
    upper = _band(spec.delta_s / 2 - w2 / 2, w2, n2, rng, spec.stratified)
    return np.concatenate([lower, upper])


def sample_couplings(kind: str, n: int, seed: int = 0, stratified: bool = False) -> CouplingProfile:
    """Atom-cavity coupling factors zeta_k.

    ``random_cos`` draws zeta = cos(x) with x uniform on [0, 2 pi); with
    ``stratified`` the phases form a midpoint grid assigned to spins in random
    order, which removes sampling noise from the zeta histogram.
    """
    if n < 1:
        raise ConfigurationError("need at least one spin")
    if kind == "homogeneous":
        return CouplingProfile(kind, np.ones(n), float(n))
    if kind == "incommensurate":
        zeta = np.cos(np.arange(n) * INCOMMENSURATE_PHASE)
        return CouplingProfile(kind, zeta, n / 2.0)
    if kind == "random_cos":
        rng = np.random.default_rng(seed)
        if stratified:
            x = 2.0 * math.pi * (rng.permutation(n) + 0.5) / n
        else:
            x = rng.uniform(0.0, 2.0 * math.pi, n)
        return CouplingProfile(kind, np.cos(x), n / 2.0)
    raise ConfigurationError(f"unknown coupling kind {kind!r}")


def phase_spread(dispersion: np.ndarray, phi0: float) -> np.ndarray:
    """Per-spin phase phi_k = phi0 (eps_k - eps_min) / (eps_max - eps_min)."""
    eps = np.asarray(dispersion, dtype=float)
    if phi0 == 0.0:
        return np.zeros_like(eps)
    lo, hi = eps.min(), eps.max()
    if hi == lo:
        raise ConfigurationError("phase spread needs a nondegenerate dispersion")
    return phi0 * (eps - lo) / (hi - lo)


def rotate_z(bloch: np.ndarray, phi) -> np.ndarray:
    """Rotate each spin about z so that S^- -> S^- exp(-i phi)."""
    c, s = np.cos(phi), np.sin(phi)
    out = bloch.copy()
    out[0] = c * bloch[0] - s * bloch[1]
    out[1] = s * bloch[0] + c * bloch[1]
    return out


def prepare_initial_state(
    couplings: CouplingProfile,
    drive_area: float,
    phase_spread_max: float = 0.0,
    dispersion: Optional[np.ndarray] = None,
) -> SpinEnsembleState:
    """Pulse every spin from the south pole, then apply the optional phase spread.

    Spin k is tipped by zeta_k * drive_area about y, landing at
    (sin(theta)/2, 0, -cos(theta)/2) so that a homogeneous pi/2 pulse gives
    (1/2, 0, 0).  A nonzero ``phase_spread_max`` then rotates each spin about z
    by an angle proportional to its (post-quench) energy eps_k.
    """
    if not 0.0 <= drive_area <= 2.0 * math.pi + 1e-12:
        raise ConfigurationError("drive area must lie in [0, 2 pi]")
    if phase_spread_max < 0:
        raise ConfigurationError("phase spread must be nonnegative")
    theta = couplings.zeta * drive_area
    bloch = np.stack([0.5 * np.sin(theta), np.zeros_like(theta), -0.5 * np.cos(theta)])
    if phase_spread_max > 0.0:
        if dispersion is None:
            raise ConfigurationError("phase spread needs the dispersion")
        bloch = rotate_z(bloch, phase_spread(dispersion, phase_spread_max))
    return SpinEnsembleState(bloch)


def collective_sums(bloch: np.ndarray, zeta: np.ndarray):
    """A = sum_k zeta_k Sx_k and B = sum_k zeta_k Sy_k along the spin axis."""
    return np.sum(zeta * bloch[..., 0, :], axis=-1), np.sum(zeta * bloch[..., 1, :], axis=-1)


def order_parameter(state, params: ModelParams) -> complex:
    """Delta_BCS = chi * sum_k zeta_k (Sx_k - i Sy_k) in rad/s."""
    bloch = state.bloch if isinstance(state, SpinEnsembleState) else np.asarray(state)
    if bloch.shape[-1] != params.n_spins:
        raise ConfigurationError("state and params disagree on the number of spins")
    a, b = collective_sums(bloch, params.zeta)
    return params.chi * (a - 1j * b)


def output_field(delta: complex, g: float, delta_c: float, kappa_m: float, chi: float) -> complex:
    """Field amplitude leaking out of the cavity, in sqrt(photons/s).

    alpha_out = -(g / delta_c) sqrt(kappa_m) sum_k zeta_k <S_k^->, with the
    collective coherence recovered as Delta / chi.
    """
    if delta_c == 0:
        raise ZeroDivisionError("cavity detuning delta_c must be nonzero")
    return -(g / delta_c) * math.sqrt(kappa_m) * (delta / chi)


def cavity_rates(g: float, delta_c: float, kappa: float) -> tuple[float, float]:
    """Exchange rate chi and superradiant rate Gamma after eliminating the cavity.

    chi = -g^2 delta_c / (delta_c^2 + kappa^2/4) and
    Gamma = g^2 kappa / (delta_c^2 + kappa^2/4); both positive for a
    red-detuned cavity (delta_c < 0).
    """
    denom = delta_c**2 + kappa**2 / 4.0
    return -(g**2) * delta_c / denom, g**2 * kappa / denom


def elastic_dephasing_rate(f_ac_mhz: float) -> float:
    """Empirical gamma_el for two-cloud runs: gamma_el/2pi = 0.0036 f_AC/2pi + 4 kHz."""
    return 2.0 * math.pi * (0.0036 * f_ac_mhz * 1e6 + 4e3)


#: rates quoted for the experiment, rad/s
SPONTANEOUS_EMISSION_RATE = 2.0 * math.pi * 7.5e3
MOTIONAL_DEPHASING_RATE = 2.0 * math.pi * 15e3
SINGLE_CLOUD_ELASTIC_RATE = 2.0 * math.pi * 0.5e3
