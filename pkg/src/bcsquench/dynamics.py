"""Mean-field time evolution of the (in)homogeneous BCS spin model.

Equations of motion
-------------------
With A = sum_k zeta_k Sx_k and B = sum_k zeta_k Sy_k every spin precesses
about the field Omega_k = (2 chi zeta_k A, 2 chi zeta_k B, eps_k):

    dS_k/dt = Omega_k x S_k

which is the Heisenberg equation of
H = chi sum_jk zeta_j zeta_k S_j^+ S_k^- + sum_k eps_k S_k^z once operator
products are factorised (the O(1/N) self-interaction j = k is dropped).

Dissipation, from the Lindblad terms factorised the same way:

* spontaneous emission, L = sqrt(gamma) S_k^-:
  d(Sx, Sy) = -gamma/2 (Sx, Sy),  dSz = -gamma (Sz + 1/2)
* elastic dephasing, L = sqrt(2 gamma_el) S_k^z:  d(Sx, Sy) = -gamma_el (Sx, Sy)
* collective superradiance, L = sqrt(Gamma) sum_k zeta_k S_k^-:
  d(Sx, Sy) = Gamma zeta_k Sz_k (A, B),  dSz = -Gamma zeta_k (A Sx_k + B Sy_k)

The superradiant term conserves each spin length, like the unitary part.
Everything is O(N) per evaluation and broadcasts over leading batch axes.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels
from .core import (
    ConfigurationError,
    DispersionSpec,
    ModelParams,
    SpinEnsembleState,
    build_dispersion,
    collective_sums,
)

#: largest allowed dt * (fastest rate) for the fixed-step integrator
STABILITY_LIMIT = 0.05

FIRST_MINIMUM = "first_minimum"
MIN_DECREASING_SAMPLES = 3


class StepSizeError(ValueError):
    """Time step too large for the stability guard."""

    def __init__(self, dt: float, suggested: float):
        super().__init__(f"dt={dt:.4g} s violates the stability guard; use dt <= {suggested:.4g} s")
        self.dt = dt
        self.suggested = suggested


class TriggerTimeout(RuntimeError):
    """A first-minimum trigger never fired before t_end."""


@dataclass(frozen=True)
class Stage:
    """One step of a quench schedule.

    ``trigger`` is a time in seconds or ``FIRST_MINIMUM``.  When the stage
    fires, ``dispersion`` (if given) is realised and assigned to the spins in
    the rank order of their current energies; the other fields override
    ModelParams entries.
    """

    trigger: Union[float, str]
    dispersion: Optional[DispersionSpec] = None
    chi: Optional[float] = None
    gamma: Optional[float] = None
    big_gamma: Optional[float] = None
    gamma_el: Optional[float] = None

    @property
    def at_minimum(self) -> bool:
        return self.trigger == FIRST_MINIMUM


@dataclass(frozen=True)
class QuenchSchedule:
    stages: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        n_min = sum(s.at_minimum for s in self.stages)
        if n_min > 1:
            raise ConfigurationError("at most one first-minimum trigger is allowed")
        times = [s.trigger for s in self.stages if not s.at_minimum]
        for t in times:
            if not isinstance(t, (int, float)) or t < 0:
                raise ConfigurationError(f"bad stage trigger {t!r}")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigurationError("stage times must be strictly increasing")

    @property
    def has_minimum_trigger(self) -> bool:
        return any(s.at_minimum for s in self.stages)


@dataclass
class Trajectory:
    times: np.ndarray
    delta: np.ndarray
    delta_init: float
    snapshots: dict = field(default_factory=dict)
    switch_times: list = field(default_factory=list)

    @property
    def norm_delta(self) -> np.ndarray:
        scale = self.delta_init if self.delta_init > 0 else 1.0
        return np.abs(self.delta) / scale

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def __len__(self) -> int:
        return len(self.times)


def bloch_derivative(
    bloch: np.ndarray,
    zeta: np.ndarray,
    chi,
    eps: np.ndarray,
    gamma: float = 0.0,
    big_gamma=0.0,
    gamma_el: float = 0.0,
) -> np.ndarray:
    """Time derivative of a (..., 3, N) Bloch array."""
    sx, sy, sz = bloch[..., 0, :], bloch[..., 1, :], bloch[..., 2, :]
    a, b = collective_sums(bloch, zeta)
    a = np.expand_dims(a, -1)
    b = np.expand_dims(b, -1)
    chi = np.expand_dims(np.asarray(chi), -1) if np.ndim(chi) else chi
    fx = 2.0 * chi * zeta * a
    fy = 2.0 * chi * zeta * b
    out = np.empty_like(bloch)
    out[..., 0, :] = fy * sz - eps * sy
    out[..., 1, :] = eps * sx - fx * sz
    out[..., 2, :] = fx * sy - fy * sx
    damp = 0.5 * gamma + gamma_el
    if damp:
        out[..., 0, :] -= damp * sx
        out[..., 1, :] -= damp * sy
    if gamma:
        out[..., 2, :] -= gamma * (sz + 0.5)
    if np.any(big_gamma):
        bg = np.expand_dims(np.asarray(big_gamma), -1) if np.ndim(big_gamma) else big_gamma
        ga = bg * zeta * a
        gb = bg * zeta * b
        out[..., 0, :] += ga * sz
        out[..., 1, :] += gb * sz
        out[..., 2, :] -= ga * sx + gb * sy
    return out


def derivative(state: SpinEnsembleState, params: ModelParams) -> np.ndarray:
    """Per-spin Bloch derivatives, shape (3, N)."""
    return bloch_derivative(
        state.bloch,
        params.zeta,
        params.chi,
        params.dispersion,
        params.gamma,
        params.big_gamma,
        params.gamma_el,
    )


def derivative_pairwise(state: SpinEnsembleState, params: ModelParams) -> np.ndarray:
    """O(N^2) reference: builds the exchange field from the explicit pair sum.

    Only for cross-checking `derivative` on small systems.
    """
    s = state.bloch
    zeta, chi, eps = params.zeta, params.chi, params.dispersion
    n = s.shape[1]
    out = np.zeros_like(s)
    for k in range(n):
        px = 0.0
        py = 0.0
        for j in range(n):
            px += zeta[k] * zeta[j] * s[0, j]
            py += zeta[k] * zeta[j] * s[1, j]
        hx, hy = 2.0 * chi * px, 2.0 * chi * py
        sx, sy, sz = s[:, k]
        dx = hy * sz - eps[k] * sy
        dy = eps[k] * sx - hx * sz
        dz = hx * sy - hy * sx
        dx -= (0.5 * params.gamma + params.gamma_el) * sx
        dy -= (0.5 * params.gamma + params.gamma_el) * sy
        dz -= params.gamma * (sz + 0.5)
        gx, gy = params.big_gamma * px, params.big_gamma * py
        dx += gx * sz
        dy += gy * sz
        dz -= gx * sx + gy * sy
        out[:, k] = dx, dy, dz
    return out


def energy(bloch: np.ndarray, params: ModelParams) -> float:
    """Mean-field energy chi (A^2 + B^2) + sum_k eps_k Sz_k."""
    a, b = collective_sums(bloch, params.zeta)
    return params.chi * (a * a + b * b) + np.sum(params.dispersion * bloch[..., 2, :], axis=-1)


def fastest_rate(params: ModelParams) -> float:
    """Largest frequency scale entering the stability guard."""
    z2 = float(np.sum(params.zeta**2))
    eps = float(np.max(np.abs(params.dispersion))) if params.n_spins else 0.0
    return max(eps, abs(params.chi) * z2, params.big_gamma * z2, params.gamma, params.gamma_el)


def check_step(dt: float, params: ModelParams) -> None:
    if dt <= 0:
        raise StepSizeError(dt, math.inf)
    rate = fastest_rate(params)
    if rate > 0 and dt * rate > STABILITY_LIMIT * (1 + 1e-12):
        raise StepSizeError(dt, STABILITY_LIMIT / rate)


def rk4_step(f, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + (0.5 * dt) * k1)
    k3 = f(y + (0.5 * dt) * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _delta(bloch: np.ndarray, zeta: np.ndarray, chi) -> np.ndarray:
    a, b = collective_sums(bloch, zeta)
    return chi * (a - 1j * b)


def _rank_reassign(current: np.ndarray, new_values: np.ndarray) -> np.ndarray:
    ranks = np.argsort(np.argsort(current, kind="stable"), kind="stable")
    return np.sort(new_values)[ranks]


def _apply_stage(params: ModelParams, stage: Stage) -> ModelParams:
    changes = {
        name: getattr(stage, name)
        for name in ("chi", "gamma", "big_gamma", "gamma_el")
        if getattr(stage, name) is not None
    }
    if stage.dispersion is not None:
        fresh = build_dispersion(stage.dispersion, params.n_spins)
        changes["dispersion"] = _rank_reassign(params.dispersion, fresh)
    return dataclasses.replace(params, **changes) if changes else params


def evolve(
    initial: SpinEnsembleState,
    params: ModelParams,
    schedule: Optional[QuenchSchedule] = None,
    dt: float = 1e-9,
    t_end: float = 1e-6,
    snapshot_times: Sequence[float] = (),
) -> Trajectory:
    """Fixed-step RK4 integration from ``initial`` up to ``t_end``.

    Delta is recorded at every step.  Schedule stages fire between steps:
    time triggers at the first grid time >= their trigger, a first-minimum
    trigger at the first local minimum of |Delta| that follows at least
    three consecutive decreasing samples (the state is rolled back to that
    minimum sample before switching).
    """
    if initial.n_spins != params.n_spins:
        raise ConfigurationError("state and params disagree on the number of spins")
    schedule = schedule or QuenchSchedule()
    check_step(dt, params)
    for stage in schedule.stages:
        check_step(dt, _apply_stage(params, stage))

    n_steps = int(round(t_end / dt))
    times = initial.time + dt * np.arange(n_steps + 1)
    delta = np.empty(n_steps + 1, dtype=complex)
    snap_idx = {int(round((t - initial.time) / dt)): t for t in snapshot_times}
    snapshots = {}
    switch_times = []

    pending = list(schedule.stages)
    y = initial.bloch.copy()
    prev_y = None
    decreasing = 0

    def rhs_for(p):
        return lambda s: bloch_derivative(
            s, p.zeta, p.chi, p.dispersion, p.gamma, p.big_gamma, p.gamma_el
        )

    rhs = rhs_for(params)
    delta[0] = _delta(y, params.zeta, params.chi)
    if 0 in snap_idx:
        snapshots[snap_idx[0]] = y.copy()

    i = 0
    while i < n_steps:
        # time-triggered stages due at the current grid point
        while pending and not pending[0].at_minimum and times[i] >= pending[0].trigger - 1e-9 * dt:
            params = _apply_stage(params, pending.pop(0))
            rhs = rhs_for(params)
            switch_times.append(float(times[i]))
            decreasing = 0
        prev_y = y
        y = rk4_step(rhs, y, dt)
        i += 1
        delta[i] = _delta(y, params.zeta, params.chi)
        if pending and pending[0].at_minimum:
            if abs(delta[i]) < abs(delta[i - 1]):
                decreasing += 1
            elif abs(delta[i]) > abs(delta[i - 1]) and decreasing >= MIN_DECREASING_SAMPLES:
                # roll back to the minimum sample and switch there
                y = prev_y
                i -= 1
                params = _apply_stage(params, pending.pop(0))
                rhs = rhs_for(params)
                switch_times.append(float(times[i]))
                decreasing = 0
                continue
            else:
                decreasing = 0
        if i in snap_idx:
            snapshots[snap_idx[i]] = y.copy()

    if pending and pending[0].at_minimum:
        raise TriggerTimeout("no minimum of |Delta| found before t_end")
    return Trajectory(times, delta, float(abs(delta[0])), snapshots, switch_times)


def staged_quench(
    initial: SpinEnsembleState,
    params: ModelParams,
    protocol: QuenchSchedule,
    dt: float,
    t_end: float,
    snapshot_times: Sequence[float] = (),
) -> Trajectory:
    """Evolve under a schedule that switches at the first minimum of |Delta|."""
    if not protocol.has_minimum_trigger:
        raise ConfigurationError("staged quench needs a first-minimum trigger")
    return evolve(initial, params, protocol, dt, t_end, snapshot_times)


def continuous_restore_protocol(e_w: float, stratified: bool = True, seed: int = 0) -> QuenchSchedule:
    """Switch to the gapless dispersion delta_s = E_W at the first |Delta| minimum."""
    spec = DispersionSpec("bimodal_uniform", delta_s=e_w, e_w=e_w, seed=seed, stratified=stratified)
    return QuenchSchedule((Stage(FIRST_MINIMUM, dispersion=spec),))


def evolve_batch(
    bloch0: np.ndarray,
    zeta: np.ndarray,
    chi: np.ndarray,
    eps: np.ndarray,
    dt: float,
    t_end: float,
    gamma: float = 0.0,
    big_gamma: float = 0.0,
    gamma_el: float = 0.0,
    backend: str = "auto",
) -> np.ndarray:
    """Integrate P independent ensembles at once; returns Delta of shape (P, steps+1).

    ``bloch0`` has shape (P, 3, N), ``eps`` (P, N) or (N,), ``zeta`` (N,) and
    ``chi`` (P,).  Rows never interact, so a row's result does not depend on
    how points are batched.  ``backend`` is ``numpy`` (the arithmetic of
    `evolve`, bit for bit), ``numba`` (compiled, about five times faster,
    equal to numpy up to rounding) or ``auto`` (numba when installed).
    """
    chi = np.asarray(chi, dtype=float)
    n_steps = int(round(t_end / dt))
    if backend not in ("auto", "numpy", "numba"):
        raise ConfigurationError(f"unknown backend {backend!r}")
    if backend != "numpy" and _kernels.available():
        delta, _ = _kernels.integrate_batch(bloch0, zeta, chi, eps, dt, n_steps, gamma, big_gamma, gamma_el)
        return delta
    if backend == "numba":
        raise ConfigurationError("numba backend requested but numba is not installed")
    y = np.array(bloch0, dtype=float)
    out = np.empty((y.shape[0], n_steps + 1), dtype=complex)

    def rhs(s):
        return bloch_derivative(s, zeta, chi, eps, gamma, big_gamma, gamma_el)

    out[:, 0] = _delta(y, zeta, chi)
    for i in range(1, n_steps + 1):
        y = rk4_step(rhs, y, dt)
        out[:, i] = _delta(y, zeta, chi)
    return out
