"""Exact mean-field solution of the two-large-spin BCS model.

H = chi S^+ S^- + (delta_s/2) S_1^z - (delta_s/2) S_2^z, both spins of
length N/4 starting along +x.  With Delta = |Delta_BCS| / (chi N):

    delta_s < chi N:  Delta(t) = dn(chi N t / 2 | (delta_s / chi N)^2) / 2
    delta_s > chi N:  Delta(t) = |cn(delta_s t / 2 | (chi N / delta_s)^2)| / 2

and at delta_s = chi N both branches meet in sech(chi N t / 2) / 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import ConfigurationError, ModelParams, SpinEnsembleState, CouplingProfile
from .specfun import elliptic_k, jacobi_dn_cn


@dataclass(frozen=True)
class TwoSpinParams:
    chi_n: float
    delta_s: float

    def __post_init__(self):
        if self.chi_n <= 0:
            raise ConfigurationError("chi_n must be positive")
        if self.delta_s < 0:
            raise ConfigurationError("delta_s must be nonnegative")

    @property
    def ratio(self) -> float:
        return self.delta_s / self.chi_n


class TwoSpinFrequency(NamedTuple):
    omega: float
    dip: bool


def two_spin_delta(t, p: TwoSpinParams):
    """Normalised gap |Delta_BCS|/(chi N) at time(s) t >= 0."""
    t = np.asarray(t, dtype=float)
    r = p.ratio
    if r < 1.0:
        dn, _ = jacobi_dn_cn(0.5 * p.chi_n * t, r * r)
        out = 0.5 * np.asarray(dn)
    elif r > 1.0:
        _, cn = jacobi_dn_cn(0.5 * p.delta_s * t, 1.0 / (r * r))
        out = 0.5 * np.abs(cn)
    else:
        out = 0.5 / np.cosh(0.5 * p.chi_n * t)
    return float(out) if out.ndim == 0 else out


def two_spin_frequency(p: TwoSpinParams) -> TwoSpinFrequency:
    """Angular frequency of |Delta(t)|; exactly zero (dip) at delta_s = chi N."""
    r = p.ratio
    if r == 1.0:
        return TwoSpinFrequency(0.0, True)
    if r < 1.0:
        return TwoSpinFrequency(p.chi_n * math.pi / (2.0 * elliptic_k(r * r)), False)
    return TwoSpinFrequency(p.delta_s * math.pi / (2.0 * elliptic_k(1.0 / (r * r))), False)


def two_spin_potential(delta, p: TwoSpinParams):
    """Effective potential V(Delta) with (dDelta/dt)^2 / 2 + V(Delta) = 0."""
    delta = np.asarray(delta, dtype=float)
    v = 0.5 * p.chi_n**2 * (delta**2 - 0.25) * (delta**2 - (1.0 - p.ratio**2) / 4.0)
    return float(v) if v.ndim == 0 else v


def two_spin_delta_min(p: TwoSpinParams) -> float:
    r = p.ratio
    return 0.5 * math.sqrt(1.0 - r * r) if r < 1.0 else 0.0


def two_spin_conserved(s1, s2, p: TwoSpinParams, n: float):
    """(Sz_total, E, |S1|, |S2|) for two large spins of a system of n atoms."""
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    chi = p.chi_n / n
    sx = s1[0] + s2[0]
    sy = s1[1] + s2[1]
    e = chi * (sx * sx + sy * sy) + 0.5 * p.delta_s * (s1[2] - s2[2])
    return (
        s1[2] + s2[2],
        e,
        np.sqrt(np.sum(s1 * s1, axis=0)),
        np.sqrt(np.sum(s2 * s2, axis=0)),
    )


def two_spin_model(p: TwoSpinParams, n: float = 1.0):
    """Initial state and ModelParams realising the two-spin model in `dynamics`.

    Two entries of length n/4 along +x, energies +delta_s/2 and -delta_s/2,
    unit couplings and chi = chi_n / n.
    """
    bloch = np.array([[n / 4, n / 4], [0.0, 0.0], [0.0, 0.0]])
    couplings = CouplingProfile("homogeneous", np.ones(2), float(n))
    params = ModelParams(p.chi_n / n, couplings, np.array([0.5 * p.delta_s, -0.5 * p.delta_s]))
    return SpinEnsembleState(bloch), params
