"""Two-dimensional (chi N / E_W, delta_s / E_W) phase-diagram scans.

Every grid point is an independent idealised quench from the pulsed state.
Points sharing a chi N column are integrated together as one batch; the
coupling sample and the stratified dispersion are fixed by the seed, so a
point's result does not depend on batching, ordering or worker count.
Times are measured in units of 1/E_W.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .analysis import Thresholds, classify_phase_dynamical, oscillation_peak, spectrum, PhaseMetrics
from .core import OPTIMAL_DRIVE_AREA, DispersionSpec, build_dispersion, prepare_initial_state, sample_couplings
from .dynamics import STABILITY_LIMIT, evolve_batch
from .lax import LaxParams, PhaseLabel, classify_phase_analytic


@dataclass(frozen=True)
class ScanConfig:
    chi_range: tuple = (0.05, 3.0)
    delta_range: tuple = (0.0, 3.0)
    n_chi: int = 50
    n_delta: int = 50
    n_spins: int = 1000
    coupling: str = "random_cos"
    drive_area: Optional[float] = None  # default: pi/2 homogeneous, 0.586 pi otherwise
    seed: int = 0
    t_end: float = 100.0
    window: tuple = (40.0, 100.0)
    stability: float = STABILITY_LIMIT
    thresholds: Thresholds = field(default_factory=Thresholds)
    boundary_margin: float = 0.10

    @property
    def inhomogeneous(self) -> bool:
        return self.coupling != "homogeneous"

    @property
    def area(self) -> float:
        if self.drive_area is not None:
            return self.drive_area
        return math.pi / 2 if self.coupling == "homogeneous" else OPTIMAL_DRIVE_AREA

    def chi_values(self) -> np.ndarray:
        return np.linspace(self.chi_range[0], self.chi_range[1], self.n_chi)

    def delta_values(self) -> np.ndarray:
        return np.linspace(self.delta_range[0], self.delta_range[1], self.n_delta)


@dataclass
class ScanResult:
    config: ScanConfig
    chi: np.ndarray  # (n_chi,) chi N / E_W
    delta: np.ndarray  # (n_delta,) delta_s / E_W
    avg: np.ndarray  # (n_chi, n_delta)
    std: np.ndarray
    osc_amp: np.ndarray
    osc_freq: np.ndarray  # cycles per 1/E_W, nan if none
    label: np.ndarray  # object array of PhaseLabel
    analytic: np.ndarray
    off_boundary: np.ndarray

    def agreement(self) -> float:
        """Fraction of off-boundary points whose dynamical and analytic labels match."""
        mask = self.off_boundary
        if not mask.any():
            return math.nan
        ref = np.array([comparable(a) for a in self.analytic[mask]], dtype=object)
        return float(np.mean(self.label[mask] == ref))

    def rows(self):
        """(chi, delta, avg, std, osc_amp, osc_freq, label, analytic, off_boundary) per point."""
        for i, x in enumerate(self.chi):
            for j, y in enumerate(self.delta):
                yield (float(x), float(y), float(self.avg[i, j]), float(self.std[i, j]),
                       float(self.osc_amp[i, j]), float(self.osc_freq[i, j]),
                       str(self.label[i, j]), str(self.analytic[i, j]), bool(self.off_boundary[i, j]))


def comparable(label: PhaseLabel) -> PhaseLabel:
    """Analytic label in the dynamical alphabet {I, II, III}."""
    return PhaseLabel.III if label in (PhaseLabel.IIIa, PhaseLabel.IIIb) else label


def off_boundary(x: float, y: float, margin: float, inhomogeneous: bool) -> bool:
    """True when the analytic label is constant on the box x(1 -+ margin), y(1 -+ margin)."""
    ref = classify_phase_analytic(LaxParams(x, 1.0, y), inhomogeneous)
    for fx in np.linspace(1 - margin, 1 + margin, 5):
        for fy in np.linspace(1 - margin, 1 + margin, 5):
            if classify_phase_analytic(LaxParams(x * fx, 1.0, y * fy), inhomogeneous) != ref:
                return False
    return True


def _column(args):
    cfg, x = args
    couplings = sample_couplings(cfg.coupling, cfg.n_spins, seed=cfg.seed, stratified=True)
    ys = cfg.delta_values()
    eps = np.stack([
        build_dispersion(DispersionSpec("bimodal_uniform", delta_s=y, e_w=1.0, seed=cfg.seed), cfg.n_spins)
        for y in ys
    ])
    state = prepare_initial_state(couplings, cfg.area)
    chi = x / couplings.n_eff
    fastest = max(float(np.max(np.abs(eps))), chi * float(np.sum(couplings.zeta**2)))
    # equal steps per unit time for every column keeps windows on the grid
    n_per_unit = int(math.ceil(fastest / cfg.stability))
    dt = 1.0 / n_per_unit
    delta = evolve_batch(
        np.broadcast_to(state.bloch, (len(ys), 3, cfg.n_spins)), couplings.zeta, np.full(len(ys), chi), eps, dt, cfg.t_end
    )
    t = dt * np.arange(delta.shape[1])
    out = []
    for row in delta:
        nd = np.abs(row) / abs(row[0])
        mask = (t >= cfg.window[0] - 1e-9) & (t < cfg.window[1] - 1e-9)
        w = nd[mask]
        avg = float(np.mean(w))
        std = float(np.sqrt(np.mean((w - avg) ** 2)))
        peak = oscillation_peak(spectrum((t, nd), cfg.window[0], cfg.window[1], quantity="abs"))
        out.append((avg, std, peak.amplitude, peak.freq))
    return out


def run_scan(cfg: ScanConfig, workers: int = 1) -> ScanResult:
    xs, ys = cfg.chi_values(), cfg.delta_values()
    jobs = [(cfg, float(x)) for x in xs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            columns = list(pool.map(_column, jobs))
    else:
        columns = [_column(j) for j in jobs]
    shape = (len(xs), len(ys))
    res = np.array(columns, dtype=float).reshape(shape + (4,)) if columns else np.zeros(shape + (4,))
    label = np.empty(shape, dtype=object)
    analytic = np.empty(shape, dtype=object)
    off = np.zeros(shape, dtype=bool)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            m = PhaseMetrics(res[i, j, 0], res[i, j, 1], res[i, j, 2], res[i, j, 3])
            label[i, j] = classify_phase_dynamical(m, cfg.thresholds)
            analytic[i, j] = classify_phase_analytic(LaxParams(x, 1.0, y), cfg.inhomogeneous)
            off[i, j] = off_boundary(x, y, cfg.boundary_margin, cfg.inhomogeneous)
    return ScanResult(cfg, xs, ys, res[..., 0], res[..., 1], res[..., 2], res[..., 3], label, analytic, off)


def default_workers() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)
