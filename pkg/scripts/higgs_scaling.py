"""Higgs-mode frequency against 2 Delta_inf for a sweep of initial phase spreads.

    python scripts/higgs_scaling.py --spins 5000 --phis 0 0.2 0.4 0.6 0.8
"""
import argparse
import math
from dataclasses import dataclass

import numpy as np

from bcsquench.analysis import higgs_regression, oscillation_peak, spectrum, window_metrics
from bcsquench.core import DispersionSpec, build_dispersion, mhz, prepare_initial_state, sample_couplings
from bcsquench.dynamics import evolve_batch


@dataclass(frozen=True)
class HiggsConfig:
    n_spins: int = 5000
    e_w_mhz: float = 0.83
    chi_n_mhz: float = 1.2
    dt: float = 5e-9
    t_end: float = 10e-6
    osc_window: tuple = (0.5e-6, 4e-6)
    plateau_window: tuple = (3e-6, 8e-6)


def run(cfg: HiggsConfig, phis):
    c = sample_couplings("homogeneous", cfg.n_spins)
    eps = build_dispersion(DispersionSpec("uniform", e_w=mhz(cfg.e_w_mhz)), cfg.n_spins)
    states = np.stack([prepare_initial_state(c, math.pi / 2, phi * math.pi, eps).bloch for phi in phis])
    d = evolve_batch(states, c.zeta, np.full(len(phis), mhz(cfg.chi_n_mhz) / cfg.n_spins), eps, cfg.dt, cfg.t_end)
    t = cfg.dt * np.arange(d.shape[1])
    runs = []
    for row in d:
        peak = oscillation_peak(spectrum((t, np.abs(row) / abs(row[0])), *cfg.osc_window))
        runs.append((2 * math.pi * peak.freq, window_metrics((t, np.abs(row)), *cfg.plateau_window).avg))
    return runs


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--spins", type=int, default=5000)
    ap.add_argument("--phis", type=float, nargs="+", default=[0, 0.2, 0.4, 0.6, 0.8], help="in units of pi")
    args = ap.parse_args()
    runs = run(HiggsConfig(n_spins=args.spins), args.phis)
    for phi, (w, d) in zip(args.phis, runs):
        print(f"phi0={phi:.2f} pi: omega_osc/2pi={w / 2e6 / math.pi:.4f} MHz, 2 Delta_inf/2pi={d / 1e6 / math.pi:.4f} MHz")
    fit = higgs_regression(runs)
    print(f"slope {fit.slope:.4f} +- {fit.slope_err:.4f}, intercept/2pi {fit.intercept / 2e6 / math.pi:.4f} MHz")


if __name__ == "__main__":
    main()
