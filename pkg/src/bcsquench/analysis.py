"""Post-processing of order-parameter trajectories.

Late-time averages, detrended power spectra, spectral peaks, exponential
decay fits, the Avg/Std phase classifier and the Higgs-scaling regression.
Functions accept a `Trajectory` or a bare (times, values) pair.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import optimize, stats

from .lax import PhaseLabel

MIN_WINDOW_SAMPLES = 32
DEFAULT_DETREND_ORDER = 2
DEFAULT_PAD_FACTOR = 8
NOISE_FLOOR_FACTOR = 3.0
#: amplitudes below this are rounding residue of a normalised trace
MIN_PEAK_AMPLITUDE = 1e-10


class WindowError(ValueError):
    """Analysis window is empty, reversed or too short."""


class RegressionError(ValueError):
    """Degenerate input to a regression."""


@dataclass(frozen=True)
class Thresholds:
    """Cuts of the dynamical classifier, in units of Delta_init.

    ``plateau`` enables the experimental II' label: a phase-II run whose
    average lies below it is reported as II'.
    """

    avg: float = 0.05
    osc: float = 0.02
    plateau: Optional[float] = None


@dataclass(frozen=True)
class PhaseMetrics:
    avg: float
    std: float
    osc_amp: float = 0.0
    osc_freq: float = math.nan
    decay_time: Optional[float] = None


@dataclass(frozen=True)
class Spectrum:
    frequencies: np.ndarray  # Hz
    power: np.ndarray
    window: tuple
    detrend_order: int
    variance: float  # of the detrended signal
    parseval_scale: float = 1.0

    @property
    def df(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0])

    def integrated_variance(self) -> float:
        """Variance of the detrended, untapered signal implied by the power."""
        return float(np.sum(self.power) * self.parseval_scale)


class Peak(NamedTuple):
    freq: float  # Hz, nan if no oscillation
    amplitude: float

    @property
    def found(self) -> bool:
        return not math.isnan(self.freq)


@dataclass(frozen=True)
class DecayFit:
    tau: float
    amplitude: float
    window: tuple
    unbounded: bool

    def __float__(self) -> float:
        return self.tau


def _series(traj, quantity: str = "abs"):
    """(times, real values) from a Trajectory or a (times, values) pair."""
    if isinstance(traj, tuple):
        t, v = traj
        return np.asarray(t, float), np.asarray(v, float)
    y = traj.norm_delta
    if quantity == "abs2":
        y = y * y
    elif quantity != "abs":
        raise ValueError(f"unknown quantity {quantity!r}")
    return traj.times, y


def _window(t: np.ndarray, t1: float, t2: float) -> np.ndarray:
    if not t1 < t2:
        raise WindowError("need t1 < t2")
    dt = t[1] - t[0] if len(t) > 1 else 0.0
    if t2 > t[-1] + dt * (1 + 1e-9):
        raise WindowError("window ends after the trajectory")
    # half-open [t1, t2) with a small slack for grid rounding
    tol = 1e-9 * dt
    mask = (t >= t1 - tol) & (t < t2 - tol)
    if mask.sum() < MIN_WINDOW_SAMPLES:
        raise WindowError(f"window holds {mask.sum()} samples, need {MIN_WINDOW_SAMPLES}")
    return mask


def window_metrics(traj, t1: float, t2: float) -> PhaseMetrics:
    """Mean and RMS deviation of |Delta|/Delta_init over [t1, t2)."""
    t, y = _series(traj)
    yw = y[_window(t, t1, t2)]
    avg = float(np.mean(yw))
    return PhaseMetrics(avg, float(np.sqrt(np.mean((yw - avg) ** 2))))


def spectrum(
    traj,
    t1: float,
    t2: float,
    detrend_order: int = DEFAULT_DETREND_ORDER,
    quantity: str = "abs2",
    pad_factor: int = DEFAULT_PAD_FACTOR,
) -> Spectrum:
    """One-sided power spectrum of the detrended, Hann-tapered window.

    ``quantity`` is ``abs2`` (|Delta|^2/Delta_init^2) or ``abs``.  Power is
    scaled so that a sinusoid b cos(2 pi f t) yields a peak of b^2.
    """
    t, y = _series(traj, quantity)
    mask = _window(t, t1, t2)
    tw, yw = t[mask], y[mask]
    m = len(yw)
    x = (tw - tw[0]) / max(tw[-1] - tw[0], 1e-300) * 2 - 1
    coeffs = np.polynomial.polynomial.polyfit(x, yw, detrend_order)
    resid = yw - np.polynomial.polynomial.polyval(x, coeffs)
    w = np.hanning(m + 2)[1:-1]
    n_fft = 1 << int(math.ceil(math.log2(pad_factor * m)))
    amp = np.fft.rfft(resid * w, n_fft)
    power = (2.0 * np.abs(amp) / w.sum()) ** 2
    power[0] *= 0.25
    dt = tw[1] - tw[0]
    freqs = np.fft.rfftfreq(n_fft, dt)
    # zero padding by n_fft/m oversamples the periodogram; Hann's equivalent
    # noise bandwidth is sum(w^2) m / sum(w)^2 bins
    scale = w.sum() ** 2 / (2.0 * n_fft * np.sum(w * w))
    return Spectrum(freqs, power, (float(t1), float(t2)), detrend_order, float(np.var(resid)), scale)


def oscillation_peak(
    spec: Spectrum,
    f_min: Optional[float] = None,
    floor: float = 0.0,
    f_max: Optional[float] = None,
) -> Peak:
    """Dominant spectral line above ``f_min`` (default two window lengths^-1).

    Sub-bin frequency from a parabola through the log power of the three
    bins around the maximum.  No oscillation is reported when the peak is
    below NOISE_FLOOR_FACTOR times the median power, below ``floor`` or
    below MIN_PEAK_AMPLITUDE squared.  The median rule alone does not reject
    the largest bin of pure white noise; pass ``floor`` for that.
    """
    t1, t2 = spec.window
    if f_min is None:
        f_min = 2.0 / (t2 - t1)
    sel = spec.frequencies >= f_min
    if f_max is not None:
        sel &= spec.frequencies <= f_max
    idx = np.flatnonzero(sel)
    if idx.size < 3:
        return Peak(math.nan, 0.0)
    p = spec.power
    k = int(idx[np.argmax(p[idx])])
    pk = p[k]
    if pk <= MIN_PEAK_AMPLITUDE**2 or pk < NOISE_FLOOR_FACTOR * np.median(p[idx]) or pk <= floor:
        return Peak(math.nan, 0.0)
    shift = 0.0
    if 0 < k < len(p) - 1 and p[k - 1] > 0 and p[k + 1] > 0:
        a, b, c = np.log(p[k - 1]), np.log(pk), np.log(p[k + 1])
        den = a - 2 * b + c
        if den < 0:
            shift = float(np.clip(0.5 * (a - c) / den, -0.5, 0.5))
            pk = float(np.exp(b - 0.25 * (a - c) * shift))
    return Peak(float(spec.frequencies[k] + shift * spec.df), float(math.sqrt(pk)))


def oscillation_metrics(
    traj,
    t1: float,
    t2: float,
    detrend_order: int = DEFAULT_DETREND_ORDER,
    quantity: str = "abs",
    f_min: Optional[float] = None,
) -> PhaseMetrics:
    """window_metrics plus the dominant oscillation of ``quantity``."""
    base = window_metrics(traj, t1, t2)
    peak = oscillation_peak(spectrum(traj, t1, t2, detrend_order, quantity), f_min)
    return PhaseMetrics(base.avg, base.std, peak.amplitude, peak.freq)


def _exp_model(t, a, tau):
    return a * np.exp(-t / tau)


def decay_time(traj, t1: float, t2: float, method: str = "fit") -> DecayFit:
    """Decay time of |Delta|/Delta_init inside [t1, t2).

    ``method="fit"`` does a least-squares fit of A exp(-(t - t1)/tau);
    ``method="crossing"`` returns the first time the trace falls to 1/e of its
    value at t1 (linear interpolation between samples).  A trace that does
    not decay within the window gives tau > t2 - t1 (or inf) and
    ``unbounded`` set.
    """
    if method not in ("fit", "crossing"):
        raise ValueError(f"unknown decay method {method!r}")
    t, y = _series(traj)
    mask = _window(t, t1, t2)
    tw, yw = t[mask] - t1, y[mask]
    if yw[0] <= 0:
        raise WindowError("|Delta| vanishes at the start of the fit window")
    span = tw[-1] - tw[0]
    if method == "crossing":
        level = yw[0] / math.e
        below = np.nonzero(yw <= level)[0]
        if below.size == 0:
            return DecayFit(math.inf, float(yw[0]), (float(t1), float(t2)), True)
        k = int(below[0])
        frac = (yw[k - 1] - level) / (yw[k - 1] - yw[k])
        tau = tw[k - 1] + frac * (tw[k] - tw[k - 1])
        return DecayFit(float(tau), float(yw[0]), (float(t1), float(t2)), False)
    # log-linear start guard against zeros
    pos = yw > 1e-3 * yw[0]
    slope = np.polyfit(tw[pos], np.log(yw[pos]), 1)[0] if pos.sum() > 2 else -1.0 / span
    tau0 = -1.0 / slope if slope < 0 else 10 * span
    try:
        (a, tau), _ = optimize.curve_fit(
            _exp_model, tw, yw, p0=(yw[0], tau0), bounds=([0, 1e-6 * span], [np.inf, np.inf]), maxfev=10000
        )
    except RuntimeError:
        a, tau = yw[0], math.inf
    return DecayFit(float(tau), float(a), (float(t1), float(t2)), bool(tau > span))


def classify_phase_dynamical(metrics: PhaseMetrics, thresholds: Thresholds = Thresholds()) -> PhaseLabel:
    """I below the average cut, III with a persistent oscillation, else II."""
    if metrics.avg < thresholds.avg:
        return PhaseLabel.I
    if metrics.osc_amp >= thresholds.osc:
        return PhaseLabel.III
    if thresholds.plateau is not None and metrics.avg < thresholds.plateau:
        return PhaseLabel.II_PRIME
    return PhaseLabel.II


@dataclass(frozen=True)
class HiggsFit:
    slope: float
    intercept: float
    slope_err: float
    intercept_err: float
    rvalue: float


def higgs_regression(runs: Sequence[tuple]) -> HiggsFit:
    """OLS of omega_osc against 2 Delta_inf for (omega_osc, Delta_inf) pairs."""
    arr = np.asarray(runs, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 3:
        raise RegressionError("need at least three (omega_osc, delta_inf) runs")
    x = 2.0 * arr[:, 1]
    if np.ptp(x) <= 1e-12 * max(np.max(np.abs(x)), 1e-300):
        raise RegressionError("all 2 Delta_inf values coincide")
    res = stats.linregress(x, arr[:, 0])
    return HiggsFit(res.slope, res.intercept, res.stderr, res.intercept_stderr, res.rvalue)
