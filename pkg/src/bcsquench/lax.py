"""Lax-vector analysis of the homogeneous model with a (bi)modal flat band.

For the pulsed initial state (all spins along +x) and eps_k uniform on the
two bands [-delta_s/2 -+ E_W/2] and [+delta_s/2 -+ E_W/2], the condition
L(u).L(u) = 0 reduces to

    f(u) = (chi N / 2 E_W) [ ln(u + d + w) - ln(u + d - w)
                             + ln(u - d + w) - ln(u - d - w) ] = -+ i

with d = delta_s/4, w = E_W/4 and principal-branch logarithms.  Roots in the
upper half plane solve f(u) = -i and their conjugates solve f(u) = +i.  The
number of complex conjugate pairs labels the dynamical phase (0: I, 1: II,
2: III, split into IIIa/IIIb by whether the real parts vanish).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .core import ConfigurationError


class PhaseLabel(str, Enum):
    I = "I"
    II = "II"
    IIIa = "IIIa"
    IIIb = "IIIb"
    III = "III"
    II_PRIME = "II'"

    def __str__(self) -> str:
        return self.value


class LaxSingularity(ValueError):
    """Spectral parameter sits on a logarithmic branch point."""


class RootSearchError(RuntimeError):
    """Newton search and argument-principle count disagree."""


#: relative distance from a phase boundary treated as lying on it
BOUNDARY_RTOL = 1e-9


@dataclass(frozen=True)
class LaxParams:
    chi_n: float
    e_w: float
    delta_s: float = 0.0

    def __post_init__(self):
        if not self.chi_n > 0 or not self.e_w > 0 or self.delta_s < 0:
            raise ConfigurationError("need chi_n > 0, e_w > 0 and delta_s >= 0")

    @property
    def chi_ratio(self) -> float:
        return self.chi_n / self.e_w

    @property
    def delta_ratio(self) -> float:
        return self.delta_s / self.e_w

    def branch_points(self) -> np.ndarray:
        d, w = self.delta_s / 4, self.e_w / 4
        return np.array([-d - w, -d + w, d - w, d + w])

    def scaled(self, lam: float) -> "LaxParams":
        return LaxParams(lam * self.chi_n, lam * self.e_w, lam * self.delta_s)


@dataclass(frozen=True)
class LaxRootSet:
    """Complex roots of L.L = 0, conjugate pairs included, sorted."""

    roots: tuple = ()
    scale: float = 1.0

    @property
    def upper(self) -> list:
        return [r for r in self.roots if r.imag > 0]

    @property
    def count_pairs(self) -> int:
        return len(self.upper)

    @property
    def real_parts_nonzero(self) -> bool:
        return any(abs(r.real) > 1e-7 * self.scale for r in self.roots)

    def label(self) -> PhaseLabel:
        n = self.count_pairs
        if n == 0:
            return PhaseLabel.I
        if n == 1:
            return PhaseLabel.II
        if n == 2:
            return PhaseLabel.IIIb if self.real_parts_nonzero else PhaseLabel.IIIa
        raise RootSearchError(f"unexpected number of root pairs: {n}")


def _make_rootset(upper_roots, scale) -> LaxRootSet:
    roots = []
    for r in upper_roots:
        roots.extend([complex(r), complex(r).conjugate()])
    roots.sort(key=lambda z: (round(z.real / scale, 9), z.imag))
    return LaxRootSet(tuple(roots), scale)


def _log_terms(u, p: LaxParams):
    d, w = p.delta_s / 4, p.e_w / 4
    return (
        np.log(u + d + w) - np.log(u + d - w) + np.log(u - d + w) - np.log(u - d - w)
    )


def lax_function(u, p: LaxParams):
    """f(u), each logarithm taken on its own principal branch."""
    u = np.asarray(u, dtype=complex)
    bp = p.branch_points()
    if np.any(np.abs(u[..., None] - bp) <= 1e-15 * p.e_w):
        raise LaxSingularity("u coincides with a branch point")
    return p.chi_n / (2.0 * p.e_w) * _log_terms(u, p)


def lax_function_derivative(u, p: LaxParams):
    d, w = p.delta_s / 4, p.e_w / 4
    u = np.asarray(u, dtype=complex)
    return p.chi_n / (2.0 * p.e_w) * (
        1 / (u + d + w) - 1 / (u + d - w) + 1 / (u - d + w) - 1 / (u - d - w)
    )


def lax_residual(u, p: LaxParams, sign: Optional[int] = None):
    """f(u) - sign*i, vanishing at a root.

    ``sign`` selects the right-hand side +i or -i; by default -i is used in
    the closed upper half plane and +i below it.
    """
    f = lax_function(u, p)
    if sign is None:
        sign = np.where(np.imag(u) >= 0, -1, 1)
    r = f - 1j * sign
    return complex(r) if np.ndim(r) == 0 else r


def _csc(x):
    return 1.0 / math.sin(x)


def _cot(x):
    return math.cos(x) / math.sin(x)


def classify_phase_analytic(p: LaxParams, inhomogeneous: bool = False) -> PhaseLabel:
    """Phase from the closed-form boundaries.

    I/II at chi N/E_W = 1/pi (delta_s/E_W <= 1) and delta_s/E_W = 1; I/III at
    chi N/E_W = 2/pi (delta_s/E_W > 1); IIIa/IIIb at
    delta_s/E_W = csc(E_W/chi N).  Points within BOUNDARY_RTOL of a boundary
    take the larger-chi N side; on delta_s = E_W the gapless (II) side.
    With ``inhomogeneous`` IIIa is reported as II and IIIb as III.
    """
    x, y = p.chi_ratio, p.delta_ratio
    lo = 1.0 - BOUNDARY_RTOL
    if y <= 1.0 * (1.0 + BOUNDARY_RTOL):
        label = PhaseLabel.II if x >= lo / math.pi else PhaseLabel.I
    elif x < lo * 2.0 / math.pi:
        label = PhaseLabel.I
    else:
        # x just above 2/pi may round to a hair below pi/2 inside csc
        arg = min(1.0 / x, math.pi / 2)
        label = PhaseLabel.IIIa if y <= _csc(arg) * (1 + BOUNDARY_RTOL) else PhaseLabel.IIIb
    if inhomogeneous:
        if label is PhaseLabel.IIIa:
            return PhaseLabel.II
        if label is PhaseLabel.IIIb:
            return PhaseLabel.III
    return label


def closed_form_roots(p: LaxParams) -> LaxRootSet:
    """Closed-form roots for the regime containing ``p`` (empty in phase I)."""
    label = classify_phase_analytic(p)
    a = p.e_w / p.chi_n
    y = p.delta_ratio
    w = p.e_w / 4
    if label is PhaseLabel.I:
        return LaxRootSet((), p.e_w)
    if label is PhaseLabel.IIIb:
        re = w * math.sqrt(max(y * y - _csc(a) ** 2, 0.0))
        im = w * _cot(a)
        return _make_rootset([complex(re, im), complex(-re, im)], p.e_w)
    root = math.sqrt(max(_csc(a) ** 2 - y * y, 0.0))
    upper = [1j * w * (_cot(a) + root)]
    if label is PhaseLabel.IIIa:
        upper.append(1j * w * (_cot(a) - root))
    return _make_rootset(upper, p.e_w)


def _newton(starts: np.ndarray, p: LaxParams, iters: int = 200, tol: float = 1e-14):
    u = starts.astype(complex)
    floor = 1e-12 * p.e_w
    g = lax_function(u, p) + 1j
    done = np.zeros(u.shape, bool)
    for _ in range(iters):
        dg = lax_function_derivative(u, p)
        step = g / dg
        lam = np.ones(u.shape)
        # damping: halve until |g| decreases and the step stays in Im u > 0
        for _ in range(40):
            trial = u - lam * step
            ok = trial.imag > floor
            g_trial = np.where(ok, 0, 0).astype(complex)
            if np.any(ok):
                g_trial[ok] = lax_function(trial[ok], p) + 1j
            accept = ok & (np.abs(g_trial) < np.abs(g)) | done
            if np.all(accept):
                break
            lam = np.where(accept, lam, 0.5 * lam)
        trial = u - lam * step
        ok = trial.imag > floor
        trial = np.where(ok & ~done, trial, u)
        g_new = lax_function(trial, p) + 1j
        done = done | (np.abs(g_new) < tol) | (np.abs(trial - u) < 1e-15 * p.e_w)
        u, g = trial, g_new
        if np.all(done):
            break
    return u, np.abs(g)


def _winding_count(p: LaxParams, x_max: float, y_min: float, y_max: float) -> int:
    """Zeros of f(u) + i inside the rectangle, by the argument principle."""
    corners = [complex(-x_max, y_min), complex(x_max, y_min), complex(x_max, y_max), complex(-x_max, y_max)]
    total = 0.0
    for a, b in zip(corners, corners[1:] + corners[:1]):
        s = np.linspace(0.0, 1.0, 2001)
        stack = [(s[i], s[i + 1]) for i in range(len(s) - 1)]
        while stack:
            s0, s1 = stack.pop()
            g0 = complex(lax_function(a + (b - a) * s0, p)) + 1j
            g1 = complex(lax_function(a + (b - a) * s1, p)) + 1j
            dphi = np.angle(g1 / g0)
            if abs(dphi) > 0.5 and s1 - s0 > 1e-14:
                mid = 0.5 * (s0 + s1)
                stack.extend([(s0, mid), (mid, s1)])
            else:
                total += dphi
    return int(round(total / (2 * math.pi)))


def search_box(p: LaxParams) -> tuple[float, float]:
    """(max |Re u|, max Im u) of the numeric search domain.

    Every closed-form root has |Re u| <= delta_s/4 and
    Im u <= (E_W/4) cot(E_W / 2 chi N) <= chi N / 2, so this box contains them.
    """
    return p.delta_s / 2 + p.e_w, 2.0 * (p.chi_n + p.e_w)


def find_roots_numeric(p: LaxParams, n_re: int = 25, n_im: int = 24, verify: bool = True) -> LaxRootSet:
    """All complex roots by damped Newton from a grid of starting points.

    The grid covers |Re u| <= delta_s/2 + E_W and 0 < Im u <= 2 (chi N + E_W),
    with imaginary parts log-spaced to reach roots hugging the real axis.
    Roots are deduplicated to 1e-8 (relative to E_W) and mirrored to their
    conjugates.  With ``verify`` the count is checked against the argument
    principle on the same box.
    """
    x_max, y_max = search_box(p)
    y_min = 1e-6 * p.e_w
    re = np.linspace(-x_max, x_max, n_re)
    im = np.geomspace(y_min * 10, y_max, n_im)
    starts = (re[:, None] + 1j * im[None, :]).ravel()
    u, res = _newton(starts, p)
    found: list[complex] = []
    for z, r in zip(u, res):
        if r > 1e-10 or z.imag <= y_min:
            continue
        if all(abs(z - q) > 1e-8 * p.e_w for q in found):
            found.append(complex(z))
    # symmetric problem: fold near-zero real parts onto the axis
    found = [complex(0.0, z.imag) if abs(z.real) < 1e-9 * p.e_w else z for z in found]
    if verify:
        count = _winding_count(p, x_max, y_min, y_max)
        if count != len(found):
            raise RootSearchError(
                f"Newton found {len(found)} roots but the winding number is {count} "
                f"at chi_n/e_w={p.chi_ratio:.6g}, delta_s/e_w={p.delta_ratio:.6g}"
            )
    return _make_rootset(found, p.e_w)


def classify_phase_numeric(p: LaxParams, inhomogeneous: bool = False) -> PhaseLabel:
    label = find_roots_numeric(p).label()
    if inhomogeneous:
        return {PhaseLabel.IIIa: PhaseLabel.II, PhaseLabel.IIIb: PhaseLabel.III}.get(label, label)
    return label


@dataclass(frozen=True)
class Boundary:
    name: str
    points: np.ndarray  # (M, 2) columns chi_n/e_w, delta_s/e_w
    homogeneous_only: bool = False


def _clip_segment(p0, p1, xr, yr):
    """Liang-Barsky clip of a segment to the rectangle xr x yr."""
    (x0, y0), (x1, y1) = p0, p1
    dx, dy = x1 - x0, y1 - y0
    t0, t1 = 0.0, 1.0
    for pk, qk in ((-dx, x0 - xr[0]), (dx, xr[1] - x0), (-dy, y0 - yr[0]), (dy, yr[1] - y0)):
        if pk == 0:
            if qk < 0:
                return None
            continue
        t = qk / pk
        if pk < 0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
    if t0 > t1:
        return None
    return np.array([[x0 + t0 * dx, y0 + t0 * dy], [x0 + t1 * dx, y0 + t1 * dy]])


def boundary_curves(chi_range, delta_range, n_points: int = 400, include_homogeneous_only: bool = False) -> list[Boundary]:
    """Phase-boundary polylines (chi N/E_W, delta_s/E_W) clipped to the ranges.

    Returns the I-II, I-III and II-III boundaries; pieces lying entirely
    outside the window come back with an empty (0, 2) point array.  The
    homogeneous-only II/IIIa line delta_s = E_W (chi N/E_W > 2/pi) is added on
    request.
    """
    xr = (float(chi_range[0]), float(chi_range[1]))
    yr = (float(delta_range[0]), float(delta_range[1]))
    if xr[0] > xr[1] or yr[0] > yr[1]:
        raise ConfigurationError("ranges must be increasing")
    big = max(xr[1], yr[1], 1.0) * 10

    def polyline(vertices):
        pieces = []
        for a, b in zip(vertices, vertices[1:]):
            seg = _clip_segment(a, b, xr, yr)
            if seg is not None:
                if pieces and np.allclose(pieces[-1], seg[0]):
                    pieces.append(seg[1])
                else:
                    pieces.extend(seg)
        return np.array(pieces).reshape(-1, 2)

    out = [
        Boundary("I-II", polyline([(1 / math.pi, 0.0), (1 / math.pi, 1.0), (2 / math.pi, 1.0)])),
        Boundary("I-III", polyline([(2 / math.pi, 1.0), (2 / math.pi, big)])),
    ]
    x = np.linspace(max(xr[0], 2 / math.pi), xr[1], n_points) if xr[1] > 2 / math.pi else np.empty(0)
    y = 1.0 / np.sin(1.0 / x) if x.size else x
    inside = (y >= yr[0]) & (y <= yr[1])
    out.append(Boundary("II-III", np.column_stack([x[inside], y[inside]]).reshape(-1, 2)))
    if include_homogeneous_only:
        out.append(Boundary("II-IIIa", polyline([(2 / math.pi, 1.0), (big, 1.0)]), True))
    return out
