"""Special functions used by the analytic modules.

Complete elliptic integral K(m) and the Jacobi functions dn/cn are built on
the arithmetic-geometric mean; J1 uses its power series (small argument) and
Miller's backward recurrence (large argument); generalised Laguerre
polynomials use the three-term recurrence.

All functions take the parameter convention m = k**2.
"""
from __future__ import annotations

import math

import numpy as np

_AGM_TOL = 1e-16
_AGM_MAXITER = 64


class SpecialFunctionError(ValueError):
    """Argument outside the domain of a special function."""


class EllipticDivergence(SpecialFunctionError):
    """K(m) diverges at m = 1."""


def _check_m(m: float, allow_one: bool) -> float:
    m = float(m)
    if not (0.0 <= m <= 1.0) or math.isnan(m):
        raise SpecialFunctionError(f"elliptic parameter m={m!r} outside [0, 1]")
    if m == 1.0 and not allow_one:
        raise EllipticDivergence("K(m) diverges at m = 1")
    return m


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two nonnegative numbers."""
    for _ in range(_AGM_MAXITER):
        if abs(a - b) <= _AGM_TOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def elliptic_k(m: float) -> float:
    """Complete elliptic integral of the first kind, K(m) = pi / (2 AGM(1, sqrt(1-m)))."""
    m = _check_m(m, allow_one=False)
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - m)))


def _landen_sequence(m: float) -> tuple[list[float], list[float]]:
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    aa, cc = [a], [c]
    for _ in range(_AGM_MAXITER):
        if abs(c) <= 1e-17:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        aa.append(a)
        cc.append(c)
    return aa, cc


def jacobi_sn_cn_dn(u, m: float):
    """Jacobi sn, cn, dn of u (scalar or array) at parameter m in [0, 1].

    Descending Landen transformation seeded by the AGM sequence
    (Abramowitz & Stegun 16.4).  The m = 0 and m = 1 endpoints use their
    closed forms.
    """
    m = _check_m(m, allow_one=True)
    u = np.asarray(u, dtype=float)
    if m == 0.0:
        return np.sin(u), np.cos(u), np.ones_like(u)
    if m == 1.0:
        sech = 1.0 / np.cosh(u)
        return np.tanh(u), sech, sech.copy()
    aa, cc = _landen_sequence(m)
    n = len(aa) - 1
    phi = (2.0**n) * aa[n] * u
    phi_prev = phi
    for k in range(n, 0, -1):
        phi_prev = phi
        phi = 0.5 * (phi + np.arcsin(np.clip(cc[k] / aa[k] * np.sin(phi), -1.0, 1.0)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    if n == 0:
        dn = np.ones_like(u)
    else:
        dn = cn / np.cos(phi_prev - phi)
    return sn, cn, dn


def jacobi_dn_cn(u, m: float):
    """Return (dn(u|m), cn(u|m))."""
    _, cn, dn = jacobi_sn_cn_dn(u, m)
    if cn.ndim == 0:
        return float(dn), float(cn)
    return dn, cn


def _j1_series(x: float) -> float:
    half = 0.5 * x
    term = half
    total = term
    x2 = half * half
    k = 0
    while True:
        k += 1
        term *= -x2 / (k * (k + 1))
        total += term
        if abs(term) < 1e-18 * max(abs(total), 1e-300):
            return total


def _j1_miller(x: float) -> float:
    # backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, normalised with J0 + 2 sum J_2k = 1
    start = 2 * ((int(x) + 30 + int(math.sqrt(40.0 * max(x, 1.0)))) // 2)
    jp1, j = 0.0, 1e-30
    norm = 0.0
    j1 = 0.0
    for k in range(start, 0, -1):
        jm1 = (2.0 * k / x) * j - jp1
        jp1, j = j, jm1
        if abs(j) > 1e250:
            jp1 *= 1e-250
            j *= 1e-250
            j1 *= 1e-250
            norm *= 1e-250
        if k - 1 == 1:
            j1 = j
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j
    norm += j  # J0
    return j1 / norm


def bessel_j1(x):
    """Bessel function of the first kind, order one."""
    if np.ndim(x):
        return np.array([bessel_j1(float(v)) for v in np.ravel(x)]).reshape(np.shape(x))
    x = float(x)
    if x < 0.0:
        return -bessel_j1(-x)
    if x == 0.0:
        return 0.0
    if x < 8.0:
        return _j1_series(x)
    return _j1_miller(x)


def laguerre(n: int, s: int, x):
    """Generalised Laguerre polynomial L_n^s(x) by upward recurrence."""
    if n < 0 or s < 0:
        raise SpecialFunctionError("laguerre needs nonnegative n and s")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + s - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + s + 1 - x) * cur - (k + s) * prev) / (k + 1)
    return cur if np.ndim(cur) else float(cur)
