"""Compiled RK4 kernel for batches of ensembles (numba).

Same equations as `dynamics.bloch_derivative`, fused into one pass per RK
stage.  Results agree with the numpy path to rounding (the collective sums
are accumulated sequentially here, pairwise in numpy).
"""
from __future__ import annotations

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def _rhs(src, zeta, chi, eps, gamma, big_gamma, gamma_el, out):
    n_rows, _, n = src.shape
    damp = 0.5 * gamma + gamma_el
    for p in range(n_rows):
        a = 0.0
        b = 0.0
        for i in range(n):
            a += zeta[i] * src[p, 0, i]
            b += zeta[i] * src[p, 1, i]
        for i in range(n):
            sx = src[p, 0, i]
            sy = src[p, 1, i]
            sz = src[p, 2, i]
            fx = 2.0 * chi[p] * zeta[i] * a
            fy = 2.0 * chi[p] * zeta[i] * b
            ga = big_gamma * zeta[i] * a
            gb = big_gamma * zeta[i] * b
            out[p, 0, i] = fy * sz - eps[p, i] * sy - damp * sx + ga * sz
            out[p, 1, i] = eps[p, i] * sx - fx * sz - damp * sy + gb * sz
            out[p, 2, i] = fx * sy - fy * sx - gamma * (sz + 0.5) - (ga * sx + gb * sy)


def _integrate(y, zeta, chi, eps, dt, n_steps, gamma, big_gamma, gamma_el, delta):
    n_rows, _, n = y.shape
    k1 = np.empty_like(y)
    k2 = np.empty_like(y)
    k3 = np.empty_like(y)
    k4 = np.empty_like(y)
    tmp = np.empty_like(y)
    for p in range(n_rows):
        a = 0.0
        b = 0.0
        for i in range(n):
            a += zeta[i] * y[p, 0, i]
            b += zeta[i] * y[p, 1, i]
        delta[p, 0] = chi[p] * complex(a, -b)
    for step in range(1, n_steps + 1):
        _rhs_c(y, zeta, chi, eps, gamma, big_gamma, gamma_el, k1)
        for p in range(n_rows):
            for c in range(3):
                for i in range(n):
                    tmp[p, c, i] = y[p, c, i] + 0.5 * dt * k1[p, c, i]
        _rhs_c(tmp, zeta, chi, eps, gamma, big_gamma, gamma_el, k2)
        for p in range(n_rows):
            for c in range(3):
                for i in range(n):
                    tmp[p, c, i] = y[p, c, i] + 0.5 * dt * k2[p, c, i]
        _rhs_c(tmp, zeta, chi, eps, gamma, big_gamma, gamma_el, k3)
        for p in range(n_rows):
            for c in range(3):
                for i in range(n):
                    tmp[p, c, i] = y[p, c, i] + dt * k3[p, c, i]
        _rhs_c(tmp, zeta, chi, eps, gamma, big_gamma, gamma_el, k4)
        for p in range(n_rows):
            a = 0.0
            b = 0.0
            for c in range(3):
                for i in range(n):
                    y[p, c, i] = y[p, c, i] + (dt / 6.0) * (
                        k1[p, c, i] + 2.0 * k2[p, c, i] + 2.0 * k3[p, c, i] + k4[p, c, i]
                    )
            for i in range(n):
                a += zeta[i] * y[p, 0, i]
                b += zeta[i] * y[p, 1, i]
            delta[p, step] = chi[p] * complex(a, -b)


if numba is not None:
    _rhs_c = numba.njit(cache=True)(_rhs)
    _integrate_c = numba.njit(cache=True)(_integrate)
else:  # pragma: no cover
    _rhs_c = _rhs
    _integrate_c = None


def available() -> bool:
    return _integrate_c is not None


def integrate_batch(bloch0, zeta, chi, eps, dt, n_steps, gamma=0.0, big_gamma=0.0, gamma_el=0.0):
    """Evolve (P, 3, N) in place-free fashion; returns (Delta (P, steps+1), final state)."""
    y = np.array(bloch0, dtype=np.float64, order="C")
    p = y.shape[0]
    eps = np.ascontiguousarray(np.broadcast_to(eps, (p, y.shape[2])), dtype=np.float64)
    zeta = np.ascontiguousarray(zeta, dtype=np.float64)
    chi = np.ascontiguousarray(np.broadcast_to(chi, (p,)), dtype=np.float64)
    delta = np.empty((p, n_steps + 1), dtype=np.complex128)
    _integrate_c(y, zeta, chi, eps, float(dt), int(n_steps), float(gamma), float(big_gamma), float(gamma_el), delta)
    return delta, y
