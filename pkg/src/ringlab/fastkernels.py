"""Compiled O(N^2) particle sums for the blob simulator.

The special integrals are reconstructed from their logarithmic leading terms
plus the bounded corrections

    c0(s) = I0(s) - log((2 + sqrt(s^2 + 4)) / s)
    c1(s) = (1 + s) (I1(s) - 1/s^2 - log(s/(1+s)) / 4)
    c2(s) = (1 + s) (I2(s) + log(s/(1+s)) / 2)

tabulated on a uniform grid in ``log s`` and interpolated with 4-point
Lagrange stencils.  For ``s >= 1`` those forms cancel (each piece is O(1/s)
while the integrals decay like s^-3 and s^-5), so the scaled integrals
``s^3 I0``, ``s^5 I1`` and ``s^3 I2`` are tabulated as well and used there.
Below ``S_SMALL`` and from ``S_LARGE`` on, the expansions of
:mod:`ringlab.kernels` take over.

Regularisation: a blob of core ``delta`` is obtained by ``|x-y|^2 -> |x-y|^2 +
delta^2`` inside the stream kernel S; the velocity is ``r_x^{-1} grad_perp S``,
which keeps the discrete energy an exact invariant of the semi-discrete flow.

Every sum runs over sources in index order for each target, so results are
bitwise reproducible.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from numba import njit

from .kernels import S_LARGE, S_SMALL, SERIES

# The table spans [S_SMALL, 2 S_LARGE] so interpolation stencils never leave it.
U_MIN = math.log(S_SMALL)
U_MAX = math.log(2.0 * S_LARGE)
N_TABLE = 3600
H_TABLE = (U_MAX - U_MIN) / (N_TABLE - 1)
_SERIES = np.ascontiguousarray(SERIES)

_LOG8 = math.log(8.0)
_TWO_PI = 2.0 * math.pi


def _gauss_legendre_panels(n_panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def special_integrals_batch(s: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """I0, I1, I2 for an array of ``s`` by a fixed mapped Gauss-Legendre rule.

    ``theta = s sinh(v)`` turns the near-singular peak at theta = 0 into a smooth
    profile; 96 panels of 20 points cover ``v in [0, asinh(pi/s)]``.
    """
    s = np.asarray(s, dtype=float)
    t, w = _gauss_legendre_panels(96, 20)
    out0 = np.empty_like(s)
    out1 = np.empty_like(s)
    out2 = np.empty_like(s)
    for k0 in range(0, s.size, 256):
        sl = s[k0 : k0 + 256]
        vmax = np.arcsinh(math.pi / sl)
        v = vmax[:, None] * t[None, :]
        theta = sl[:, None] * np.sinh(v)
        jac = sl[:, None] * np.cosh(v) * vmax[:, None] * w[None, :]
        u = 2.0 * np.sin(0.5 * theta) ** 2
        den = sl[:, None] ** 2 + 2.0 * u
        root = np.sqrt(den)
        c = np.cos(theta)
        out0[k0 : k0 + 256] = np.sum(jac * c / root, axis=1)
        out1[k0 : k0 + 256] = np.sum(jac * c / (den * root), axis=1)
        out2[k0 : k0 + 256] = np.sum(jac * u / (den * root), axis=1)
    return out0, out1, out2


@lru_cache(maxsize=1)
def correction_table() -> np.ndarray:
    """Shape (6, N_TABLE) at ``s = exp(U_MIN + k H_TABLE)``: c0, c1, c2, s^3 I0, s^5 I1, s^3 I2."""
    s = np.exp(U_MIN + H_TABLE * np.arange(N_TABLE))
    i0, i1, i2 = special_integrals_batch(s)
    lg = np.log(s / (1.0 + s))
    c0 = i0 - np.log((2.0 + np.sqrt(s * s + 4.0)) / s)
    c1 = (1.0 + s) * (i1 - 1.0 / (s * s) - 0.25 * lg)
    c2 = (1.0 + s) * (i2 + 0.5 * lg)
    tab = np.ascontiguousarray(np.vstack([c0, c1, c2, s**3 * i0, s**5 * i1, s**3 * i2]))
    tab.setflags(write=False)
    return tab


@njit(cache=True)
def _interp(tab, row, u):
    x = (u - U_MIN) / H_TABLE
    k = int(math.floor(x)) - 1
    if k < 0:
        k = 0
    elif k > N_TABLE - 4:
        k = N_TABLE - 4
    t = x - k
    # Lagrange weights on nodes k .. k+3 at offset t (node offsets 0, 1, 2, 3)
    w0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0
    w1 = t * (t - 2.0) * (t - 3.0) / 2.0
    w2 = -t * (t - 1.0) * (t - 3.0) / 2.0
    w3 = t * (t - 1.0) * (t - 2.0) / 6.0
    return w0 * tab[row, k] + w1 * tab[row, k + 1] + w2 * tab[row, k + 2] + w3 * tab[row, k + 3]


@njit(cache=True)
def _series(row, s):
    t = 1.0 / (s * s)
    v = 0.0
    for k in range(_SERIES.shape[1] - 1, -1, -1):
        v = v * t + _SERIES[row, k]
    return v


@njit(cache=True)
def special_i12(s, tab):
    """(I1(s), I2(s)) from the correction table / asymptotic forms."""
    if s < S_SMALL:
        ls = _LOG8 - math.log(s)
        return 1.0 / (s * s) - 0.375 * ls + 0.3125, 0.5 * ls - 0.5
    if s >= S_LARGE:
        s3 = s * s * s
        return _series(1, s) / s3, _series(2, s) / s3
    u = math.log(s)
    if s >= 1.0:
        return _interp(tab, 4, u) / s**5, _interp(tab, 5, u) / s**3
    lg = math.log(s / (1.0 + s))
    i1 = 1.0 / (s * s) + 0.25 * lg + _interp(tab, 1, u) / (1.0 + s)
    i2 = -0.5 * lg + _interp(tab, 2, u) / (1.0 + s)
    return i1, i2


@njit(cache=True)
def special_i0(s, tab):
    if s < S_SMALL:
        return _LOG8 - math.log(s) - 2.0
    if s >= S_LARGE:
        return _series(0, s) / s
    if s >= 1.0:
        return _interp(tab, 3, math.log(s)) / s**3
    return math.log((2.0 + math.sqrt(s * s + 4.0)) / s) + _interp(tab, 0, math.log(s))


@njit(cache=True)
def _pair_velocity(x1, x2, y1, y2, r_eps, delta2, tab):
    """Regularised kernel H_delta(x, y); NaN pair when singular."""
    rx = r_eps + x2
    ry = r_eps + y2
    d1 = x1 - y1
    d2 = x2 - y2
    rho2 = d1 * d1 + d2 * d2 + delta2
    if rho2 == 0.0:
        return math.nan, math.nan
    sq_a = math.sqrt(rx * ry)
    i1, i2 = special_i12(math.sqrt(rho2) / sq_a, tab)
    pre = 1.0 / (_TWO_PI * rx)
    return pre * (-i1 * d2 / sq_a + i2 * sq_a / rx), pre * i1 * d1 / sq_a


@njit(cache=True)
def velocity_at(targets, sources, weights, r_eps, delta2, exclude, tab):
    """Field at arbitrary targets; ``exclude`` (>= 0) skips one source index.

    Returns (velocities, bad) where ``bad`` is the first singular target
    index, or -1.
    """
    m = targets.shape[0]
    n = sources.shape[0]
    out = np.zeros((m, 2))
    for i in range(m):
        x1 = targets[i, 0]
        x2 = targets[i, 1]
        if r_eps + x2 <= 0.0:
            return out, i
        acc1 = 0.0
        acc2 = 0.0
        for j in range(n):
            if j == exclude or weights[j] == 0.0:
                continue
            h1, h2 = _pair_velocity(x1, x2, sources[j, 0], sources[j, 1], r_eps, delta2, tab)
            if math.isnan(h1):
                return out, i
            acc1 += weights[j] * h1
            acc2 += weights[j] * h2
        out[i, 0] = acc1
        out[i, 1] = acc2
    return out, -1


@njit(cache=True)
def self_velocity(pos, weights, r_eps, delta2, tab):
    """Velocity of every particle induced by all particles.

    With ``delta2 > 0`` the self term is included (finite axial drift of the
    blob); with ``delta2 == 0`` it is skipped.  The scalar kernel values
    depend on the pair only through the symmetric argument
    ``sqrt(|d|^2 + delta^2) / sqrt(r_x r_y)``, so they are computed once per
    unordered pair.  Returns (velocities, bad_pair_first_index).
    """
    n = pos.shape[0]
    out = np.zeros((n, 2))
    for i in range(n):
        x1 = pos[i, 0]
        x2 = pos[i, 1]
        rx = r_eps + x2
        if rx <= 0.0:
            return out, i
        if delta2 > 0.0 and weights[i] != 0.0:
            i1, i2 = special_i12(math.sqrt(delta2) / rx, tab)
            out[i, 0] += weights[i] * i2 / (_TWO_PI * rx)
        for j in range(i + 1, n):
            wi = weights[i]
            wj = weights[j]
            if wi == 0.0 and wj == 0.0:
                continue
            y1 = pos[j, 0]
            y2 = pos[j, 1]
            ry = r_eps + y2
            d1 = x1 - y1
            d2 = x2 - y2
            rho2 = d1 * d1 + d2 * d2 + delta2
            if rho2 == 0.0:
                return out, i
            sq_a = math.sqrt(rx * ry)
            i1, i2 = special_i12(math.sqrt(rho2) / sq_a, tab)
            # contribution of j at i
            pre = 1.0 / (_TWO_PI * rx)
            out[i, 0] += wj * pre * (-i1 * d2 / sq_a + i2 * sq_a / rx)
            out[i, 1] += wj * pre * i1 * d1 / sq_a
            # contribution of i at j (d -> -d, r_x <-> r_y)
            pre = 1.0 / (_TWO_PI * ry)
            out[j, 0] += wi * pre * (i1 * d2 / sq_a + i2 * sq_a / ry)
            out[j, 1] -= wi * pre * i1 * d1 / sq_a
    return out, -1


@njit(cache=True)
def energy_blocks(pos, weights, tags, n_rings, r_eps, delta2, tab):
    """``pi * sum w_p w_q S_delta(x_p, x_q)`` grouped by ring pair.

    Diagonal terms are included when ``delta2 > 0``.  Returns a symmetric
    (n_rings, n_rings) matrix; entry (i, j) is E_{i,j}, the diagonal is E_i.
    """
    n = pos.shape[0]
    out = np.zeros((n_rings, n_rings))
    for i in range(n):
        rx = r_eps + pos[i, 1]
        ti = tags[i]
        if delta2 > 0.0:
            sig = math.sqrt(delta2) / rx
            out[ti, ti] += weights[i] * weights[i] * 0.5 * rx * special_i0(sig, tab)
        for j in range(i + 1, n):
            ry = r_eps + pos[j, 1]
            d1 = pos[i, 0] - pos[j, 0]
            d2 = pos[i, 1] - pos[j, 1]
            rho2 = d1 * d1 + d2 * d2 + delta2
            if rho2 == 0.0:
                continue
            sq_a = math.sqrt(rx * ry)
            val = weights[i] * weights[j] * 0.5 * sq_a * special_i0(math.sqrt(rho2) / sq_a, tab)
            tj = tags[j]
            out[ti, tj] += val
            out[tj, ti] += val
    return out
