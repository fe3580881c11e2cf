"""Axisymmetric Euler kernels in the shifted frame ``z = x1, r = r_eps + x2``.

Scalar reference implementations: every function evaluates its theta
integral by adaptive quadrature to an absolute tolerance.  The vectorised
particle sums live in :mod:`ringlab.fastkernels`.

Conventions
-----------
``v_perp = (v2, -v1)``.  The planar kernel is ``K(d) = (-d2, d1) / (2 pi |d|^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularityError
from .quadrature import adaptive_quad

TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-10

# Below S_SMALL the I-integrals come from their small-s expansions, from
# S_LARGE on from a convergent series in 1/s^2 (quadrature of the nearly
# mean-zero integrands loses relative accuracy like s^2 there).
S_SMALL = 1e-6
S_LARGE = 20.0
N_SERIES = 18
# Near-singular threshold: split [0, pi] at theta = s and map the first cell.
S_SPLIT = 1e-2

LOG8 = math.log(8.0)


@dataclass(frozen=True)
class KernelContext:
    """Shifted-frame radius ``r_eps`` and the default quadrature tolerance."""

    r_eps: float
    quad_tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        if not (self.r_eps > 0 and math.isfinite(self.r_eps)):
            raise DomainError(f"r_eps must be positive and finite, got {self.r_eps!r}")
        if not self.quad_tol > 0:
            raise DomainError(f"quad_tol must be positive, got {self.quad_tol!r}")

    @classmethod
    def from_eps(cls, eps: float, alpha: float, quad_tol: float = DEFAULT_TOL) -> KernelContext:
        """``r_eps = alpha * |log eps|``."""
        if not 0 < eps < 1:
            raise DomainError(f"eps must lie in (0, 1), got {eps!r}")
        if not alpha > 0:
            raise DomainError(f"alpha must be positive, got {alpha!r}")
        return cls(alpha * abs(math.log(eps)), quad_tol)


@dataclass(frozen=True)
class KernelSplit:
    """``H = k_part + l_part + remainder`` at one argument pair."""

    k_part: np.ndarray
    l_part: np.ndarray
    remainder: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.k_part + self.l_part + self.remainder


# --------------------------------------------------------------------------
# theta integrals


def _theta_integral(g, s: float, tol: float) -> float:
    """Integrate ``g(theta)`` over [0, pi]; ``s`` is the peak width near 0."""
    if s >= S_SPLIT:
        return adaptive_quad(g, 0.0, math.pi, tol)[0]
    # theta = s*sinh(u) flattens the 1/(s^2 + theta^2)^p peak on [0, s].
    umax = math.asinh(1.0)

    def mapped(u: np.ndarray) -> np.ndarray:
        return g(s * np.sinh(u)) * s * np.cosh(u)

    head = adaptive_quad(mapped, 0.0, umax, 0.5 * tol)[0]
    tail = adaptive_quad(g, s, math.pi, 0.5 * tol)[0]
    return head + tail


def _series_coefficients() -> np.ndarray:
    """Rows for I0, I1, I2 as power series in ``t = 1/s^2``.

    Expanding ``(s^2 + 2u)^{-p}`` binomially in ``2u/s^2`` with
    ``u = 1 - cos(theta)`` leaves the moments
    ``m_n = int_0^pi u^n = pi binom(2n, n) / 2^n``.
    """
    n = np.arange(N_SERIES + 2)
    m = np.array([math.pi * math.comb(2 * k, k) / 2.0**k for k in n])

    def binom_neg(p: float, k: int) -> float:
        out = 1.0
        for j in range(k):
            out *= (-p - j) / (j + 1)
        return out

    rows = np.zeros((3, N_SERIES))
    for k in range(N_SERIES):
        rows[0, k] = binom_neg(0.5, k) * 2.0**k * (m[k] - m[k + 1])
        rows[1, k] = binom_neg(1.5, k) * 2.0**k * (m[k] - m[k + 1])
        rows[2, k] = binom_neg(1.5, k) * 2.0**k * m[k + 1]
    return rows


SERIES = _series_coefficients()


def large_s_series(s: float) -> tuple[float, float, float]:
    """(I0, I1, I2) for ``s >= S_LARGE``; the series converges like (4/s^2)^n."""
    t = 1.0 / (s * s)
    acc = [0.0, 0.0, 0.0]
    for row in range(3):
        v = 0.0
        for c in SERIES[row, ::-1]:
            v = v * t + c
        acc[row] = v
    return acc[0] / s, acc[1] * t / s, acc[2] * t / s


def _check_s(s: float) -> None:
    if not s > 0:
        raise DomainError(f"s must be positive, got {s!r}")


def eval_I0(s: float, tol: float = DEFAULT_TOL) -> float:
    """``int_0^pi cos(t) / sqrt(s^2 + 2(1 - cos t)) dt``."""
    _check_s(s)
    if s < S_SMALL:
        # log(8/s) - 2 + O(s^2 log s)
        return LOG8 - math.log(s) - 2.0
    if s >= S_LARGE:
        return large_s_series(s)[0]
    s2 = s * s

    def g(t: np.ndarray) -> np.ndarray:
        u = 2.0 * np.sin(0.5 * t) ** 2
        return np.cos(t) / np.sqrt(s2 + 2.0 * u)

    return _theta_integral(g, s, tol)


def eval_I1(s: float, tol: float = DEFAULT_TOL) -> float:
    """``int_0^pi cos(t) / (s^2 + 2(1 - cos t))^{3/2} dt``."""
    _check_s(s)
    if s < S_SMALL:
        # 1/s^2 - (3/8) log(8/s) + 5/16 + O(s^2 log^2 s)
        return 1.0 / (s * s) - 0.375 * (LOG8 - math.log(s)) + 0.3125
    if s >= S_LARGE:
        return large_s_series(s)[1]
    s2 = s * s

    def g(t: np.ndarray) -> np.ndarray:
        u = 2.0 * np.sin(0.5 * t) ** 2
        den = s2 + 2.0 * u
        return np.cos(t) / (den * np.sqrt(den))

    return _theta_integral(g, s, tol)


def eval_I2(s: float, tol: float = DEFAULT_TOL) -> float:
    """``int_0^pi (1 - cos t) / (s^2 + 2(1 - cos t))^{3/2} dt``."""
    _check_s(s)
    if s < S_SMALL:
        return 0.5 * (LOG8 - math.log(s)) - 0.5
    if s >= S_LARGE:
        return large_s_series(s)[2]
    s2 = s * s

    def g(t: np.ndarray) -> np.ndarray:
        u = 2.0 * np.sin(0.5 * t) ** 2
        den = s2 + 2.0 * u
        return u / (den * np.sqrt(den))

    return _theta_integral(g, s, tol)


def i0_log_form(s: float) -> float:
    """Leading logarithmic form ``log((2 + sqrt(s^2 + 4)) / s)`` of I0."""
    return math.log((2.0 + math.sqrt(s * s + 4.0)) / s)


def i1_scaled_remainder(s: float, tol: float = DEFAULT_TOL) -> float:
    """``c1(s) = (1 + s) (I1(s) - 1/s^2 - log(s/(1+s))/4)``."""
    return (1.0 + s) * (eval_I1(s, tol) - 1.0 / (s * s) - 0.25 * math.log(s / (1.0 + s)))


def i2_scaled_remainder(s: float, tol: float = DEFAULT_TOL) -> float:
    """``c2(s) = (1 + s) (I2(s) + log(s/(1+s))/2)``."""
    return (1.0 + s) * (eval_I2(s, tol) + 0.5 * math.log(s / (1.0 + s)))


# --------------------------------------------------------------------------
# planar and drift kernels


def _vec(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (2,):
        raise ValueError(f"expected a 2-vector, got shape {arr.shape}")
    return arr


def eval_K(d) -> np.ndarray:
    """Planar point-vortex kernel ``(1/2pi) (-d2, d1) / |d|^2``."""
    d = _vec(d)
    n2 = d[0] * d[0] + d[1] * d[1]
    if n2 == 0.0:
        raise SingularityError("K is singular at d = 0")
    return np.array([-d[1], d[0]]) / (TWO_PI * n2)


def eval_L(x, y, ctx: KernelContext) -> np.ndarray:
    """Axial drift kernel ``log((1 + |x-y|)/|x-y|) / (4 pi r_x) * (1, 0)``."""
    x, y = _vec(x), _vec(y)
    rx = ctx.r_eps + x[1]
    if not rx > 0:
        raise DomainError(f"r_eps + x2 must be positive, got {rx!r}")
    dist = math.hypot(x[0] - y[0], x[1] - y[1])
    if dist == 0.0:
        raise SingularityError("L is singular at x = y")
    return np.array([math.log1p(1.0 / dist) / (2.0 * TWO_PI * rx), 0.0])


# --------------------------------------------------------------------------
# full axisymmetric kernels


def _pair_geometry(x, y, ctx: KernelContext):
    x, y = _vec(x), _vec(y)
    rx = ctx.r_eps + x[1]
    ry = ctx.r_eps + y[1]
    if not (rx > 0 and ry > 0):
        raise DomainError(f"radial arguments must be positive, got r_x={rx!r}, r_y={ry!r}")
    d = x - y
    dd = float(d[0] * d[0] + d[1] * d[1])
    if dd == 0.0:
        raise SingularityError("kernel evaluated at coincident points")
    return x, y, rx, ry, d, dd


def eval_H(x, y, ctx: KernelContext, tol: float | None = None) -> np.ndarray:
    """Velocity kernel ``(H1, H2)`` at ``x`` induced by a unit ring through ``y``."""
    tol = ctx.quad_tol if tol is None else tol
    x, y, rx, ry, d, dd = _pair_geometry(x, y, ctx)
    A = rx * ry
    s = math.sqrt(dd / A)
    dy2 = y[1] - x[1]

    def g1(t: np.ndarray) -> np.ndarray:
        h = np.sin(0.5 * t) ** 2
        den = dd + 4.0 * A * h
        # r_y - r_x cos t, written without cancellation near t = 0
        return ry * (dy2 + 2.0 * rx * h) / (den * np.sqrt(den)) / TWO_PI

    h1 = _theta_integral(g1, s, tol)
    if d[0] == 0.0:
        h2 = 0.0
    else:

        def g2(t: np.ndarray) -> np.ndarray:
            den = dd + 4.0 * A * np.sin(0.5 * t) ** 2
            return ry * d[0] * np.cos(t) / (den * np.sqrt(den)) / TWO_PI

        h2 = _theta_integral(g2, s, tol)
    return np.array([h1, h2])


def eval_S(x, y, ctx: KernelContext, tol: float | None = None) -> float:
    """Green kernel of the axisymmetric stream function."""
    tol = ctx.quad_tol if tol is None else tol
    x, y, rx, ry, d, dd = _pair_geometry(x, y, ctx)
    A = rx * ry
    s = math.sqrt(dd / A)

    def g(t: np.ndarray) -> np.ndarray:
        return A * np.cos(t) / np.sqrt(dd + 4.0 * A * np.sin(0.5 * t) ** 2) / TWO_PI

    return _theta_integral(g, s, tol)


def eval_remainder(x, y, ctx: KernelContext, tol: float | None = None) -> np.ndarray:
    """``H - K - L``; bounded as ``x -> y``."""
    return kernel_split(x, y, ctx, tol).remainder


def kernel_split(x, y, ctx: KernelContext, tol: float | None = None) -> KernelSplit:
    x, y = _vec(x), _vec(y)
    h = eval_H(x, y, ctx, tol)
    k = eval_K(x - y)
    l_part = eval_L(x, y, ctx)
    return KernelSplit(k_part=k, l_part=l_part, remainder=h - k - l_part)


def remainder_terms(x, y, ctx: KernelContext, tol: float | None = None) -> np.ndarray:
    """The six pieces ``R^1 .. R^6`` of the remainder, shape (6, 2).

    ``c1`` and ``c2`` are obtained from I1 and I2 by quadrature, so the sum of
    the rows reproduces :func:`eval_remainder` up to quadrature error.
    """
    tol = ctx.quad_tol if tol is None else tol
    x, y, rx, ry, d, dd = _pair_geometry(x, y, ctx)
    dist = math.sqrt(dd)
    sqA = math.sqrt(rx * ry)
    a = dist / sqA
    q = math.sqrt(ry / rx)
    dperp = np.array([d[1], -d[0]])
    e1 = np.array([1.0, 0.0])
    c1 = i1_scaled_remainder(a, tol)
    c2 = i2_scaled_remainder(a, tol)
    log_d = math.log(dist / (1.0 + dist))
    log_a = math.log(a / (1.0 + a))
    return np.array(
        [
            (1.0 - q) * dperp / (TWO_PI * dd),
            -log_a * dperp / (4.0 * TWO_PI * rx * sqA),
            q * (log_d - log_a) / (2.0 * TWO_PI * rx) * e1,
            (1.0 - q) * log_d / (2.0 * TWO_PI * rx) * e1,
            -c1 / (TWO_PI * (1.0 + a)) * dperp / (rx * sqA),
            c2 * q / (TWO_PI * (1.0 + a) * rx) * e1,
        ]
    )
