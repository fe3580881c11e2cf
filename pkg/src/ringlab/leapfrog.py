"""Two-ring relative motion: Hamiltonian level sets, periods and overtakings.

With ``x = zeta_1 - zeta_2`` the reduced system is ``dx/dt = grad_perp H(x)``,

    H(x) = -(a1 + a2)/(4 pi) log|x|^2 + (a1 - a2)/(4 pi alpha) x2,

and a level ``H = E`` is the curve ``|x|^2 = C_E exp(kappa x2)`` with
``C_E = exp(-4 pi E / (a1 + a2))`` and ``kappa = 1 / (alpha a)``,
``a = (a1 + a2)/(a1 - a2)``.  Its trace is ``x1 = +/- f(x2)``,
``f = sqrt(C_E exp(kappa x2) - x2^2)``.

Equal intensities give ``kappa = 0`` (circular orbits, equilibrium at
infinity).  ``kappa < 0`` is handled by the reflection ``x2 -> -x2``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import brentq

from .errors import (
    CollisionError,
    ConsistencyError,
    DegeneratePairError,
    DomainError,
    NonPeriodicLevelError,
    NotFoundError,
    SingularityError,
)
from .quadrature import adaptive_quad
from .reduced import ReducedState, Trajectory, integrate_reduced

FloatArray = NDArray[np.float64]

ROOT_TOL = 1e-13
PERIOD_TOL = 1e-10
# Relative tolerance on log(C_E / C*) under which a level counts as tangent.
TANGENT_TOL = 1e-12


@dataclass(frozen=True)
class TwoRingParams:
    """Intensities ``a1, a2`` and ``alpha``; ``a``, ``x*`` and ``C*`` are derived."""

    a1: float
    a2: float
    alpha: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a1) and math.isfinite(self.a2)):
            raise DomainError("intensities must be finite")
        if self.a1 + self.a2 == 0:
            raise DegeneratePairError("a1 + a2 = 0 (vortex dipole) is not supported")
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")

    @property
    def total(self) -> float:
        return self.a1 + self.a2

    @property
    def kappa(self) -> float:
        """``1 / (alpha a) = (a1 - a2) / (alpha (a1 + a2))``."""
        return (self.a1 - self.a2) / (self.alpha * (self.a1 + self.a2))

    @property
    def a(self) -> float:
        if self.a1 == self.a2:
            return math.inf
        return (self.a1 + self.a2) / (self.a1 - self.a2)

    @property
    def xstar(self) -> FloatArray:
        k = self.kappa
        return np.array([0.0, math.inf if k == 0 else 2.0 / k])

    @property
    def cstar(self) -> float:
        k = self.kappa
        return math.inf if k == 0 else (2.0 / (math.e * k)) ** 2

    def with_alpha(self, alpha: float) -> TwoRingParams:
        return TwoRingParams(self.a1, self.a2, alpha)


@dataclass(frozen=True)
class OrbitLevel:
    """Level data: ``roots`` is ``(eta1, eta2, eta3)`` or ``(eta_bar,)``."""

    c_e: float
    energy: float
    roots: tuple[float, ...]
    periodic: bool
    period: float | None = None

    @property
    def eta1(self) -> float:
        return self.roots[0]


def c_e_from_energy(energy: float, params: TwoRingParams) -> float:
    return math.exp(-4.0 * math.pi * energy / params.total)


def energy_from_c_e(c_e: float, params: TwoRingParams) -> float:
    if not c_e > 0:
        raise DomainError(f"C_E must be positive, got {c_e!r}")
    return -params.total * math.log(c_e) / (4.0 * math.pi)


# --------------------------------------------------------------------------
# change of variables and Hamiltonian


def reduce_two_ring(z1, z2, params: TwoRingParams) -> tuple[FloatArray, FloatArray]:
    """``x = z1 - z2``, ``y = (a1 z1 + a2 z2) / (a1 + a2)``."""
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    return z1 - z2, (params.a1 * z1 + params.a2 * z2) / params.total


def expand_two_ring(x, y, params: TwoRingParams) -> tuple[FloatArray, FloatArray]:
    """Inverse of :func:`reduce_two_ring`."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return y + (params.a2 / params.total) * x, y - (params.a1 / params.total) * x


def hamiltonian(x, params: TwoRingParams) -> float:
    x = np.asarray(x, dtype=float)
    r2 = float(x[0] * x[0] + x[1] * x[1])
    if r2 == 0.0:
        raise SingularityError("Hamiltonian is singular at x = 0")
    return -params.total / (4.0 * math.pi) * math.log(r2) + (params.a1 - params.a2) / (
        4.0 * math.pi * params.alpha
    ) * float(x[1])


def level_constant(x, params: TwoRingParams) -> float:
    """``exp(-4 pi H(x) / (a1 + a2)) = |x|^2 exp(-kappa x2)``."""
    x = np.asarray(x, dtype=float)
    return float((x[0] ** 2 + x[1] ** 2) * math.exp(-params.kappa * x[1]))


def radicand(x2, c_e: float, params: TwoRingParams):
    """``g(x2) = C_E exp(kappa x2) - x2^2``; roots of g bound Dom(f)."""
    x2 = np.asarray(x2, dtype=float)
    return c_e * np.exp(params.kappa * x2) - x2 * x2


# --------------------------------------------------------------------------
# roots


def _log_g(eta: float, log_c: float, kappa: float) -> float:
    # sign(g) = sign(log C_E + kappa eta - 2 log|eta|) away from eta = 0
    return log_c + kappa * eta - 2.0 * math.log(abs(eta))


def _bracketed_root(fun, a: float, b: float, tol: float) -> float:
    return brentq(fun, min(a, b), max(a, b), xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)


def _expand(fun, start: float, inner: float) -> float:
    """Move ``start`` away from ``inner`` by doubling until ``fun`` changes sign."""
    b = start
    f_in = fun(inner)
    for _ in range(2000):
        if fun(b) * f_in <= 0:
            return b
        b = inner + 2.0 * (b - inner)
        if not math.isfinite(b):
            break
    raise ConsistencyError(f"no sign change found beyond {inner!r}")


def _roots_positive_kappa(c_e: float, kappa: float, tol: float) -> tuple[tuple[float, ...], bool]:
    log_c = math.log(c_e)
    sq = math.sqrt(c_e)
    alpha_a = 1.0 / kappa
    xs = 2.0 * alpha_a

    def h(eta: float) -> float:
        return _log_g(eta, log_c, kappa)

    # h increases on (-inf, 0), is positive at -sq exp(-kappa sq / 2) / 2
    inner = -0.5 * sq * math.exp(-0.5 * kappa * sq)
    lo = _expand(h, -4.0 * alpha_a * max(1.0, sq / alpha_a), inner)
    eta1 = _bracketed_root(h, inner, lo, tol)
    gap = log_c - 2.0 * math.log(2.0 / (math.e * kappa))  # log(C_E / C*)
    if abs(gap) <= TANGENT_TOL:
        return (eta1, xs, xs), False
    if gap > 0:
        return (eta1,), False
    # h decreases on (0, x*2), increases on (x*2, inf); h(sq / 2) > 0 and sq / 2 < x*2
    eta2 = _bracketed_root(h, 0.5 * sq, xs, tol)
    hi = _expand(h, 4.0 * xs, xs)
    eta3 = _bracketed_root(h, xs, hi, tol)
    return (eta1, eta2, eta3), True


def level_roots(c_e: float, params: TwoRingParams, tol: float = ROOT_TOL) -> OrbitLevel:
    """Roots of ``C_E exp(kappa eta) = eta^2`` and the branch classification.

    Each root is bracketed on an interval where ``log(C_E e^{kappa eta} / eta^2)``
    is monotone; outer brackets start from the window
    ``[-4 alpha a max(1, sqrt(C_E)/(alpha a)), 8 alpha a]`` and are doubled
    outward as needed, then polished with Brent's method.

    Raises
    ------
    ConsistencyError
        If the roots found contradict the ``C_E`` vs ``C*`` classification.
    """
    if not c_e > 0 or not math.isfinite(c_e):
        raise DomainError(f"C_E must be positive and finite, got {c_e!r}")
    kappa = params.kappa
    energy = energy_from_c_e(c_e, params)
    if kappa == 0.0:
        r = math.sqrt(c_e)
        return OrbitLevel(c_e, energy, (-r, r), True)
    roots, periodic = _roots_positive_kappa(c_e, abs(kappa), tol)
    if len(roots) == 3:
        r1, r2, r3 = roots
        ordered = r1 < 0 < r2 <= 2.0 / abs(kappa) <= r3
    else:
        ordered = roots[0] < 0
    below = c_e < params.cstar
    # the tangent level (three roots, not periodic) may sit within rounding of C*
    if not ordered or (periodic and not below) or (len(roots) == 1 and below):
        raise ConsistencyError(f"roots {roots!r} contradict the branch for C_E = {c_e!r}")
    if kappa < 0:
        # reflection x2 -> -x2; the closed component keeps the first two slots
        roots = (-roots[1], -roots[0], -roots[2]) if len(roots) == 3 else (-roots[0],)
    for r in roots:
        scale = max(1.0, r * r)
        if abs(float(radicand(r, c_e, params))) > 1e-9 * scale:
            raise ConsistencyError(f"root {r!r} does not satisfy the level equation")
    return OrbitLevel(c_e, energy, roots, periodic)


def closed_component(level: OrbitLevel) -> tuple[float, float]:
    """Endpoints ``(eta1, eta2)`` of the closed orbit's x2-range."""
    if not level.periodic:
        raise NonPeriodicLevelError(f"level C_E = {level.c_e!r} has no closed component")
    lo, hi = level.roots[0], level.roots[1]
    return (lo, hi) if lo < hi else (hi, lo)


# --------------------------------------------------------------------------
# periods


def _period_integrand(eta1: float, eta2: float, kappa: float):
    """Integrand in phi of ``int e^{kappa x}/sqrt(g) dx`` with x = eta1 + D sin^2 phi.

    The radicand is factored around the nearer endpoint using the root
    identity ``C_E e^{kappa eta} = eta^2`` so that it keeps full relative
    precision at both ends.
    """
    D = eta2 - eta1
    sqD = math.sqrt(D)

    def ratio(x):
        # expm1(kappa x) / x with its limit kappa at x = 0
        out = np.full_like(x, kappa)
        nz = x != 0
        out[nz] = np.expm1(kappa * x[nz]) / x[nz]
        return out

    def f(phi: np.ndarray) -> np.ndarray:
        s = np.sin(phi) ** 2
        t = np.cos(phi) ** 2
        x = eta1 + D * s
        p = eta1 * eta1 * ratio(D * s) - 2.0 * eta1 - D * s
        q = -eta2 * eta2 * ratio(-D * t) + 2.0 * eta2 - D * t
        near_lo = s <= 0.5
        val = np.empty_like(phi)
        val[near_lo] = 2.0 * sqD * np.cos(phi[near_lo]) / np.sqrt(p[near_lo])
        val[~near_lo] = 2.0 * sqD * np.sin(phi[~near_lo]) / np.sqrt(q[~near_lo])
        return np.exp(kappa * x) * val

    return f


def period(c_e: float, params: TwoRingParams, tol: float = PERIOD_TOL) -> float:
    """Period ``T_E`` of the closed orbit on level ``C_E``.

    Raises
    ------
    NonPeriodicLevelError
        If ``C_E >= C*``.
    """
    if not c_e < params.cstar:
        raise NonPeriodicLevelError(f"C_E = {c_e!r} >= C* = {params.cstar!r}: no closed orbit")
    level = level_roots(c_e, params)
    eta1, eta2 = closed_component(level)
    pref = 4.0 * math.pi * c_e / abs(params.total)
    val, _ = adaptive_quad(_period_integrand(eta1, eta2, params.kappa), 0.0, 0.5 * math.pi, tol / pref)
    return pref * val


def planar_period(c_e: float, params: TwoRingParams) -> float:
    """Period of the circular orbit of radius ``sqrt(C_E)`` without drift."""
    return 4.0 * math.pi**2 * c_e / abs(params.total)


def orbit_level(c_e: float, params: TwoRingParams) -> OrbitLevel:
    """Roots plus period (when periodic)."""
    lv = level_roots(c_e, params)
    if lv.periodic:
        return OrbitLevel(lv.c_e, lv.energy, lv.roots, True, period(c_e, params))
    return lv


# --------------------------------------------------------------------------
# orbits and overtakings


def turning_point(level: OrbitLevel) -> FloatArray:
    """``(0, eta2)``: the far end of the closed component."""
    _, hi = closed_component(level)
    return np.array([0.0, hi])


def orbit_state(x0, params: TwoRingParams, y0=(0.0, 0.0)) -> ReducedState:
    z1, z2 = expand_two_ring(x0, y0, params)
    return ReducedState(np.vstack([z1, z2]), [params.a1, params.a2], params.alpha)


def relative_positions(traj: Trajectory) -> FloatArray:
    return traj.centers[:, 0, :] - traj.centers[:, 1, :]


def default_overtaking_floor(params: TwoRingParams, scale: float) -> float:
    return 1e-9 * abs(params.total) / (2.0 * math.pi * scale)


def detect_overtakings(
    traj: Trajectory, params: TwoRingParams, floor: float | None = None
) -> list[float]:
    """Times where ``x1 = zeta^1_1 - zeta^2_1`` changes sign with ``|dx1/dt| >= floor``.

    Crossings are located by linear interpolation between bracketing samples;
    samples with ``x1 == 0`` exactly (e.g. a start on the axis) are skipped.
    """
    x = relative_positions(traj)
    x1 = x[:, 0]
    if floor is None:
        floor = default_overtaking_floor(params, float(np.max(np.hypot(x[:, 0], x[:, 1]))))
    nz = np.flatnonzero(x1 != 0.0)
    out: list[float] = []
    for k0, k1 in zip(nz[:-1], nz[1:]):
        if x1[k0] * x1[k1] > 0:
            continue
        t0, t1 = traj.times[k0], traj.times[k1]
        u = x1[k0] / (x1[k0] - x1[k1])
        tc = t0 + u * (t1 - t0)
        zc = (1.0 - u) * traj.centers[k0] + u * traj.centers[k1]
        d = zc[0] - zc[1]
        r2 = float(d @ d)
        if r2 == 0.0:
            continue
        # dx1/dt = -(a1 + a2) x2 / (2 pi |x|^2) + (a1 - a2) / (4 pi alpha)
        v1 = -params.total * d[1] / (2.0 * math.pi * r2) + (params.a1 - params.a2) / (4.0 * math.pi * params.alpha)
        if abs(v1) >= floor:
            out.append(float(tc))
    return out


def orbit_dt(c_e: float, params: TwoRingParams, steps_per_period: int = 4000) -> float:
    return period(c_e, params) / steps_per_period


def first_return_time(c_e: float, params: TwoRingParams, dt: float | None = None) -> float:
    """Time for the relative orbit started at ``(0, eta2)`` to come back, by ODE integration.

    The second axis crossing after the start is refined with cubic Hermite
    interpolation of the trajectory.
    """
    lv = level_roots(c_e, params)
    tp = period(c_e, params)
    if dt is None:
        dt = tp / 4000
    traj = integrate_reduced(orbit_state(turning_point(lv), params), 1.25 * tp, dt)
    x1 = relative_positions(traj)[:, 0]
    crossings = 0
    for k in range(1, x1.size - 1):
        if x1[k] * x1[k + 1] < 0 or (x1[k + 1] == 0.0 and x1[k] != 0.0):
            crossings += 1
            if crossings == 2:
                lo, hi = traj.times[k], traj.times[k + 1]

                def g(t: float) -> float:
                    z = traj.at(t)
                    return float(z[0, 0] - z[1, 0])

                return brentq(g, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    raise ConsistencyError("orbit did not return within 1.25 periods")


# --------------------------------------------------------------------------
# alpha threshold


@dataclass(frozen=True)
class AlphaCertificate:
    """Values proving the three threshold conditions at ``alpha``."""

    alpha: float
    c_e: float
    cstar: float
    min_separation: float
    period: float
    planar_period: float
    horizon: float
    k: int
    rho: float

    def holds(self) -> bool:
        return (
            self.c_e < self.cstar
            and self.min_separation >= 4.0 * self.rho
            and self.k * self.period < self.horizon
        )


def certify_alpha(
    alpha: float,
    rho: float,
    energy: float,
    k: int,
    a1: float,
    a2: float,
    steps_per_period: int = 400,
) -> AlphaCertificate:
    """Evaluate conditions (a) ``C_E < C*``, (b) ``min |x| >= 4 rho`` on
    ``[0, (k+1) T_planar]`` and (c) ``k T_E < (k+1) T_planar`` at one ``alpha``."""
    params = TwoRingParams(a1, a2, alpha)
    c_e = c_e_from_energy(energy, params)
    tplan = planar_period(c_e, params)
    horizon = (k + 1) * tplan
    if not c_e < params.cstar:
        return AlphaCertificate(alpha, c_e, params.cstar, 0.0, math.inf, tplan, horizon, k, rho)
    lv = level_roots(c_e, params)
    tp = period(c_e, params)
    try:
        traj = integrate_reduced(orbit_state(turning_point(lv), params), horizon, tp / steps_per_period)
        sep = traj.min_separation
    except CollisionError:
        sep = 0.0
    return AlphaCertificate(alpha, c_e, params.cstar, sep, tp, tplan, horizon, k, rho)


def alpha_threshold(
    rho: float,
    energy: float,
    k: int,
    a1: float,
    a2: float,
    *,
    alpha_cap: float = 1e8,
    bisections: int = 40,
) -> AlphaCertificate:
    """Smallest ``alpha`` (doubling from 1, then bisection) meeting all three conditions.

    Raises
    ------
    DomainError
        If ``R_E = exp(-2 pi E/(a1 + a2)) <= 4 rho``.
    NotFoundError
        If no ``alpha <= alpha_cap`` satisfies the conditions.
    """
    if not rho > 0:
        raise DomainError("rho must be positive")
    if k < 1:
        raise DomainError("k must be a positive integer")
    total = a1 + a2
    if total == 0:
        raise DegeneratePairError("a1 + a2 = 0 (vortex dipole) is not supported")
    r_e = math.exp(-2.0 * math.pi * energy / total)
    if not r_e > 4.0 * rho:
        raise DomainError(f"R_E = {r_e!r} must exceed 4 rho = {4 * rho!r}")

    def check(al: float) -> AlphaCertificate:
        return certify_alpha(al, rho, energy, k, a1, a2)

    alpha = 1.0
    cert = check(alpha)
    if cert.holds():
        # walk down until a failing alpha brackets the threshold
        hi_cert = cert
        lo = alpha
        while True:
            lo *= 0.5
            if lo < 1e-12:
                return hi_cert
            c = check(lo)
            if not c.holds():
                break
            hi_cert = c
        hi = hi_cert.alpha
    else:
        lo = alpha
        while True:
            alpha *= 2.0
            if alpha > alpha_cap:
                raise NotFoundError(
                    f"no alpha <= {alpha_cap:g} satisfies the threshold conditions "
                    f"(last: C_E={cert.c_e:.6g}, C*={cert.cstar:.6g}, min|x|={cert.min_separation:.6g}, "
                    f"4 rho={4 * rho:.6g}, k T_E={k * cert.period:.6g}, T={cert.horizon:.6g})"
                )
            cert = check(alpha)
            if cert.holds():
                break
            lo = alpha
        hi_cert = cert
        hi = alpha
    for _ in range(bisections):
        mid = 0.5 * (lo + hi)
        c = check(mid)
        if c.holds():
            hi, hi_cert = mid, c
        else:
            lo = mid
    return hi_cert


# --------------------------------------------------------------------------
# phase portrait


@dataclass(frozen=True)
class Curve:
    """One connected component of a level set, as a polyline."""

    level: float
    x1: FloatArray
    x2: FloatArray
    closed: bool
    label: str = field(default="")

    @property
    def points(self) -> FloatArray:
        return np.column_stack([self.x1, self.x2])


def default_window(params: TwoRingParams, levels: Sequence[float]) -> tuple[float, float, float]:
    """``(half_width, x2_min, x2_max)`` enclosing x* and every root of every level."""
    k = params.kappa
    span = 2.0 * math.sqrt(max(levels))
    if k != 0:
        span = max(span, 1.5 * abs(2.0 / k))
        for c in levels:
            span = max(span, 1.25 * max(abs(r) for r in level_roots(c, params).roots))
    return span, -span, span


def _branch(c_e, params, lo, hi, samples):
    phi = np.linspace(0.0, 0.5 * math.pi, samples)
    x2 = lo + (hi - lo) * np.sin(phi) ** 2
    f = np.sqrt(np.maximum(radicand(x2, c_e, params), 0.0))
    return x2, f


def phase_portrait(
    params: TwoRingParams,
    levels: Sequence[float],
    samples: int = 200,
    window: tuple[float, float, float] | None = None,
) -> list[Curve]:
    """Trace ``x1 = +/- f(x2)`` for each level, one polyline per connected component.

    Closed components are returned as closed loops (first point repeated).
    Unbounded components are clipped to ``|x1| <= half_width`` and
    ``x2_min <= x2 <= x2_max``; ``window`` defaults to :func:`default_window`.
    """
    if samples < 4:
        raise ValueError("samples must be >= 4")
    if window is None:
        window = default_window(params, levels)
    half, x2_min, x2_max = window
    curves: list[Curve] = []
    for c_e in levels:
        lv = level_roots(c_e, params)
        r = lv.roots
        if lv.periodic:
            lo, hi = closed_component(lv)
            x2, f = _branch(c_e, params, lo, hi, samples)
            f[0] = 0.0
            f[-1] = 0.0
            xs = np.concatenate([f, -f[-2::-1]])
            ys = np.concatenate([x2, x2[-2::-1]])
            curves.append(Curve(c_e, xs, ys, True, "closed"))
        if params.kappa == 0.0:
            continue
        # unbounded component [max root, +inf), or (-inf, min root] when kappa < 0
        start = max(r) if params.kappa > 0 else min(r)
        far = x2_max if params.kappa > 0 else x2_min
        if (far - start) * params.kappa <= 0:
            continue
        phi = np.linspace(0.0, 0.5 * math.pi, samples)
        x2 = start + (far - start) * np.sin(phi) ** 2
        with np.errstate(over="ignore"):
            g = radicand(x2, c_e, params)
        f = np.sqrt(np.maximum(g, 0.0))
        f[0] = 0.0
        keep = f <= half
        x2, f = x2[keep], f[keep]
        if x2.size < 2:
            continue
        xs = np.concatenate([-f[::-1], f[1:]])
        ys = np.concatenate([x2[::-1], x2[1:]])
        curves.append(Curve(c_e, xs, ys, False, "open"))
    return curves


def winding_number(curve: Curve, point) -> int:
    """Winding number of a closed polyline around ``point``."""
    px, py = float(point[0]), float(point[1])
    ang = np.arctan2(curve.x2 - py, curve.x1 - px)
    d = np.diff(ang)
    d = (d + math.pi) % (2.0 * math.pi) - math.pi
    return int(round(float(np.sum(d)) / (2.0 * math.pi)))
