"""Lagrangian blob discretisation of concentrated vortex rings.

Each ring is a cloud of particles with constant circulation weights; the
particles advect with the regularised axisymmetric kernel (see
:mod:`ringlab.fastkernels`).  Weights never change, so per-ring intensity is
conserved bitwise.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from . import fastkernels as fk
from .errors import ConfigError, DomainError, SimulationBlowup, SingularityError

FloatArray = NDArray[np.float64]
Scheme = Literal["euler", "rk4"]

DEFAULT_DELTA_EXPONENT = 0.9


@dataclass(frozen=True)
class RingSpec:
    """One ring: signed intensity ``a_i``, centre, and patch radius (None -> eps)."""

    intensity: float
    center: tuple[float, float]
    patch_radius: float | None = None

    def __post_init__(self) -> None:
        if self.intensity == 0 or not math.isfinite(self.intensity):
            raise ConfigError(f"ring intensity must be finite and non-zero, got {self.intensity!r}")
        c = tuple(float(v) for v in self.center)
        if len(c) != 2:
            raise ConfigError("ring center must be a 2-vector")
        object.__setattr__(self, "center", c)
        if self.patch_radius is not None and not self.patch_radius > 0:
            raise ConfigError(f"patch_radius must be positive, got {self.patch_radius!r}")

    def radius(self, eps: float) -> float:
        return eps if self.patch_radius is None else float(self.patch_radius)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ParticleSystem:
    """Immutable snapshot of all blobs.

    ``ring_tag[p]`` is the ring index of particle ``p``; ``intensities`` holds
    the ``a_i`` the weights were normalised to.  ``spacing`` is the initial
    grid spacing ``h`` (used for the automatic time step).
    """

    positions: FloatArray
    weights: FloatArray
    ring_tag: NDArray[np.int64]
    intensities: FloatArray
    eps: float
    alpha: float
    delta: float
    spacing: float
    time: float = 0.0
    step_count: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "positions", _frozen(np.asarray(self.positions, dtype=np.float64)))
        object.__setattr__(self, "weights", _frozen(np.asarray(self.weights, dtype=np.float64)))
        object.__setattr__(self, "ring_tag", _frozen(np.asarray(self.ring_tag, dtype=np.int64)))
        object.__setattr__(self, "intensities", _frozen(np.asarray(self.intensities, dtype=np.float64)))

    @property
    def r_eps(self) -> float:
        return self.alpha * abs(math.log(self.eps))

    @property
    def n_rings(self) -> int:
        return int(self.intensities.size)

    @property
    def n_particles(self) -> int:
        return int(self.weights.size)

    def ring_slice(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.ring_tag == i)

    def circulations(self) -> FloatArray:
        """Per-ring sum of weights, accumulated in particle order."""
        out = np.zeros(self.n_rings)
        for i in range(self.n_rings):
            out[i] = math.fsum(self.weights[self.ring_tag == i])
        return out

    def density_bound(self) -> float:
        """Realised ``M`` with ``|omega| <= M / eps^2`` for the top-hat initial cells."""
        cell = self.spacing**2
        return float(np.max(np.abs(self.weights)) / cell * self.eps**2)

    def with_positions(self, positions: np.ndarray, time: float, step_count: int) -> ParticleSystem:
        return replace(self, positions=positions, time=time, step_count=step_count)


@dataclass(frozen=True)
class DiagnosticsFrame:
    """Per-time record of ring centres, concentration and energy."""

    time: float
    centers: FloatArray
    inertia: FloatArray
    tail_mass: FloatArray
    self_energies: FloatArray
    cross_energies: FloatArray
    total_energy: float
    total_circulation: FloatArray
    tail_radius: float = field(default=math.nan)

    def as_row(self) -> dict[str, float]:
        row: dict[str, float] = {"time": self.time}
        n = self.centers.shape[0]
        for i in range(n):
            row[f"center_{i + 1}_x1"] = self.centers[i, 0]
            row[f"center_{i + 1}_x2"] = self.centers[i, 1]
        for i in range(n):
            row[f"inertia_{i + 1}"] = self.inertia[i]
        for i in range(n):
            row[f"tail_mass_{i + 1}"] = self.tail_mass[i]
        for i in range(n):
            row[f"energy_{i + 1}"] = self.self_energies[i]
        for (i, j), v in zip(ring_pairs(n), self.cross_energies):
            row[f"energy_{i + 1}_{j + 1}"] = v
        row["total_energy"] = self.total_energy
        for i in range(n):
            row[f"circulation_{i + 1}"] = self.total_circulation[i]
        return row


def ring_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


# --------------------------------------------------------------------------
# initial data


def init_particles(
    rings: Sequence[RingSpec],
    eps: float,
    alpha: float,
    n_side: int,
    *,
    delta: float | None = None,
    delta_exponent: float = DEFAULT_DELTA_EXPONENT,
) -> ParticleSystem:
    """Top-hat patches sampled on a cell-centred ``n_side x n_side`` grid.

    Nodes of the bounding square of each patch that fall inside the open disk
    are kept; each gets weight ``a_i / kept_i``.  The blob core defaults to
    ``h ** delta_exponent`` with ``h`` the grid spacing.
    """
    if not 0 < eps < 1:
        raise ConfigError(f"eps must lie in (0, 1), got {eps!r}")
    if not alpha > 0:
        raise ConfigError(f"alpha must be positive, got {alpha!r}")
    if n_side < 2:
        raise ConfigError(f"n_side must be >= 2, got {n_side!r}")
    if not rings:
        raise ConfigError("at least one ring is required")
    r_eps = alpha * abs(math.log(eps))
    validate_rings(rings, eps, r_eps)

    pos, wts, tags = [], [], []
    spacing = math.inf
    for i, ring in enumerate(rings):
        rad = ring.radius(eps)
        h = 2.0 * rad / n_side
        spacing = min(spacing, h)
        offs = -rad + h * (np.arange(n_side) + 0.5)
        gx, gy = np.meshgrid(offs, offs, indexing="ij")
        inside = gx**2 + gy**2 < rad**2
        pts = np.column_stack([gx[inside], gy[inside]]) + np.asarray(ring.center)
        if pts.shape[0] == 0:
            raise ConfigError(f"ring {i + 1}: no grid node falls inside the patch")
        pos.append(pts)
        wts.append(np.full(pts.shape[0], ring.intensity / pts.shape[0]))
        tags.append(np.full(pts.shape[0], i, dtype=np.int64))
    if delta is None:
        delta = spacing**delta_exponent
    if delta < 0:
        raise ConfigError(f"delta must be non-negative, got {delta!r}")
    return ParticleSystem(
        positions=np.vstack(pos),
        weights=np.concatenate(wts),
        ring_tag=np.concatenate(tags),
        intensities=np.array([r.intensity for r in rings], dtype=float),
        eps=float(eps),
        alpha=float(alpha),
        delta=float(delta),
        spacing=float(spacing),
    )


def validate_rings(rings: Sequence[RingSpec], eps: float, r_eps: float) -> None:
    """Reject overlapping patches and patches touching the symmetry axis."""
    for i, ring in enumerate(rings):
        rad = ring.radius(eps)
        if not r_eps + ring.center[1] - rad > 0:
            raise ConfigError(
                f"ring {i + 1}: patch reaches r <= 0 (r_eps + x2 - radius = {r_eps + ring.center[1] - rad:.6g})"
            )
    for i in range(len(rings)):
        for j in range(i + 1, len(rings)):
            gap = math.dist(rings[i].center, rings[j].center)
            if gap < rings[i].radius(eps) + rings[j].radius(eps):
                raise ConfigError(f"rings {i + 1} and {j + 1} have overlapping patches")


# --------------------------------------------------------------------------
# velocity


def velocity_field(ps: ParticleSystem, x, exclude: int | None = None) -> np.ndarray:
    """``sum_p w_p H_delta(x, x_p)`` at one point (2,) or many points (M, 2)."""
    pts = np.asarray(x, dtype=np.float64)
    single = pts.ndim == 1
    pts = np.ascontiguousarray(np.atleast_2d(pts))
    if pts.shape[1] != 2:
        raise ValueError("points must have shape (2,) or (M, 2)")
    bad_r = np.flatnonzero(ps.r_eps + pts[:, 1] <= 0)
    if bad_r.size:
        raise DomainError(f"point {int(bad_r[0])} lies outside the half-plane r > 0")
    ex = -1 if exclude is None else int(exclude)
    out, bad = fk.velocity_at(
        pts, ps.positions, ps.weights, ps.r_eps, ps.delta**2, ex, fk.correction_table()
    )
    if bad >= 0:
        raise SingularityError(f"point {bad} coincides with a particle and delta = 0")
    return out[0] if single else out


def particle_velocities(
    ps: ParticleSystem, positions: np.ndarray | None = None, time: float | None = None
) -> np.ndarray:
    """Velocity of every particle (self term included when delta > 0).

    ``time`` only labels a half-plane violation; it defaults to ``ps.time``.
    """
    pos = ps.positions if positions is None else np.ascontiguousarray(positions)
    out, bad = fk.self_velocity(pos, ps.weights, ps.r_eps, ps.delta**2, fk.correction_table())
    if bad >= 0:
        if ps.r_eps + pos[bad, 1] <= 0:
            raise SimulationBlowup("particle left the half-plane r > 0", bad, ps.time if time is None else time)
        raise SingularityError(f"particle {bad} coincides with another particle and delta = 0")
    return out


def _check_delta(ps: ParticleSystem) -> None:
    if ps.delta > 0:
        return
    counts = np.bincount(ps.ring_tag, minlength=ps.n_rings)
    if np.any(counts > 1):
        raise ConfigError("delta > 0 is required when a ring carries more than one particle")


def step(ps: ParticleSystem, dt: float, scheme: Scheme = "rk4") -> ParticleSystem:
    """Advance positions by one explicit step; weights are untouched."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    _check_delta(ps)
    x0 = ps.positions
    t0, th = ps.time, ps.time + 0.5 * dt
    if scheme == "euler":
        x1 = x0 + dt * particle_velocities(ps, x0, t0)
    elif scheme == "rk4":
        k1 = particle_velocities(ps, x0, t0)
        k2 = particle_velocities(ps, x0 + 0.5 * dt * k1, th)
        k3 = particle_velocities(ps, x0 + 0.5 * dt * k2, th)
        k4 = particle_velocities(ps, x0 + dt * k3, t0 + dt)
        x1 = x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    t1 = ps.time + dt
    out = np.flatnonzero(ps.r_eps + x1[:, 1] <= 0)
    if out.size:
        raise SimulationBlowup("particle left the half-plane r > 0", int(out[0]), t1)
    return ps.with_positions(x1, t1, ps.step_count + 1)


def auto_dt(ps: ParticleSystem, safety: float = 0.2) -> float:
    """``safety * h / U_max`` from the current particle field."""
    u = particle_velocities(ps)
    umax = float(np.max(np.hypot(u[:, 0], u[:, 1])))
    if umax == 0.0:
        return safety * ps.spacing
    return safety * ps.spacing / umax


# --------------------------------------------------------------------------
# diagnostics


def diagnostics(ps: ParticleSystem, tail_radius: float) -> DiagnosticsFrame:
    """Centres of vorticity, moments of inertia, tail masses and energies."""
    if not tail_radius > 0:
        raise ValueError(f"tail_radius must be positive, got {tail_radius!r}")
    n = ps.n_rings
    centers = np.zeros((n, 2))
    inertia = np.zeros(n)
    tail = np.zeros(n)
    for i in range(n):
        idx = ps.ring_slice(i)
        w = ps.weights[idx]
        x = ps.positions[idx]
        a = ps.intensities[i]
        sgn = math.copysign(1.0, a)
        b = (w / a) @ x
        centers[i] = b
        r2 = np.sum((x - b) ** 2, axis=1)
        inertia[i] = sgn * float(w @ r2)
        tail[i] = sgn * float(np.sum(w[r2 > tail_radius**2]))
    blocks = fk.energy_blocks(
        ps.positions, ps.weights, ps.ring_tag, n, ps.r_eps, ps.delta**2, fk.correction_table()
    )
    self_e = np.diag(blocks).copy()
    cross = np.array([blocks[i, j] for i, j in ring_pairs(n)])
    total = float(np.sum(self_e) + 2.0 * np.sum(cross))
    return DiagnosticsFrame(
        time=ps.time,
        centers=centers,
        inertia=inertia,
        tail_mass=tail,
        self_energies=self_e,
        cross_energies=cross,
        total_energy=total,
        total_circulation=ps.circulations(),
        tail_radius=tail_radius,
    )


def simulate(
    ps: ParticleSystem,
    t_end: float,
    dt: float,
    *,
    scheme: Scheme = "rk4",
    tail_radius: float = 0.1,
    diag_stride: int = 1,
    callback: Callable[[ParticleSystem], None] | None = None,
) -> tuple[ParticleSystem, list[DiagnosticsFrame]]:
    """Integrate to ``t_end`` with a uniform step not exceeding ``dt``.

    A frame is recorded at t = 0, every ``diag_stride`` steps, and at the end.
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if diag_stride < 1:
        raise ValueError("diag_stride must be >= 1")
    n_steps = max(1, math.ceil(t_end / dt - 1e-9))
    h = t_end / n_steps
    t0 = ps.time
    frames = [diagnostics(ps, tail_radius)]
    for k in range(1, n_steps + 1):
        ps = step(ps, h, scheme)
        # time from the step index, not by accumulation
        ps = replace(ps, time=t0 + k * h)
        if callback is not None:
            callback(ps)
        if k % diag_stride == 0 or k == n_steps:
            frames.append(diagnostics(ps, tail_radius))
    return ps, frames
