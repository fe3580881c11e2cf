"""Limiting point-vortex system with axial drift for N ring centres.

    d zeta_i / dt = sum_{j != i} a_j K(zeta_i - zeta_j) + a_i / (4 pi alpha) e_1
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from .errors import CollisionError, ConfigError

FloatArray = NDArray[np.float64]
ReducedScheme = Literal["rk4", "midpoint"]

DEFAULT_FLOOR = 1e-8
_MIDPOINT_TOL = 1e-15
_MIDPOINT_MAXIT = 100


@dataclass(frozen=True)
class ReducedState:
    """Ring centres ``zeta_i`` (N, 2), intensities ``a_i`` and ``alpha``."""

    centers: FloatArray
    intensities: FloatArray
    alpha: float

    def __post_init__(self) -> None:
        c = np.array(self.centers, dtype=np.float64).reshape(-1, 2)
        a = np.array(self.intensities, dtype=np.float64).reshape(-1)
        if c.shape[0] != a.size:
            raise ConfigError("centers and intensities differ in length")
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha!r}")
        c.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "intensities", a)
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def n(self) -> int:
        return int(self.intensities.size)

    def with_centers(self, centers: np.ndarray) -> ReducedState:
        return ReducedState(centers, self.intensities, self.alpha)


def _rhs(z: np.ndarray, a: np.ndarray, alpha: float) -> np.ndarray:
    d = z[:, None, :] - z[None, :, :]
    r2 = d[..., 0] ** 2 + d[..., 1] ** 2
    np.fill_diagonal(r2, np.inf)
    if np.any(r2 == 0.0):
        i, j = np.argwhere(r2 == 0.0)[0]
        raise CollisionError(f"centres {i} and {j} coincide", math.nan)
    coef = a[None, :] / (2.0 * math.pi * r2)
    out = np.empty_like(z)
    out[:, 0] = -np.sum(coef * d[..., 1], axis=1) + a / (4.0 * math.pi * alpha)
    out[:, 1] = np.sum(coef * d[..., 0], axis=1)
    return out


def reduced_rhs(state: ReducedState) -> FloatArray:
    """Right-hand side of the limiting system, shape (N, 2)."""
    return _rhs(state.centers, state.intensities, state.alpha)


def min_separation(z: np.ndarray) -> float:
    if z.shape[0] < 2:
        return math.inf
    d = z[:, None, :] - z[None, :, :]
    r = np.hypot(d[..., 0], d[..., 1])
    return float(np.min(r[np.triu_indices(z.shape[0], 1)]))


@dataclass(frozen=True)
class Trajectory:
    """Fixed-step solution: ``centers[k]`` is the state at ``times[k]``."""

    times: FloatArray
    centers: FloatArray
    intensities: FloatArray
    alpha: float
    min_separation: float

    @property
    def states(self) -> list[ReducedState]:
        return [ReducedState(c, self.intensities, self.alpha) for c in self.centers]

    def __len__(self) -> int:
        return int(self.times.size)

    def velocities(self) -> FloatArray:
        return np.stack([_rhs(c, self.intensities, self.alpha) for c in self.centers])

    def at(self, t: float) -> FloatArray:
        """Centres at time ``t`` by cubic Hermite interpolation between steps."""
        times = self.times
        if not times[0] <= t <= times[-1]:
            raise ValueError(f"t = {t!r} outside [{times[0]!r}, {times[-1]!r}]")
        k = int(np.searchsorted(times, t, side="right")) - 1
        k = min(max(k, 0), times.size - 2)
        t0, t1 = times[k], times[k + 1]
        h = t1 - t0
        u = (t - t0) / h
        z0, z1 = self.centers[k], self.centers[k + 1]
        v0 = _rhs(z0, self.intensities, self.alpha)
        v1 = _rhs(z1, self.intensities, self.alpha)
        h00 = 2 * u**3 - 3 * u**2 + 1
        h10 = u**3 - 2 * u**2 + u
        h01 = -2 * u**3 + 3 * u**2
        h11 = u**3 - u**2
        return h00 * z0 + h10 * h * v0 + h01 * z1 + h11 * h * v1


def _rk4(z, a, alpha, h):
    k1 = _rhs(z, a, alpha)
    k2 = _rhs(z + 0.5 * h * k1, a, alpha)
    k3 = _rhs(z + 0.5 * h * k2, a, alpha)
    k4 = _rhs(z + h * k3, a, alpha)
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _implicit_midpoint(z, a, alpha, h):
    # fixed-point iteration, started from the explicit Euler predictor
    f0 = _rhs(z, a, alpha)
    zn = z + h * f0
    for _ in range(_MIDPOINT_MAXIT):
        znew = z + h * _rhs(0.5 * (z + zn), a, alpha)
        if np.max(np.abs(znew - zn)) <= _MIDPOINT_TOL * (1.0 + np.max(np.abs(znew))):
            return znew
        zn = znew
    return zn


def integrate_reduced(
    state0: ReducedState,
    T: float,
    dt: float,
    scheme: ReducedScheme = "rk4",
    *,
    floor: float = DEFAULT_FLOOR,
) -> Trajectory:
    """Fixed-step integration on ``[0, T]``.

    The step is ``T / ceil(T / dt)`` so that the last sample lands on ``T``.

    Raises
    ------
    CollisionError
        When the minimum pairwise separation drops below ``floor``; the error
        carries the time of the offending sample.
    """
    if not T > 0:
        raise ValueError(f"T must be positive, got {T!r}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if scheme == "rk4":
        advance = _rk4
    elif scheme == "midpoint":
        advance = _implicit_midpoint
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    n_steps = max(1, math.ceil(T / dt - 1e-9))
    h = T / n_steps
    a = state0.intensities
    alpha = state0.alpha
    z = np.array(state0.centers)
    sep = min_separation(z)
    if sep < floor:
        raise CollisionError(f"initial separation {sep:.3g} below floor", 0.0)
    out = np.empty((n_steps + 1,) + z.shape)
    out[0] = z
    for k in range(1, n_steps + 1):
        z = advance(z, a, alpha, h)
        s = min_separation(z)
        if not s >= floor:
            raise CollisionError(f"centres collided (separation {s:.3g})", k * h)
        sep = min(sep, s)
        out[k] = z
    times = h * np.arange(n_steps + 1)
    times[-1] = T
    return Trajectory(times=times, centers=out, intensities=np.array(a), alpha=alpha, min_separation=sep)
