"""Experiment drivers behind the command line: sweeps, demos and table builders."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .blobs import DiagnosticsFrame, ParticleSystem, auto_dt, init_particles, simulate
from .config import LevelsConfig, SimulationConfig
from .errors import CollisionError, SimulationBlowup
from .io import emit_csv, emit_records, emit_svg, frames_table
from .leapfrog import (
    Curve,
    OrbitLevel,
    TwoRingParams,
    detect_overtakings,
    hamiltonian,
    level_roots,
    orbit_state,
    period,
    phase_portrait,
    planar_period,
    relative_positions,
    turning_point,
)
from .reduced import ReducedState, Trajectory, integrate_reduced

log = logging.getLogger(__name__)


# --------------------------------------------------------------------------
# blob runs


@dataclass(frozen=True)
class BlobRun:
    eps: float
    system: ParticleSystem
    frames: list[DiagnosticsFrame]
    dt: float


def reduced_initial_state(cfg: SimulationConfig) -> ReducedState:
    return ReducedState(
        [r.center for r in cfg.rings], [r.intensity for r in cfg.rings], cfg.alpha
    )


def run_blobs(cfg: SimulationConfig, eps: float) -> BlobRun:
    """One blob simulation at ``eps``; blow-ups are re-raised tagged with ``eps``."""
    ps = init_particles(cfg.rings, eps, cfg.alpha, cfg.n_side, delta_exponent=cfg.delta_exponent)
    dt = cfg.dt if cfg.dt is not None else auto_dt(ps, cfg.dt_safety)
    log.info("eps=%g: %d particles, delta=%.4g, dt=%.4g", eps, ps.n_particles, ps.delta, dt)
    try:
        final, frames = simulate(
            ps, cfg.t_end, dt, scheme=cfg.scheme, tail_radius=cfg.tail_radius, diag_stride=cfg.diag_stride
        )
    except SimulationBlowup as exc:
        raise SimulationBlowup(f"eps={eps!r}: particle left the half-plane", exc.particle, exc.time) from exc
    n_steps = max(1, math.ceil(cfg.t_end / dt - 1e-9))
    return BlobRun(eps, final, frames, cfg.t_end / n_steps)


def particles_table(ps: ParticleSystem) -> tuple[list[str], list[list]]:
    header = ["index", "ring", "x1", "x2", "weight"]
    rows = [
        [p, int(ps.ring_tag[p]) + 1, ps.positions[p, 0], ps.positions[p, 1], ps.weights[p]]
        for p in range(ps.n_particles)
    ]
    return header, rows


def trajectory_table(traj: Trajectory) -> tuple[list[str], list[list]]:
    n = traj.centers.shape[1]
    header = ["time"] + [f"center_{i + 1}_{c}" for i in range(n) for c in ("x1", "x2")]
    rows = [[t, *traj.centers[k].ravel()] for k, t in enumerate(traj.times)]
    return header, rows


# --------------------------------------------------------------------------
# convergence sweep


@dataclass(frozen=True)
class ConvergenceRow:
    eps: float
    n_particles: int
    delta: float
    dt: float
    center_error: float
    max_inertia: float
    max_tail_mass: float
    density_bound: float


@dataclass(frozen=True)
class ConvergenceReport:
    """Rows in sweep order (decreasing ``eps``)."""

    rows: tuple[ConvergenceRow, ...]
    monotone_flag: bool
    inertia_monotone: bool

    @property
    def center_errors(self) -> list[float]:
        return [r.center_error for r in self.rows]

    @property
    def max_inertias(self) -> list[float]:
        return [r.max_inertia for r in self.rows]


def _strictly_decreasing(vals: list[float]) -> bool:
    return all(b < a for a, b in zip(vals, vals[1:]))


def center_error(frames: list[DiagnosticsFrame], traj: Trajectory) -> float:
    """``max_t max_i |B_i(t) - zeta_i(t)|`` over the recorded frames."""
    err = 0.0
    for f in frames:
        d = f.centers - traj.at(f.time)
        err = max(err, float(np.max(np.hypot(d[:, 0], d[:, 1]))))
    return err


def run_convergence(cfg: SimulationConfig, out_dir: str | Path | None = None) -> ConvergenceReport:
    """Blob runs for every ``eps`` against one reduced trajectory.

    With ``out_dir`` the per-eps diagnostics, the reduced trajectory and the
    summary table are written there.
    """
    try:
        traj = integrate_reduced(reduced_initial_state(cfg), cfg.t_end, cfg.reduced_dt, cfg.reduced_scheme)
    except CollisionError as exc:
        raise CollisionError("reduced system collided before t_end", exc.time) from exc
    rows = []
    runs = []
    for eps in cfg.eps_list:
        run = run_blobs(cfg, eps)
        runs.append(run)
        rows.append(
            ConvergenceRow(
                eps=eps,
                n_particles=run.system.n_particles,
                delta=run.system.delta,
                dt=run.dt,
                center_error=center_error(run.frames, traj),
                max_inertia=max(float(np.max(f.inertia)) for f in run.frames),
                max_tail_mass=max(float(np.max(f.tail_mass)) for f in run.frames),
                density_bound=run.system.density_bound(),
            )
        )
        log.info("eps=%g: center error %.6g", eps, rows[-1].center_error)
    report = ConvergenceReport(
        rows=tuple(rows),
        monotone_flag=_strictly_decreasing([r.center_error for r in rows]),
        inertia_monotone=_strictly_decreasing([r.max_inertia for r in rows]),
    )
    if out_dir is not None:
        out = Path(out_dir)
        emit_records(out / "convergence.csv", [r.__dict__ for r in rows])
        emit_records(
            out / "convergence_flags.csv",
            [{"monotone_flag": report.monotone_flag, "inertia_monotone": report.inertia_monotone}],
        )
        emit_csv(out / "reduced.csv", *trajectory_table(traj))
        for k, run in enumerate(runs):
            emit_csv(out / f"diagnostics_{k + 1}.csv", *frames_table(run.frames))
    return report


# --------------------------------------------------------------------------
# two-ring tables and demo


def period_rows(params: TwoRingParams, levels: list[float]) -> list[dict[str, object]]:
    rows = []
    for c in levels:
        lv = level_roots(c, params)
        r = list(lv.roots) + [math.nan] * (3 - len(lv.roots))
        tp = period(c, params) if lv.periodic else math.nan
        tplan = planar_period(c, params)
        rows.append(
            {
                "c_e": c,
                "energy": lv.energy,
                "periodic": lv.periodic,
                "n_roots": len(lv.roots),
                "eta1": r[0],
                "eta2": r[1],
                "eta3": r[2],
                "period": tp,
                "planar_period": tplan,
                "period_ratio": tp / tplan,
            }
        )
    return rows


def portrait_table(curves: list[Curve]) -> tuple[list[str], list[list]]:
    header = ["curve", "level", "closed", "x1", "x2"]
    rows = []
    for i, c in enumerate(curves):
        for x1, x2 in zip(c.x1, c.x2):
            rows.append([i, c.level, c.closed, x1, x2])
    return header, rows


def write_portrait(params: TwoRingParams, levels: LevelsConfig, out_dir: str | Path) -> list[Curve]:
    curves = phase_portrait(params, levels.resolve(params), levels.samples)
    out = Path(out_dir)
    markers = [("x*", params.xstar)] if math.isfinite(params.cstar) else []
    emit_svg(out / "portrait.svg", curves, markers=markers)
    emit_csv(out / "portrait.csv", *portrait_table(curves))
    return curves


@dataclass(frozen=True)
class LeapfrogSummary:
    a1: float
    a2: float
    alpha: float
    c_e: float
    energy: float
    period: float
    planar_period: float
    k: int
    t_end: float
    dt: float
    crossings: int
    hamiltonian_drift: float
    min_separation: float

    def as_record(self) -> dict[str, object]:
        return dict(self.__dict__)


def hamiltonian_drift(traj: Trajectory, params: TwoRingParams) -> float:
    """``max_t |H(t) - H(0)| / |H(0)|``; on the level ``H = 0`` the scale ``|a1 + a2| / (4 pi)`` is used."""
    x = relative_positions(traj)
    hv = np.array([hamiltonian(p, params) for p in x])
    scale = abs(hv[0]) if hv[0] != 0 else abs(params.total) / (4.0 * math.pi)
    return float(np.max(np.abs(hv - hv[0])) / scale)


def run_leapfrog_demo(
    params: TwoRingParams,
    c_e: float,
    k: int,
    out_dir: str | Path | None = None,
    steps_per_period: int = 2000,
) -> tuple[LeapfrogSummary, Trajectory, list[float]]:
    """Integrate from the turning point ``(0, eta2)`` over ``[0, k T_E + T_E/2]``.

    Writes ``trajectory.csv``, ``overtakings.csv``, ``portrait.svg`` and
    ``summary.csv`` when ``out_dir`` is given.
    """
    lv: OrbitLevel = level_roots(c_e, params)
    tp = period(c_e, params)
    t_end = k * tp + 0.5 * tp
    dt = tp / steps_per_period
    traj = integrate_reduced(orbit_state(turning_point(lv), params), t_end, dt)
    times = detect_overtakings(traj, params)
    summary = LeapfrogSummary(
        a1=params.a1,
        a2=params.a2,
        alpha=params.alpha,
        c_e=c_e,
        energy=lv.energy,
        period=tp,
        planar_period=planar_period(c_e, params),
        k=k,
        t_end=t_end,
        dt=float(traj.times[1] - traj.times[0]),
        crossings=len(times),
        hamiltonian_drift=hamiltonian_drift(traj, params),
        min_separation=traj.min_separation,
    )
    if out_dir is not None:
        out = Path(out_dir)
        header, rows = trajectory_table(traj)
        x = relative_positions(traj)
        header = header + ["x1", "x2", "hamiltonian"]
        rows = [row + [x[i, 0], x[i, 1], hamiltonian(x[i], params)] for i, row in enumerate(rows)]
        emit_csv(out / "trajectory.csv", header, rows)
        emit_csv(out / "overtakings.csv", ["index", "time"], [[i + 1, t] for i, t in enumerate(times)])
        curves = phase_portrait(params, [c_e], 400)
        markers = [("x*", params.xstar)] if math.isfinite(params.cstar) else []
        emit_svg(out / "portrait.svg", curves, overlays=[("trajectory", x)], markers=markers)
        emit_csv(out / "summary.csv", ["key", "value"], list(summary.as_record().items()))
    return summary, traj, times
