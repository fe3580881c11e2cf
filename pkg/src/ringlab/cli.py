"""Command line entry point: ``ringlab <subcommand> --config FILE --out DIR``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from collections.abc import Sequence
from pathlib import Path

from .blobs import init_particles
from .config import ExperimentFile, load_config
from .errors import ConfigError, RingLabError
from .experiments import (
    period_rows,
    particles_table,
    reduced_initial_state,
    run_blobs,
    run_convergence,
    run_leapfrog_demo,
    trajectory_table,
    write_portrait,
)
from .io import emit_csv, emit_records, frames_table
from .leapfrog import alpha_threshold
from .reduced import integrate_reduced

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

log = logging.getLogger("ringlab")


def _simulate(cfg: ExperimentFile, out: Path) -> None:
    sim = cfg.simulation()
    eps = sim.eps_list[0]
    run = run_blobs(sim, eps)
    emit_csv(out / "diagnostics.csv", *frames_table(run.frames))
    emit_csv(out / "particles.csv", *particles_table(run.system))
    start = init_particles(sim.rings, eps, sim.alpha, sim.n_side, delta_exponent=sim.delta_exponent)
    emit_csv(out / "particles_initial.csv", *particles_table(start))


def _reduced(cfg: ExperimentFile, out: Path) -> None:
    sim = cfg.simulation()
    traj = integrate_reduced(reduced_initial_state(sim), cfg.reduced_horizon(), sim.reduced_dt, sim.reduced_scheme)
    emit_csv(out / "trajectory.csv", *trajectory_table(traj))
    log.info("min separation %.6g", traj.min_separation)


def _portrait(cfg: ExperimentFile, out: Path) -> None:
    lf = cfg.leapfrog()
    params = lf.params()
    curves = write_portrait(params, cfg.levels("portrait"), out)
    log.info("%d curves", len(curves))


def _period(cfg: ExperimentFile, out: Path) -> None:
    lf = cfg.leapfrog()
    params = lf.params()
    levels = cfg.levels("period").resolve(params)
    emit_records(out / "periods.csv", period_rows(params, levels))


def _converge(cfg: ExperimentFile, out: Path) -> None:
    report = run_convergence(cfg.simulation(), out)
    for r in report.rows:
        log.info("eps=%g  center error=%.6g  max J=%.6g", r.eps, r.center_error, r.max_inertia)
    log.info("monotone: %s", report.monotone_flag)


def _leapfrog(cfg: ExperimentFile, out: Path) -> None:
    lf = cfg.leapfrog()
    if lf.alpha is None:
        assert lf.rho is not None and lf.energy is not None
        cert = alpha_threshold(lf.rho, lf.energy, lf.k, lf.a1, lf.a2)
        log.info("alpha threshold %.12g (min |x| %.6g)", cert.alpha, cert.min_separation)
        emit_records(out / "threshold.csv", [dict(cert.__dict__)])
        params = lf.params(cert.alpha)
    else:
        params = lf.params()
    summary, _, _ = run_leapfrog_demo(params, lf.level(params), lf.k, out, lf.steps_per_period)
    log.info("%d overtakings, H drift %.3g", summary.crossings, summary.hamiltonian_drift)


COMMANDS = {
    "simulate": (_simulate, "blob simulation at the first eps of the config"),
    "reduced": (_reduced, "integrate the limiting point-vortex system with drift"),
    "phase-portrait": (_portrait, "two-ring level sets as SVG and CSV"),
    "period": (_period, "roots and periods for a list of two-ring levels"),
    "converge": (_converge, "eps sweep: blob centres against the limiting system"),
    "leapfrog": (_leapfrog, "two-ring leapfrogging demonstration"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ringlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", required=True, type=Path, help="experiment configuration (INI)")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: ./out)")
        p.add_argument("--quiet", action="store_true", help="suppress progress messages")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(message)s",
        stream=sys.stderr,
        force=True,
    )
    func, _ = COMMANDS[args.command]
    try:
        cfg = load_config(args.config)
        args.out.mkdir(parents=True, exist_ok=True)
        func(cfg, args.out)
    except ConfigError as exc:
        print(f"ringlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RingLabError, ArithmeticError) as exc:
        print(f"ringlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"ringlab: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
