from __future__ import annotations

import math
import textwrap
from pathlib import Path

import numpy as np
import pytest

from ringlab import leapfrog as lf
from ringlab.blobs import RingSpec
from ringlab.config import LevelsConfig, SimulationConfig, load_config
from ringlab.errors import ConfigError
from ringlab.experiments import run_convergence, run_leapfrog_demo
from ringlab.io import emit_csv, emit_svg, format_value, frames_table

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

BASE = """
[simulation]
alpha = 1.0
eps_list = 0.05, 0.03
n_side = 6
t_end = 0.01

[ring 1]
intensity = 1.0
center = 0.0, 0.3
"""


def write(tmp_path, text, name="cfg.ini"):
    p = tmp_path / name
    p.write_text(textwrap.dedent(text), encoding="utf-8")
    return p


def test_shipped_configs_parse():
    for name in ("example.ini", "convergence.ini"):
        sim = load_config(CONFIGS / name).simulation()
        assert len(sim.rings) == 2
    lfc = load_config(CONFIGS / "leapfrog.ini").leapfrog()
    assert lfc.alpha is None and lfc.rho == 0.25


def test_defaults(tmp_path):
    sim = load_config(write(tmp_path, BASE)).simulation()
    assert sim.dt is None and sim.dt_safety == 0.2 and sim.scheme == "rk4"
    assert sim.rings == (RingSpec(1.0, (0.0, 0.3)),)


@pytest.mark.parametrize(
    "edit",
    [
        ("eps_list = 0.05, 0.03", "eps_list = 0.03, 0.05"),
        ("eps_list = 0.05, 0.03", "eps_list = 0.05, 1.5"),
        ("t_end = 0.01", "t_end = -1"),
        ("n_side = 6", "n_side = 1"),
        ("n_side = 6", "n_side = six"),
        ("t_end = 0.01", "t_end = 0.01\nspeed = 3"),
        ("center = 0.0, 0.3", "center = 0.0, -5.0"),
        ("center = 0.0, 0.3", "center = 0.0"),
        ("intensity = 1.0", "intensity = 0"),
        ("alpha = 1.0\n", ""),
    ],
)
def test_invalid_simulation_configs(tmp_path, edit):
    text = BASE.replace(*edit)
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, text)).simulation()


def test_overlapping_rings_rejected(tmp_path):
    text = BASE + "\n[ring 2]\nintensity = 1.0\ncenter = 0.05, 0.3\n"
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, text)).simulation()


def test_unreadable_and_malformed(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini")
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "no section header\n"))
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, BASE)).leapfrog()


def test_leapfrog_and_levels_validation(tmp_path):
    good = "[leapfrog]\na1 = 2\na2 = 1\nalpha = 1\nc_e = 2.0\n"
    cfg = load_config(write(tmp_path, good))
    assert cfg.leapfrog().level(cfg.leapfrog().params()) == 2.0
    for bad in (
        "[leapfrog]\na1 = 2\na2 = 1\nalpha = 1\n",
        "[leapfrog]\na1 = 2\na2 = 1\nalpha = 1\nc_e = 1\nenergy = 0\n",
        "[leapfrog]\na1 = 1\na2 = -1\nalpha = 1\nc_e = 1\n",
        "[leapfrog]\na1 = 2\na2 = 1\nenergy = 0\n",
    ):
        with pytest.raises(ConfigError):
            load_config(write(tmp_path, bad)).leapfrog()
    with pytest.raises(ConfigError):
        LevelsConfig()
    with pytest.raises(ConfigError):
        LevelsConfig(levels=(1.0,), levels_cstar=(0.5,))
    with pytest.raises(ConfigError):
        LevelsConfig(levels_cstar=(0.5,)).resolve(lf.TwoRingParams(1.0, 1.0, 1.0))
    p = lf.TwoRingParams(2.0, 1.0, 1.0)
    assert LevelsConfig(levels_cstar=(0.5,)).resolve(p) == [0.5 * p.cstar]


# --------------------------------------------------------------------------
# writers


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(True) == "true"
    assert format_value(np.int64(3)) == "3"
    assert format_value(math.nan) == "nan"
    assert float(format_value(1 / 3)) == 1 / 3


def test_empty_frames_header_only(tmp_path):
    p = tmp_path / "d.csv"
    emit_csv(p, *frames_table([], n_rings=2))
    text = p.read_bytes().decode("utf-8")
    assert text.count("\n") == 1 and text.endswith("\n")
    assert text.startswith("time,center_1_x1,center_1_x2,center_2_x1")
    assert "energy_1_2" in text and "\r" not in text


def test_csv_rejects_ragged_rows(tmp_path):
    with pytest.raises(ValueError):
        emit_csv(tmp_path / "x.csv", ["a", "b"], [[1]])


def test_io_error_names_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        emit_csv(blocker / "sub" / "x.csv", ["a"], [[1]])


def test_svg_polylines_for_three_levels(tmp_path):
    p = lf.TwoRingParams(2.0, 1.0, 1.0)
    curves = lf.phase_portrait(p, [0.25 * p.cstar, 0.5 * p.cstar, 2.0 * p.cstar], 50)
    out = tmp_path / "p.svg"
    emit_svg(out, curves, markers=[("x*", p.xstar)])
    text = out.read_text(encoding="utf-8")
    n = text.count("<polyline")
    assert 4 <= n <= 6
    assert text.count("data-level=") == n
    assert text.startswith("<?xml") and text.rstrip().endswith("</svg>")
    assert 'viewBox="' in text


def test_writers_byte_identical(tmp_path):
    p = lf.TwoRingParams(2.0, 1.0, 1.0)
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        run_leapfrog_demo(p, 0.5 * p.cstar, 1, d, steps_per_period=200)
    for f in ("trajectory.csv", "overtakings.csv", "portrait.svg", "summary.csv"):
        assert (a / f).read_bytes() == (b / f).read_bytes()


# --------------------------------------------------------------------------
# experiment drivers


def _tiny(rings, eps_list):
    return SimulationConfig(
        rings=tuple(rings), eps_list=tuple(eps_list), alpha=1.0, n_side=4, t_end=0.01,
        dt_safety=2.0, diag_stride=2,
    )


def test_convergence_single_eps_and_single_ring(tmp_path):
    rep = run_convergence(_tiny([RingSpec(1.0, (0.0, 0.0))], [0.05]), tmp_path)
    assert len(rep.rows) == 1 and rep.monotone_flag
    assert math.isfinite(rep.rows[0].center_error)
    for f in ("convergence.csv", "convergence_flags.csv", "reduced.csv", "diagnostics_1.csv"):
        assert (tmp_path / f).is_file()


def test_convergence_rows_in_sweep_order():
    rep = run_convergence(_tiny([RingSpec(1.0, (0.0, 0.3)), RingSpec(1.0, (0.0, -0.3))], [0.05, 0.03]))
    assert [r.eps for r in rep.rows] == [0.05, 0.03]


def test_leapfrog_demo_summary():
    p = lf.TwoRingParams(2.0, 1.0, 1.0)
    c = 0.5 * p.cstar
    summary, traj, times = run_leapfrog_demo(p, c, 3)
    assert summary.crossings == len(times) >= 6
    assert summary.hamiltonian_drift <= 1e-6
    x0 = lf.relative_positions(traj)[0]
    assert lf.level_constant(x0, p) == pytest.approx(c, rel=1e-10)
