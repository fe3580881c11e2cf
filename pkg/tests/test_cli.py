from __future__ import annotations

import csv
import subprocess
import sys
from pathlib import Path

import pytest

from ringlab.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
EXAMPLE = CONFIGS / "example.ini"


def rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_period_subcommand(tmp_path):
    assert main(["period", "--config", str(EXAMPLE), "--out", str(tmp_path), "--quiet"]) == EXIT_OK
    table = rows(tmp_path / "periods.csv")
    assert len(table) == 6
    assert [r["periodic"] for r in table] == ["true"] * 5 + ["false"]
    assert table[-1]["period"] == "nan"


def test_phase_portrait_subcommand(tmp_path):
    assert main(["phase-portrait", "--config", str(EXAMPLE), "--out", str(tmp_path), "--quiet"]) == EXIT_OK
    svg = (tmp_path / "portrait.svg").read_text(encoding="utf-8")
    assert 4 <= svg.count("<polyline") <= 6
    assert (tmp_path / "portrait.csv").is_file()


def test_reduced_subcommand(tmp_path):
    assert main(["reduced", "--config", str(EXAMPLE), "--out", str(tmp_path), "--quiet"]) == EXIT_OK
    table = rows(tmp_path / "trajectory.csv")
    assert float(table[-1]["time"]) == 2.0


def test_missing_config_is_config_error(tmp_path, capsys):
    assert main(["period", "--config", str(tmp_path / "nope.ini"), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err


def test_invalid_value_is_config_error(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text(EXAMPLE.read_text(encoding="utf-8").replace("n_side = 10", "n_side = 1"), encoding="utf-8")
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path / "o"), "--quiet"]) == EXIT_CONFIG


def test_missing_section_is_config_error(tmp_path):
    cfg = tmp_path / "only_sim.ini"
    cfg.write_text("[portrait]\nlevels = 1.0\n", encoding="utf-8")
    assert main(["leapfrog", "--config", str(cfg), "--out", str(tmp_path), "--quiet"]) == EXIT_CONFIG


def test_non_periodic_level_is_numerical_failure(tmp_path, capsys):
    cfg = tmp_path / "lf.ini"
    cfg.write_text("[leapfrog]\na1 = 2\na2 = 1\nalpha = 1\nc_e = 100\n", encoding="utf-8")
    assert main(["leapfrog", "--config", str(cfg), "--out", str(tmp_path), "--quiet"]) == EXIT_NUMERICAL
    assert "numerical failure" in capsys.readouterr().err


def test_blowup_is_numerical_failure(tmp_path):
    cfg = tmp_path / "blow.ini"
    cfg.write_text(
        "[simulation]\nalpha = 1\neps = 0.05\nn_side = 2\ndt = 1.0\nt_end = 1.0\n"
        "[ring 1]\nintensity = 50\ncenter = 0.0, -2.8\npatch_radius = 0.1\n"
        "[ring 2]\nintensity = -50\ncenter = 0.3, -2.8\npatch_radius = 0.1\n",
        encoding="utf-8",
    )
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o"), "--quiet"]) == EXIT_NUMERICAL


def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["period"])
    assert info.value.code == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "ringlab.cli", "period", "--config", str(EXAMPLE), "--out", str(tmp_path)],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == ""
    assert (tmp_path / "periods.csv").is_file()
