"""Config parsing, exit codes, report determinism and CSV output."""

import io
import json
import os
import contextlib

import numpy as np
import pytest

from algham.errors import ConfigError
from algham.cli import (parse_config, load_config, build_system, run_check,
                        run_integrate, write_trajectory, parse_at,
                        print_report, main)


def _cfg(tmp_path, name="cfg.json", **kv):
    path = tmp_path / name
    path.write_text(json.dumps(kv), encoding="utf-8")
    return str(path)


def test_parse_config_defaults_and_overrides():
    cfg = parse_config({"model": "classical-free"})
    assert cfg.model_name == "classical-free"
    assert cfg.dt == pytest.approx(1e-3)
    assert cfg.seed == 42 and cfg.probes >= 1
    cfg = parse_config({"model": "poisson-so3", "seed": 7, "probes": 3,
                        "dt": 0.01, "t_end": 2.0,
                        "inertia": [1.0, 2.0, 4.0]})
    assert cfg.seed == 7 and cfg.probes == 3
    assert cfg.parameters["inertia"] == [1.0, 2.0, 4.0]


def test_parse_config_rejections():
    for bad in (
        {"model": "classical-free", "bogus": 1},
        {"model": "classical-free", "dt": 0.0},
        {"model": "classical-free", "t_end": -1.0},
        {"model": "classical-free", "probes": 0},
        {"model": "classical-free", "seed": "abc"},
        {"model": 3},
        {},
        [],
    ):
        with pytest.raises(ConfigError):
            parse_config(bad)


def test_env_seed_overrides(monkeypatch):
    monkeypatch.setenv("ALGH_SEED", "99")
    cfg = parse_config({"model": "classical-free", "seed": 1})
    assert cfg.seed == 99
    monkeypatch.setenv("ALGH_SEED", "zzz")
    with pytest.raises(ConfigError):
        parse_config({"model": "classical-free"})


def test_dimension_validation(tmp_path):
    cfg = parse_config({"model": "classical-free", "x0": [1.0, 2.0, 3.0]})
    with pytest.raises(ConfigError):
        build_system(cfg)


def test_exit_codes(tmp_path, capsys):
    good = _cfg(tmp_path, "good.json", model="classical-free", probes=3,
                output=str(tmp_path / "t.csv"))
    assert main(["check", "--config", good]) == 0
    capsys.readouterr()

    bad_key = _cfg(tmp_path, "bad.json", model="classical-free", nope=1)
    assert main(["check", "--config", bad_key]) == 2

    notjson = tmp_path / "mal.json"
    notjson.write_text("{{{", encoding="utf-8")
    assert main(["check", "--config", str(notjson)]) == 2
    assert main(["check", "--config", str(tmp_path / "missing.json")]) == 2

    corrupted = _cfg(tmp_path, "corr.json", model="poisson-so3", probes=3,
                     corrupt_structure=0.05)
    assert main(["check", "--config", corrupted]) == 1
    capsys.readouterr()


def test_integrate_csv_format_and_determinism(tmp_path, capsys):
    out = tmp_path / "traj.csv"
    cfg = _cfg(tmp_path, model="classical-free", x0=[0.0, 0.0],
               p0=[1.0, 2.0], t_end=0.05, output=str(out))
    assert main(["integrate", "--config", cfg]) == 0
    first = out.read_bytes()
    assert main(["integrate", "--config", cfg]) == 0
    assert out.read_bytes() == first
    capsys.readouterr()

    text = first.decode()
    lines = text.split("\n")
    assert lines[0] == "t,x1,x2,p1,p2,E_H"
    assert "\r" not in text
    assert len(lines) == 53  # header + 51 rows + trailing newline
    last = [float(v) for v in lines[-2].split(",")]
    assert last[0] == pytest.approx(0.05)
    assert last[1] == pytest.approx(0.05, abs=1e-12)
    assert last[2] == pytest.approx(0.10, abs=1e-12)
    assert last[5] == pytest.approx(2.5, abs=1e-14)


def test_blowup_exit_code_with_partial_output(tmp_path, capsys):
    out = tmp_path / "blow.csv"
    cfg = _cfg(tmp_path, model="classical-metric", x0=[3.0, 0.0],
               p0=[10000.0, 0.0], t_end=1.0, output=str(out))
    assert main(["integrate", "--config", cfg]) == 4
    capsys.readouterr()
    assert out.exists()
    assert len(out.read_text().splitlines()) >= 1


def test_io_error_exit_code(tmp_path, capsys):
    cfg = _cfg(tmp_path, model="classical-free", t_end=0.01,
               output=str(tmp_path / "no" / "dir" / "t.csv"))
    assert main(["integrate", "--config", cfg]) == 3
    capsys.readouterr()


def test_check_report_is_deterministic(tmp_path):
    cfg = load_config(_cfg(tmp_path, model="deformed-translate", probes=4))
    bufs = []
    for _ in range(2):
        rep = run_check(cfg)
        buf = io.StringIO()
        print_report(rep, out=buf)
        bufs.append(buf.getvalue())
    assert bufs[0] == bufs[1]
    assert "overall: PASS" in bufs[0]


def test_force_changes_split_not_trajectory(tmp_path, capsys):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    base = dict(model="deformed-translate", x0=[0.1, -0.2], p0=[0.8, 0.4],
                t_end=0.2)
    cfg_a = _cfg(tmp_path, "a.json", output=str(out_a), **base)
    cfg_b = _cfg(tmp_path, "b.json", output=str(out_b),
                 force="linear-drag", force_strength=0.4, **base)
    assert main(["integrate", "--config", cfg_a]) == 0
    assert main(["integrate", "--config", cfg_b]) == 0
    capsys.readouterr()
    assert out_a.read_bytes() == out_b.read_bytes()


def test_parse_at_and_point_commands(tmp_path, capsys):
    cfg = _cfg(tmp_path, model="poisson-so3")
    pt = parse_at("0.1,0.2,0.3:1,0.5,0.25", 3, 3)
    assert pt.x == (0.1, 0.2, 0.3)
    with pytest.raises(ConfigError):
        parse_at("1,2:3,4", 3, 3)
    with pytest.raises(ConfigError):
        parse_at("1,2,3", 3, 3)

    assert main(["semispray", "--config", cfg,
                 "--at", "0,0,0:1,0.5,0.25"]) == 0
    captured = capsys.readouterr().out
    assert "G:" in captured and "Gamma[0]:" in captured and "E:" in captured

    assert main(["curvature", "--config", cfg,
                 "--at", "0,0,0:1,0.5,0.25"]) == 0
    captured = capsys.readouterr().out
    assert "R[0][0][1]" in captured


def test_models_command(capsys):
    assert main(["models"]) == 0
    out = capsys.readouterr().out
    for name in ("classical-free", "classical-metric", "poisson-so3",
                 "deformed-translate"):
        assert name in out
