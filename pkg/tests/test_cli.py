import json
import math
import os

import pytest

from gpt_lab import __version__
from gpt_lab.cli import RunConfig, main


def run(tmp_path, name, *argv):
    out = tmp_path / name
    assert main([*argv, "--out", str(out)]) == 0
    return out.read_bytes()


def test_gamma_table_output(tmp_path):
    data = run(tmp_path, "g.csv", "gamma-table", "--n", "12", "--jobs", "1")
    lines = data.decode().splitlines()
    assert lines[0] == f"# gpt-lab v{__version__} gamma-table"
    assert lines[1] == "n,i,theta,gamma_numeric,gamma_closed_form,entropic_bound"
    assert len(lines) == 2 + 5  # i = 1..5 for the 12-gon
    n, i, theta, num, clo, ent = lines[2].split(",")
    assert (n, i) == ("12", "1")
    assert float(theta) == pytest.approx(math.pi / 6)
    assert float(num) == pytest.approx(float(clo), abs=1e-9)
    assert "." in theta  # '.' decimal separator regardless of locale


def test_mixing_sweep_output(tmp_path):
    data = run(tmp_path, "m.csv", "mixing-sweep", "--jobs", "2")
    lines = data.decode().splitlines()
    assert lines[1] == "n,entropy_form_1,entropy_form_2,difference,verdict"
    rows = [ln.split(",") for ln in lines[2:]]
    assert rows[0][0] == "3" and rows[0][-1] == "consistent"
    assert rows[-1][0] == "inf" and rows[-1][-1] == "consistent"
    square = next(r for r in rows if r[0] == "4")
    assert square[-1] == "inconsistent"
    assert float(square[3]) == pytest.approx(math.log(2.0), abs=1e-9)


def test_mur_properties_json(tmp_path):
    data = run(tmp_path, "mur.json", "mur-properties", "--seed", "1",
               "--config", _cfg(tmp_path, {"trials": 5}))
    header, body = data.decode().split("\n", 1)
    assert header.startswith("# gpt-lab v")
    doc = json.loads(body)
    assert doc["seed"] == 1
    names = [r["theory"] for r in doc["results"]]
    assert names == sorted(names)
    for r in doc["results"]:
        assert r["violations"] == []


def _cfg(tmp_path, payload):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(payload))
    return str(p)


def test_config_file_with_flag_override(tmp_path):
    cfg = _cfg(tmp_path, {"n": 8, "seed": 7})
    a = run(tmp_path, "a.csv", "gamma-table", "--config", cfg)
    b = run(tmp_path, "b.csv", "gamma-table", "--n", "8")
    assert a == b  # seed does not affect the table; n taken from config
    c = run(tmp_path, "c.csv", "gamma-table", "--config", cfg, "--n", "6")
    assert c != a  # flag wins over the config file


def test_byte_reproducibility_across_jobs(tmp_path):
    base = run(tmp_path, "r1.json", "mur-properties", "--seed", "3", "--jobs", "1",
               "--config", _cfg(tmp_path, {"trials": 4}))
    again = run(tmp_path, "r2.json", "mur-properties", "--seed", "3", "--jobs", "4",
                "--config", _cfg(tmp_path, {"trials": 4}))
    assert base == again


def test_incompat_scan_small(tmp_path):
    cfg = _cfg(tmp_path, {"t_steps": 2, "grid": 96})
    data = run(tmp_path, "s.json", "incompat-scan", "--config", cfg,
               "--t-min", "0.715", "--t-max", "1.0", "--jobs", "2")
    header, body = data.decode().split("\n", 1)
    doc = json.loads(body)
    assert [r["chi_incomp"] for r in doc["rows"]] == [3, 2]
    assert all(r["chi_comp"] == 3 for r in doc["rows"])
    assert 1 / math.sqrt(2) < doc["t0"]["estimate"] < 1.0


def test_log_env_rejected(tmp_path, monkeypatch):
    monkeypatch.setenv("GPT_LAB_LOG", "chatty")
    with pytest.raises(SystemExit):
        main(["gamma-table", "--n", "5"])


def test_bad_t_range_rejected():
    with pytest.raises(ValueError):
        RunConfig(command="incompat-scan", t_min=0.5)
