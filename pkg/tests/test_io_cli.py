import json
import subprocess
import sys

import numpy as np
import pytest

from tfmeanfield import io
from tfmeanfield.cli import main
from tfmeanfield.errors import ConfigurationError
from tfmeanfield.phasespace import PhaseGrid, PhaseSpaceMeasure, SpatialGrid


def test_csv_format(tmp_path):
    path = io.write_csv(tmp_path / "a.csv", ["x", "ok", "n"], [[0.1, True, 3], [1e-20, False, -1]])
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.decode() == "x,ok,n\n0.1,true,3\n1e-20,false,-1\n"
    header, rows = io.read_csv(path)
    assert header == ["x", "ok", "n"] and float(rows[1][0]) == 1e-20


def test_json_sorted(tmp_path):
    path = io.write_json(tmp_path / "a.json", {"b": np.float64(1.5), "a": np.arange(2)})
    assert path.read_text() == '{\n  "a": [\n    0,\n    1\n  ],\n  "b": 1.5\n}\n'


def test_phase_binary_roundtrip(tmp_path):
    g = SpatialGrid(1, 4.0, 16)
    ph = PhaseGrid.for_hbar(g, 0.25)
    vals = np.random.default_rng(0).uniform(size=ph.shape)
    m = PhaseSpaceMeasure(ph, vals)
    path = io.write_phase_binary(tmp_path / "m.bin", m)
    out = io.read_phase_binary(path)
    assert out["n_x"] == 16 and out["n_p"] == 16 and out["d"] == 1
    assert np.array_equal(out["values"], vals)
    # hbar is recoverable for grids dual to the FFT
    assert out["h_p"] * out["n_x"] * out["h"] / (2 * np.pi) == pytest.approx(0.25)
    assert path.stat().st_size == 48 + 8 * vals.size


def test_phase_binary_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"x" * 64)
    with pytest.raises(ConfigurationError):
        io.read_phase_binary(bad)
    short = tmp_path / "short.bin"
    short.write_bytes(b"1")
    with pytest.raises(ConfigurationError):
        io.read_phase_binary(short)


def test_phase_csv(tmp_path):
    g = SpatialGrid(1, 4.0, 4)
    ph = PhaseGrid(g, 1.0, 2)
    path = io.write_phase_csv(tmp_path / "m.csv", PhaseSpaceMeasure(ph, np.ones(ph.shape)))
    header, rows = io.read_csv(path)
    assert header == ["x1", "p1", "value"] and len(rows) == 8


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


TF_CONFIG = {
    "experiment": "tf-solve",
    "grid": {"d": 1, "R": 12.0, "n": 512},
    "scaling": {"N": 1},
    "fields": {"V": {"name": "harmonic"}},
    "options": {"lambdas": [0.25, 0.5]},
}


def test_tf_solve_outputs(tmp_path, capsys):
    cfg = write(tmp_path, "tf.json", json.dumps(TF_CONFIG, indent=2))
    assert main(["tf-solve", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 0
    assert "PASS tf-solve" in capsys.readouterr().out
    sol = json.loads((tmp_path / "out" / "tf_solution.json").read_text())
    assert abs(sol["mu"] - 2) < 1e-2 and abs(sol["energy"] - 1) < 1e-2
    header, rows = io.read_csv(tmp_path / "out" / "tf_density.csv")
    assert header == ["x1", "rho"] and len(rows) == 512


@pytest.mark.parametrize(
    "text,line",
    [
        ("", 1),
        ("{}", 1),
        ('{\n  "grid": {"d": 1, "R": 2.0, "n": 8},\n  "scaling": {"N": "eight"}\n}', 3),
        ('{\n  "grid": {"d": 1, "R": 2.0, "n": 8},\n  "scaling": {"N": 2},\n  "fields": {"V": {"name": "coulomb"}}\n}', 4),
        ('{\n  "grid": {"d": 1, "R": 2.0, "n": 8},\n  "scaling": {}\n}', 3),
    ],
)
def test_config_errors_exit_two(tmp_path, capsys, text, line):
    cfg = write(tmp_path, "bad.json", text)
    assert main(["run", "--config", str(cfg)]) == 2
    err = capsys.readouterr().err
    assert err.startswith(f"{cfg}:{line}")
    assert "error" in err


def test_non_power_of_two_grid_exit_two(tmp_path, capsys):
    cfg = dict(TF_CONFIG, grid={"d": 1, "R": 2.0, "n": 100})
    path = write(tmp_path, "c.json", json.dumps(cfg))
    assert main(["run", "--config", str(path), "--out", str(tmp_path)]) == 2


def test_experiment_mismatch_exit_two(tmp_path):
    path = write(tmp_path, "c.json", json.dumps(TF_CONFIG))
    assert main(["weyl", "--config", str(path), "--out", str(tmp_path)]) == 2


def test_failed_check_exit_one(tmp_path, capsys):
    cfg = dict(TF_CONFIG, solver={"max_iter": 2})
    cfg["fields"] = {"V": {"name": "harmonic"}, "w": {"name": "gaussian_bump", "params": {"amp": 0.5, "sigma": 1.0}}}
    path = write(tmp_path, "c.json", json.dumps(cfg))
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == 1
    assert "FAIL tf-solve" in capsys.readouterr().err


def test_seed_bounds(tmp_path):
    path = write(tmp_path, "c.json", json.dumps(TF_CONFIG))
    assert main(["run", "--config", str(path), "--seed", "-1"]) == 2


LO_CONFIG = {
    "experiment": "lieb-oxford",
    "seed": 11,
    "grid": {"d": 1, "R": 10.0, "n": 128},
    "scaling": {"N": 1},
    "options": {"K": 5, "configurations": 20},
}


def test_seeded_runs_are_byte_identical(tmp_path):
    path = write(tmp_path, "lo.json", json.dumps(LO_CONFIG))
    for out in ("a", "b"):
        assert main(["run", "--config", str(path), "--out", str(tmp_path / out)]) == 0
    a = (tmp_path / "a" / "lieb_oxford.csv").read_bytes()
    assert a == (tmp_path / "b" / "lieb_oxford.csv").read_bytes()
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "c"), "--seed", "12"]) == 0
    assert a != (tmp_path / "c" / "lieb_oxford.csv").read_bytes()


def test_console_entry_point(tmp_path):
    path = write(tmp_path, "lo.json", json.dumps(LO_CONFIG))
    proc = subprocess.run(
        [sys.executable, "-m", "tfmeanfield.cli", "run", "--config", str(path), "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "PASS lieb-oxford" in proc.stdout
