import csv
import io
import json
import subprocess
import sys

import pytest

from sbs_transduction.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_critpower(capsys):
    code, out, _ = run(capsys, "critpower", "--radius", "0.5e-6", "--format", "json")
    assert code == 0
    assert json.loads(out)["P_cr"] == pytest.approx(19.2194, rel=1e-4)


def test_resonance_design_and_stated(capsys):
    code, out, _ = run(capsys, "resonance", "--format", "json")
    assert code == 0 and json.loads(out)["f_r"] == pytest.approx(325.08e6, rel=2e-4)
    with pytest.warns(UserWarning, match="325.08 MHz"):
        code, out, _ = run(capsys, "resonance", "--inductance", "1e-3", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["f_r"] == pytest.approx(734.2e3, rel=1e-3)
    assert "325.08 MHz" in doc["warning"]


def test_materials(capsys):
    code, out, _ = run(capsys, "materials", "list", "--format", "csv")
    assert code == 0 and "lanthano-aluminosilicate" in out
    code, out, _ = run(capsys, "materials", "show", "LANTHANO-aluminosilicate", "--format", "json")
    assert code == 0 and "nu_B" in out
    assert run(capsys, "materials", "show", "unobtainium")[0] == 1


def test_mode_gain_noise_inductance(capsys, tmp_path):
    code, out, _ = run(capsys, "mode", "solve", "--format", "json", "--grid", "61")
    assert code == 0 and 1.0 < json.loads(out)["n_eff"] < 1.65
    assert run(capsys, "gain", "--format", "text")[0] == 0
    code, out, _ = run(capsys, "noise", "spectrum", "--points", "11", "--format", "csv")
    assert code == 0 and len(list(csv.reader(io.StringIO(out)))) == 12
    series = tmp_path / "lt.csv"
    code, out, _ = run(capsys, "inductance", "--phases", "8", "--series-csv", str(series))
    assert code == 0 and len(series.read_text().splitlines()) == 9


def test_simulate_and_out_file(capsys, tmp_path):
    dest = tmp_path / "rep.json"
    code, out, _ = run(capsys, "simulate", "@design", "--format", "json", "--out", str(dest))
    assert code == 0 and out == ""
    doc = json.loads(dest.read_text())
    assert doc["schema"] == "transduction-report/1"
    assert doc["f_r"] == pytest.approx(325.08e6, abs=0.05e6)


def test_sweep_jobs_identical(capsys):
    a = run(capsys, "sweep", "@sweep_area", "--format", "csv")
    b = run(capsys, "sweep", "@sweep_area", "--format", "csv", "--jobs", "2")
    assert a[0] == b[0] == 0
    assert a[1] == b[1]


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "critpower", "--radius=-1e-6")[0] == 1
    assert run(capsys, "resonance", "--capacitance", "0")[0] == 1
    assert run(capsys, "sweep", "@design")[0] == 1
    assert run(capsys, "mode", "solve", "--radius", "1e-10", "--grid", "41")[0] == 2
    assert run(capsys, "simulate", str(tmp_path / "missing.yaml"))[0] == 3
    assert run(capsys, "resonance", "--out", str(tmp_path / "no" / "such" / "dir.txt"))[0] == 3
    bad = tmp_path / "bad.yaml"
    bad.write_text("name: [\n")
    assert run(capsys, "simulate", str(bad))[0] == 3


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "sbs_transduction", "critpower", "--radius", "0.5e-6"],
                       capture_output=True, text=True, timeout=120)
    assert p.returncode == 0 and "19.219" in p.stdout
    p = subprocess.run([sys.executable, "-m", "sbs_transduction", "critpower", "--radius=-1"],
                       capture_output=True, text=True, timeout=120)
    assert p.returncode == 1 and "error" in p.stderr
