"""
End-to-end runs of the amspec command line
"""

import csv
import json

import pytest

from src import main
from src.factory.model_manager import ModelManager
from src.strategy.spectrum_strategy import SPECTRUM_COLUMNS
from src.strategy.sweep_strategy import SWEEP_COLUMNS
from src.tools.curves import CurvesTools


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def construct(capsys, output, phi=""):
    code, out, _ = run(capsys, "construct", "--alpha", "golden", "--phi", phi, "--modes", "128", "--grid", "1024",
                       "-o", output)
    assert code == 0
    return out


def read_table(path):
    """Header dict and the CSV rows, comment lines set apart"""
    lines = path.read_text(encoding="utf-8").splitlines()
    header = json.loads(lines[0][2:])
    body = [line for line in lines[1:] if not line.startswith("#")]
    comments = [line for line in lines[1:] if line.startswith("#")]
    return header, list(csv.reader(body)), comments


# --------------------------------------------------------------------- construct

def test_construct_golden(workdir, capsys):
    out = construct(capsys, "golden.json", "c1=0.3")
    assert "invariance" in out
    assert "strip_h0" in out
    assert "golden.json" in out
    data = json.loads((workdir / "golden.json").read_text(encoding="utf-8"))
    assert data["meta"]["modes"] == 128
    assert data["alpha"]["tag"] == "golden"


def test_construct_zero_harmonic_is_free(workdir, capsys):
    construct(capsys, "free.json", "c1=0")
    model = ModelManager().load_model(str(workdir / "free.json"))
    assert model.f.sup_norm() < 1e-15
    assert model.gamma.mean == pytest.approx(model.alpha)


def test_construct_default_output(workdir, capsys):
    code, _, _ = run(capsys, "construct", "--alpha", "sqrt2m1", "--modes", "32", "--grid", "256")
    assert code == 0
    assert (workdir / "model.json").is_file()


@pytest.mark.parametrize("argv", [
    ["construct", "--alpha", "0.5"],
    ["construct", "--alpha", "golden", "--phi", "x1=3"],
    ["construct", "--alpha", "golden", "--modes", "64", "--grid", "128"],
])
def test_construct_rejects_bad_arguments(workdir, capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert "Failed to construct model" in err
    assert not (workdir / "model.json").exists()


# ------------------------------------------------------------------------ verify

def test_verify_free_model(workdir, capsys):
    construct(capsys, "free.json")
    code, out, _ = run(capsys, "verify", "--model", "free.json", "--size", "200")
    assert code == 0
    assert "FAIL" not in out
    assert out.count("PASS") == 9
    assert out.startswith("# ")


def test_verify_golden_model(workdir, capsys):
    construct(capsys, "golden.json", "c1=0.3")
    code, out, _ = run(capsys, "verify", "--model", "golden.json", "--size", "500")
    assert code == 0
    assert "FAIL" not in out


def test_verify_flags_broken_invariance(workdir, capsys):
    construct(capsys, "golden.json", "c1=0.3")
    model = ModelManager().load_model(str(workdir / "golden.json"))
    ModelManager.save_model(CurvesTools.perturb_gamma(model, 0.01), str(workdir / "broken.json"))
    code, out, _ = run(capsys, "verify", "--model", "broken.json", "--size", "200", "-o", "table.txt")
    assert code == 1
    assert out == ""
    rows = [line for line in (workdir / "table.txt").read_text(encoding="utf-8").splitlines()
            if line.startswith("invariance")]
    assert rows and rows[0].rstrip().endswith("FAIL")


def test_verify_missing_model(workdir, capsys):
    code, _, err = run(capsys, "verify", "--model", "nowhere.json")
    assert code == 2
    assert "Failed to verify model" in err


# ---------------------------------------------------------------------- minimize

def test_minimize_standard_map(workdir, capsys):
    code, _, _ = run(capsys, "minimize", "--standard", "0.5", "--p", "1", "--q", "3", "-o", "orbit.csv")
    assert code == 0
    header, rows, comments = read_table(workdir / "orbit.csv")
    assert header["run"]["command"] == "minimize"
    assert rows[0] == ["n", "x", "r", "residual"]
    assert len(rows) == 4
    assert sum(float(row[2]) for row in rows[1:]) == pytest.approx(1.0)
    assert all(abs(float(row[3])) < 1e-9 for row in rows[1:])
    summary = json.loads(comments[-1][len("# summary "):])
    assert summary["converged"] is True
    assert summary["top_eigenvalue"] <= 1e-10


def test_minimize_rejects_non_coprime(workdir, capsys):
    code, _, err = run(capsys, "minimize", "--standard", "0.5", "--p", "2", "--q", "4")
    assert code == 2
    assert "Failed to minimize action" in err


# ----------------------------------------------------------------------- cocycle

def test_cocycle_free_band_center(workdir, capsys):
    construct(capsys, "free.json")
    code, out, _ = run(capsys, "cocycle", "--model", "free.json", "--energy", "-2", "--iters", "2000")
    assert code == 0
    document = json.loads(out)
    result = document["result"]
    assert result["rotation"] == pytest.approx(0.25, abs=1e-9)
    assert result["uh"] is False
    assert abs(result["lyapunov"]) < 1e-2
    assert document["header"]["model_sha256"] == ModelManager.file_hash(str(workdir / "free.json"))


# ------------------------------------------------------------------ sweep/spectrum

SWEEP_ARGS = ["--model", "free.json", "--emin", "-4.5", "--emax", "0.5", "--points", "5", "--iters", "2000",
              "--size", "200", "--epsilon", "0.1"]


def test_sweep_marks_gaps_hyperbolic(workdir, capsys):
    construct(capsys, "free.json")
    code, _, _ = run(capsys, "sweep", *SWEEP_ARGS, "-o", "sweep.csv")
    assert code == 0
    header, rows, _ = read_table(workdir / "sweep.csv")
    assert rows[0] == SWEEP_COLUMNS
    uh = [row[SWEEP_COLUMNS.index("uh")] for row in rows[1:]]
    assert uh == ["true", "false", "false", "false", "true"]
    assert "parallelism" not in header["run"]


def test_sweep_output_does_not_depend_on_workers(workdir, capsys):
    construct(capsys, "free.json")
    assert run(capsys, "sweep", *SWEEP_ARGS, "-j", "1", "-o", "serial.csv")[0] == 0
    assert run(capsys, "sweep", *SWEEP_ARGS, "-j", "2", "-o", "pooled.csv")[0] == 0
    assert (workdir / "serial.csv").read_bytes() == (workdir / "pooled.csv").read_bytes()


def test_spectrum_table(workdir, capsys):
    construct(capsys, "free.json")
    code, _, _ = run(capsys, "spectrum", "--model", "free.json", "--grid", "3", "--iters", "2000", "--size", "200",
                     "-o", "spectrum.csv")
    assert code == 0
    header, rows, _ = read_table(workdir / "spectrum.csv")
    assert header["model_sha256"] == ModelManager.file_hash(str(workdir / "free.json"))
    assert rows[0] == SPECTRUM_COLUMNS
    energies = [float(row[0]) for row in rows[1:]]
    assert energies == [-4.0, -2.0, 0.0]
    counting = [float(row[1]) for row in rows[1:]]
    assert counting == sorted(counting)
