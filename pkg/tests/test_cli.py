"""Command-line interface: artifacts, schemas, exit codes, determinism."""

import json

import pytest

from cochainflow.cli import main


def run_cli(*args):
    return main(list(args))


def test_mesh_build_and_info(tmp_path, capsys):
    mesh = tmp_path / "t4.txt"
    assert run_cli("mesh", "--torus", "4", "--out", str(mesh), "--info") == 0
    info = json.loads(capsys.readouterr().out)
    assert info["counts"] == [16, 48, 32]
    assert info["closed"] is True
    assert mesh.read_text().startswith("cochainmesh 1")


def test_mesh_subdivide(tmp_path):
    src = tmp_path / "t4.txt"
    dst = tmp_path / "t8.txt"
    run_cli("mesh", "--torus", "4", "--out", str(src))
    assert run_cli("mesh", "--in", str(src), "--subdivide", "1",
                   "--out", str(dst)) == 0
    from cochainflow import load_complex
    assert load_complex(dst).counts() == (64, 192, 128)


def test_hodge_report(tmp_path):
    report = tmp_path / "hodge.json"
    assert run_cli("hodge", "--torus", "8", "--metric", "whitney",
                   "--report", str(report)) == 0
    data = json.loads(report.read_text())
    assert data["schema_version"] == 1
    assert data["harmonic_dimension"] == 2
    assert data["metric"] == "whitney"
    for res in data["orthogonality_residuals"]:
        assert res["closed"] <= 1e-9 and res["coclosed"] <= 1e-9


def test_simulate_diagnostics_and_states(tmp_path):
    diag = tmp_path / "diag.csv"
    states = tmp_path / "states.json"
    assert run_cli("simulate", "--torus", "8", "--nu", "0.01",
                   "--dt", "0.002", "--t-final", "0.02",
                   "--init", "taylor-green", "--stride", "5",
                   "--out", str(diag), "--state-out", str(states)) == 0
    lines = diag.read_text().strip().splitlines()
    assert lines[0] == "t,energy,vorticity_sq,steady_residual,coclosed_residual"
    assert len(lines) == 4  # header + t=0 + two strides
    data = json.loads(states.read_text())
    assert data["schema_version"] == 1
    assert len(data["states"]) == 3


def test_simulate_random_and_harmonic_inits(tmp_path):
    out = tmp_path / "d.csv"
    assert run_cli("simulate", "--torus", "4", "--init", "random:7",
                   "--dt", "0.01", "--t-final", "0.02", "--out", str(out)) == 0
    assert run_cli("simulate", "--torus", "4", "--init", "harmonic:0",
                   "--dt", "0.01", "--t-final", "0.02", "--out", str(out)) == 0


def test_converge_commands(tmp_path):
    csv = tmp_path / "wr.csv"
    summary = tmp_path / "wr.json"
    assert run_cli("converge-wr", "--form", "taylor-green",
                   "--resolutions", "4,8,16", "--out", str(csv),
                   "--summary", str(summary)) == 0
    rows = csv.read_text().strip().splitlines()
    assert rows[0] == "resolution,eta,error"
    assert len(rows) == 4
    data = json.loads(summary.read_text())
    assert data["slope"] >= 0.9
    assert data["invocation"][0] == "cochain-flow"

    cup_csv = tmp_path / "cup.csv"
    assert run_cli("converge-cup", "--form1", "dx", "--form2", "dy",
                   "--resolutions", "4,8,16", "--out", str(cup_csv)) == 0

    weak_csv = tmp_path / "weak.csv"
    assert run_cli("converge-weak", "--form", "taylor-green", "--nu", "0.01",
                   "--tests", "cos(2pi x) sin(2pi y) dx;dx",
                   "--resolutions", "4,8,16", "--out", str(weak_csv)) == 0
    head = weak_csv.read_text().splitlines()[0]
    assert head == ("resolution,test_form_id,discrete_pairing,"
                    "reference_pairing,gap")


def test_steady_command(tmp_path):
    out = tmp_path / "steady.csv"
    assert run_cli("steady", "--form", "dx", "--nu", "0.0",
                   "--resolutions", "4,8,16", "--out", str(out)) == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "resolution,steady_residual,euler_defect"


def test_validation_errors_exit_1(tmp_path):
    assert run_cli("mesh", "--in", str(tmp_path / "missing.txt"),
                   "--info") == 1
    assert run_cli("converge-wr", "--form", "nonsense!!",
                   "--resolutions", "4,8,16",
                   "--out", str(tmp_path / "x.csv")) == 1
    assert run_cli("simulate", "--torus", "4", "--init", "harmonic:9",
                   "--out", str(tmp_path / "x.csv")) == 1


def test_reruns_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["simulate", "--torus", "8", "--nu", "0.01", "--dt", "0.002",
            "--t-final", "0.01", "--init", "taylor-green"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
