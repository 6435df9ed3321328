import json

import pytest

from parity_distill.cli import main


@pytest.fixture(autouse=True)
def fixed_epoch(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")


def run_json(capsys, *argv):
    assert main([*argv, "--format", "json"]) == 0
    return json.loads(capsys.readouterr().out)


def test_run_two_iterations_table(capsys):
    assert main(["run", "--iterations", "2"]) == 0
    out = capsys.readouterr().out
    assert "0.4375" in out
    assert "# seed: 0" in out and "# timestamp:" in out


def test_run_json_matches_table(capsys):
    data = run_json(capsys, "run", "--iterations", "3")
    cumulative = [r["cumulative_success"] for r in data["result"]["per_iteration"]]
    assert cumulative[-1] == pytest.approx(0.578125, abs=1e-12)
    assert main(["run", "--iterations", "3"]) == 0
    table = capsys.readouterr().out
    for value in cumulative:
        assert f"{value:.15g}" in table
    m = data["manifest"]
    assert m["seed"] == 0 and m["config"]["max_iterations"] == 3 and "version" in m
    assert m["timestamp"].startswith("2023-11-14")


def test_run_amplitude_damping(capsys):
    data = run_json(capsys, "run", "--variant", "amplitude-damping")
    assert data["result"]["per_iteration"][0]["cumulative_success"] == pytest.approx(0.5, abs=1e-12)


def test_monte_carlo_is_byte_identical(capsys, tmp_path):
    outs = []
    path = tmp_path / "mc.json"
    for _ in range(2):
        argv = ["run", "--mode", "monte-carlo", "--trajectories", "300", "--seed", "7",
                "--iterations", "2", "--format", "json", "--output", str(path)]
        assert main(argv) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_faulty_run_reports_note(capsys):
    assert main(["run", "--iterations", "2", "--eps", "0.1", "--eps-prime", "0.1"]) == 0
    assert "note: model-defined" in capsys.readouterr().out


def test_sweep_csv(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--resolution", "3", "--output", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "eps,eps_prime,p_lr,concurrence"
    rows = {(float(a), float(b)): (float(p), c) for a, b, p, c in (l.split(",") for l in lines[1:])}
    assert len(rows) == 9
    assert float(rows[(0.0, 0.0)][1]) == pytest.approx(1.0)
    assert float(rows[(1.0, 0.5)][1]) == pytest.approx(0.0, abs=1e-12)
    assert float(rows[(0.0, 1.0)][1]) == pytest.approx(0.25)
    assert rows[(1.0, 0.0)] == (0.0, "nan")
    sidecar = json.loads((tmp_path / "sweep.csv.manifest.json").read_text())
    assert sidecar["config"]["resolution"] == 3


def test_sweep_stdout_manifest_on_stderr(capsys):
    assert main(["sweep", "--resolution", "2"]) == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("eps,eps_prime,p_lr,concurrence\n")
    assert captured.err.startswith("# manifest:")


def test_sweep_json(capsys):
    data = run_json(capsys, "sweep", "--resolution", "2")
    assert len(data["result"]["rows"]) == 4


def test_unwritable_output(tmp_path):
    assert main(["run", "--output", str(tmp_path / "missing" / "x.json")]) == 1


def test_path_single_step(capsys):
    assert main(["path", "1-LR", "1+LR"]) == 0
    out = capsys.readouterr().out
    assert "1-LR -> 1+LR: 1 step(s)" in out


def test_path_cross_set(capsys):
    assert main(["path", "1-LR", "U-NO"]) == 0
    out = capsys.readouterr().out
    assert "NotFound" in out and "rank 4 != 2" in out
    data = run_json(capsys, "path", "1-LR", "U-NO", "--allow-detector")
    result = data["result"]
    assert result["found"] and result["probability"] == pytest.approx(0.5)


@pytest.mark.parametrize("argv", [
    ["path", "1-LR", "bogus"],
    ["run", "--eps", "1.5"],
    ["run", "--iterations", "0"],
    ["run", "--variant", "dephasing"],
    ["run", "--format", "csv"],
    ["sweep", "--resolution", "1"],
    ["frobnicate"],
])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_basis(capsys):
    assert main(["basis"]) == 0
    out = capsys.readouterr().out
    assert "2000" in out and "0002" in out and "U-NO" in out
    data = run_json(capsys, "basis")
    assert len(data["result"]["fock_basis"]) == 10
    sets = {c["name"]: c["set"] for c in data["result"]["canonical_states"]}
    assert sets["1-LR"] == "S1" and sets["D+NO"] == "S2"


def test_verify(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 10
