import csv
import io
import json
import subprocess
import sys

import pytest

from latticerel.cli import main
from latticerel.report import Report, load_report


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_assess_sys5(capsys):
    code, out, _ = run_cli(capsys, "assess", "--system", "sys5.json", "--k-max", "5")
    assert code == 0
    rep = json.loads(out)
    assert rep["method"] == "csilp" and rep["evaluation_count"] == 12
    assert [r["state"] for r in rep["critical_records"]] == [[1], [2, 3], [3, 4], [2, 4, 5]]
    assert rep["failure_lattice_count"] == 4 and len(rep["normal_cells"]) == 4
    assert rep["schema_version"] == 1 and rep["wall_time"] is None


def test_oracle_sys5(capsys):
    code, out, _ = run_cli(capsys, "oracle", "--system", "sys5")
    assert code == 0
    assert json.loads(out)["extra"]["minimal_cut_sets"] == [[1], [2, 3], [3, 4], [2, 4, 5]]


def test_enumerate_and_csv_trace(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "enumerate", "--system", "sys5", "--out", str(tmp_path),
                           "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO((tmp_path / "trace.csv").read_text())))
    assert list(rows[0]) == ["evals", "lower", "upper", "gap", "elapsed_ms"]
    evals = [int(r["evals"]) for r in rows]
    assert evals == sorted(set(evals)) and evals[-1] == 32
    lowers = [float(r["lower"]) for r in rows]
    uppers = [float(r["upper"]) for r in rows]
    assert all(a <= b + 1e-15 for a, b in zip(lowers, lowers[1:]))
    assert all(a >= b - 1e-15 for a, b in zip(uppers, uppers[1:]))
    assert "LOLP" in out and "%" in out


def test_assess_csv_outputs(capsys, tmp_path):
    code, _, _ = run_cli(capsys, "assess", "--system", "sys5", "--out", str(tmp_path),
                         "--format", "csv", "--timing")
    assert code == 0
    table = list(csv.DictReader(io.StringIO((tmp_path / "critical_states.csv").read_text())))
    assert [r["state"] for r in table] == ["1", "2 3", "3 4", "2 4 5"]
    trace = list(csv.DictReader(io.StringIO((tmp_path / "trace.csv").read_text())))
    assert all(r["elapsed_ms"] != "" for r in trace)


def test_mcs_replay_identical(capsys, tmp_path):
    outs = []
    for d in ("a", "b"):
        code, _, _ = run_cli(capsys, "mcs", "--system", "sys5", "--seed", "7", "--cov", "0.01",
                             "--out", str(tmp_path / d))
        assert code == 0
        outs.append((tmp_path / d / "report.json").read_bytes())
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert rep["extra"]["seed"] == 7 and rep["extra"]["rng"] == "numpy.random.PCG64"


def test_report_round_trip(capsys, tmp_path):
    run_cli(capsys, "assess", "--system", "sys5", "--out", str(tmp_path))
    path = tmp_path / "report.json"
    rep = load_report(path)
    assert Report.from_json(rep.to_json()) == rep
    assert rep.to_json() == path.read_text()
    code, out, _ = run_cli(capsys, "report", str(path))
    assert code == 0 and "{2,4,5}" in out and "11.7910000000%" in out


def test_input_errors(capsys, tmp_path):
    assert run_cli(capsys, "assess", "--system", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1, "evaluator": "cutsets"}')
    code, _, err = run_cli(capsys, "assess", "--system", str(bad))
    assert code == 2 and "components" in err
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["assess", "--system", "sys5", "--bogus"])
    assert exc.value.code == 2


def test_base_state_failure_exit(capsys, tmp_path):
    f = tmp_path / "short.json"
    f.write_text(json.dumps({
        "schema_version": 1, "evaluator": "threshold", "demand": 50,
        "components": [{"id": "1", "capacity": 10, "failure_prob": 0.1}],
    }))
    assert run_cli(capsys, "assess", "--system", str(f))[0] == 3


def test_evaluator_error_exit(capsys, tmp_path, monkeypatch):
    import latticerel.dcopf.shed as shed_mod
    from latticerel.dcopf.lp import LpError

    real = shed_mod.solve_lp
    calls = {"n": 0}

    def flaky(lp):
        calls["n"] += 1
        if calls["n"] > 3:
            raise LpError("synthetic breakdown")
        return real(lp)

    monkeypatch.setattr(shed_mod, "solve_lp", flaky)
    code, _, err = run_cli(capsys, "assess", "--system", "test3", "--out", str(tmp_path))
    assert code == 4 and "breakdown" in err
    rep = load_report(tmp_path / "report.json")
    assert rep.stop_reason == "evaluator_error" and rep.error


def test_oracle_refusal_is_input_error(capsys):
    assert run_cli(capsys, "oracle", "--system", "rts79")[0] == 2


def test_console_script_usage():
    proc = subprocess.run([sys.executable, "-m", "latticerel.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "assess" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "latticerel.cli"], capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr
