import csv
import json

import pytest

from lmoments import __version__
from lmoments.cli import MOMENT_COLUMNS, main


def run(tmp_path, name, *argv):
    out = tmp_path / name
    status = main([*argv, "--out", str(out)])
    return status, out.read_text()


def test_empty_modulus_list_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["moment", "--q"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify-afe", "--q"])
    assert exc.value.code == 2
    assert "empty modulus list" in capsys.readouterr().err


def test_explicit_mode_needs_shifts():
    with pytest.raises(SystemExit) as exc:
        main(["moment", "--q", "101", "--shift-mode", "explicit"])
    assert exc.value.code == 2


def test_orthogonality_report(tmp_path):
    status, text = run(tmp_path, "o.json", "verify-orthogonality", "--q-max", "40")
    rep = json.loads(text)
    assert status == 0
    assert rep["summary"]["failed"] == 0
    assert all(r["status"] == "pass" for r in rep["rows"])
    h = rep["header"]
    assert h["version"] == __version__ and h["formulas"] and h["config"]["q_max"] == 40
    assert "workers" not in h["config"]


def test_failure_exits_nonzero(tmp_path):
    status, text = run(tmp_path, "a.json", "verify-afe", "--q", "5", "--draws", "1", "--tol", "1e-30")
    assert status == 1
    assert json.loads(text)["summary"]["failed"] == 1


def test_moment_csv_columns_and_precision(tmp_path):
    status, text = run(tmp_path, "m.csv", "moment", "--q", "37", "--h", "2", "--format", "csv")
    assert status == 0
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = list(csv.DictReader(lines))
    assert tuple(rows[0].keys()) == MOMENT_COLUMNS
    assert rows[0]["q"] == "37" and rows[0]["shift_mode"] == "zero-limit"
    val = rows[0]["empirical_re"]
    assert float(format(float(val), ".17g")) == float(val)
    header = json.loads(text.splitlines()[0][2:])
    assert header["subcommand"] == "moment"


def test_explicit_shift_moment(tmp_path):
    status, text = run(
        tmp_path, "e.json", "moment", "--q", "37", "--shift-mode", "explicit",
        "--shifts", "0.01", "0.02j", "-0.003", "0.005+0.1j",
    )
    row = json.loads(text)["rows"][0]
    assert status == 0 and row["shift_mode"] == "explicit"
    assert abs(row["ratio_re"] - 1) < 1.5


def test_reports_identical_across_worker_counts(tmp_path):
    _, one = run(tmp_path, "w1.json", "moment", "--q", "101", "211", "--h", "2", "--workers", "1")
    _, eight = run(tmp_path, "w8.json", "moment", "--q", "101", "211", "--h", "2", "--workers", "8")
    assert one == eight
    _, m1 = run(tmp_path, "m1.csv", "mollified", "--q", "101", "--y", "3", "--workers", "1", "--format", "csv")
    _, m8 = run(tmp_path, "m8.csv", "mollified", "--q", "101", "--y", "3", "--workers", "8", "--format", "csv")
    assert m1 == m8


def test_pole_shifts_are_usage_errors():
    with pytest.raises(SystemExit) as exc:
        main(["moment", "--q", "37", "--shift-mode", "explicit", "--shifts", "0.01", "0", "-0.01", "0"])
    assert exc.value.code == 2


def test_timings_flag(tmp_path):
    _, text = run(tmp_path, "t.json", "moment", "--q", "37", "--timings")
    assert json.loads(text)["rows"][0]["seconds"] > 0


def test_lemmas_and_harness(tmp_path):
    status, text = run(tmp_path, "l.json", "verify-lemmas", "--draws", "3")
    assert status == 0 and json.loads(text)["summary"]["failed"] == 0
    status, text = run(tmp_path, "k.json", "kloosterman-harness", "--trials", "12")
    rep = json.loads(text)
    assert status == 0
    assert set(rep["summary"]) == {"thkls", "thkls1", "bilinear"}
    assert all(r["status"] == "stat" for r in rep["rows"])


def test_stdout_output(capsys):
    assert main(["verify-orthogonality", "--q-max", "5", "--format", "csv"]) == 0
    out = capsys.readouterr().out
    assert "name,status,value,tolerance,seconds" in out
