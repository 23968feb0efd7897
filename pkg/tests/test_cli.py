import csv
import io
import json
import subprocess
import sys

import pytest

from hgcolor.cli import main, parse_range, UsageError


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def test_parse_range():
    assert list(parse_range("3..5")) == [3, 4, 5]
    assert list(parse_range("7")) == [7]
    for bad in ("5..3", "1..4", "2..65", "a..b"):
        with pytest.raises(UsageError):
            parse_range(bad)


def test_thresholds_csv():
    code, out = run(["thresholds", "--r-range", "3..5", "--k-range", "3..3"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["r"]) for r in rows] == [3, 4, 5]
    row = rows[0]
    assert float(row["u_low"]) == pytest.approx(2.7726, abs=5e-5)
    assert float(row["u_high"]) == pytest.approx(9.8875, abs=5e-5)
    assert row["classification"] == "IRREGULAR"
    assert len(row["c_rk"].split(".")[1]) >= 6


def test_thresholds_r2_value():
    code, out = run(["thresholds", "--r-range", "2..2", "--k-range", "3..3"])
    assert code == 0
    assert float(list(csv.DictReader(io.StringIO(out)))[0]["c_rk"]) == pytest.approx(1.848392, abs=1e-6)


def test_thresholds_json_round_trips():
    code, out = run(["thresholds", "--r-range", "2..3", "--k-range", "2..3", "--refined", "--format", "json"])
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 4 and all(r["c_refined"] >= r["c_rk"] for r in rows)
    assert json.loads(json.dumps(rows)) == rows


def test_thresholds_empty_range(capsys):
    code, out = run(["thresholds", "--r-range", "5..3"])
    assert code == 2 and out == ""
    assert "empty" in capsys.readouterr().err


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["thresholds", "--bogus"])
    assert exc.value.code == 2


def test_moments():
    code, out = run(["moments", "--n", "4", "--r", "2", "--k", "2", "--m", "1", "--exact-z2", "--format", "json"])
    assert code == 0
    d = json.loads(out)
    assert d["E_Z"] == "3" and d["E_Z2"] == "12"
    code, out = run(["moments", "--n", "4", "--r", "2", "--k", "2", "--m", "0"])
    assert "E_Z = 6" in out
    assert run(["moments", "--n", "4", "--r", "2", "--k", "3", "--m", "1"])[0] == 2


def test_moments_guard():
    assert run(["moments", "--n", "40", "--r", "2", "--k", "4", "--m", "1", "--exact-z2"])[0] == 3


def test_sample_golden():
    argv = ["sample", "--n", "5", "--r", "3", "--m", "2", "--model", "multi", "--seed", "7"]
    code, out = run(argv)
    assert code == 0
    assert out == "# n=5 r=3 m=2 model=multi seed=7\n2 4 2\n1 5 3\n"
    assert run(argv)[1] == out


def test_sample_needs_model_parameter():
    assert run(["sample", "--n", "5", "--r", "3", "--model", "bernoulli"])[0] == 2
    assert run(["sample", "--n", "5", "--r", "3", "--model", "uniform"])[0] == 2


def test_sweep_exit_codes():
    base = ["sweep", "--r", "3", "--k", "2", "--trials", "3"]
    assert run(base + ["--n", "12", "--c-grid", "2,1"])[0] == 2
    assert run(base + ["--n", "50", "--c-grid", "1,2"])[0] == 3


def test_sweep_files_are_byte_identical(tmp_path):
    argv = ["--threads", "1", "sweep", "--r", "3", "--k", "2", "--n", "12", "--c-grid", "1,2,3",
            "--trials", "10", "--seed", "4"]
    outputs = []
    for name in ("a", "b"):
        prefix = str(tmp_path / name)
        assert main(argv + ["--out", prefix]) == 0
        outputs.append(((tmp_path / f"{name}.csv").read_bytes(), (tmp_path / f"{name}.json").read_bytes()))
    assert outputs[0] == outputs[1]
    meta = json.loads(outputs[0][1])
    assert meta["config"]["seed"]["value"] == 4


def test_verify_subset():
    code, out = run(["verify", "--lemma", "app:lem017", "--format", "csv"])
    assert code == 0
    assert out.splitlines()[1].startswith("app:lem017,")
    assert run(["verify", "--lemma", "app:nope"])[0] == 2


def test_badedges_json():
    code, out = run(["badedges", "--r", "3", "--c", "1", "--n", "500", "--trials", "100", "--isolated"])
    assert code == 0
    d = json.loads(out)
    assert d["limit"] == pytest.approx(0.049787, abs=1e-6)
    assert "isolated" in d


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hgcolor.cli", "thresholds", "--r-range", "2..2", "--k-range", "2..2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "r,k,u_low,c_rk,u_high,xi,classification"
    assert proc.stderr == ""
