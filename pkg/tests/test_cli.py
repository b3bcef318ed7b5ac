import csv
import json
import subprocess
import sys

import pytest

from epicast.cli import main
from epicast.evaluate import strip_timings


def run(*argv):
    return main([str(a) for a in argv])


def test_inspect_ok(data_dir, capsys):
    assert run("inspect", "--data", data_dir, "--country", "India", "--metric", "confirmed") == 0
    out = capsys.readouterr().out
    assert "series_length: 115" in out
    assert "trim_date: 2020-01-30" in out
    assert "window_length: 100" in out


def test_inspect_fixture_file(fixture_csv, capsys):
    assert run("inspect", "--data", fixture_csv, "--country", "Freedonia", "--metric", "confirmed") == 0
    assert "trim_index: 2" in capsys.readouterr().out


def test_inspect_missing_file(tmp_path, capsys):
    code = run("inspect", "--data", tmp_path / "nope.csv", "--country", "India", "--metric", "confirmed")
    assert code == 2
    captured = capsys.readouterr()
    assert captured.out == "" and "cannot read" in captured.err


def test_inspect_unknown_country(data_dir):
    assert run("inspect", "--data", data_dir, "--country", "Atlantis", "--metric", "confirmed") == 3


def test_malformed_csv_exits_2(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("Country,Lat\nIndia,1\n")
    assert run("inspect", "--data", bad, "--country", "India", "--metric", "confirmed") == 2


def test_usage_errors(data_dir, tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["forecast", "--bogus"])
    assert info.value.code == 1
    assert run("compare", "--data", data_dir, "--country", "India", "--regressors", "", "--out", tmp_path) == 1
    assert run("compare", "--data", data_dir, "--country", "India", "--regressors", "svm", "--out", tmp_path) == 1
    assert run("compare", "--data", data_dir, "--country", "India", "--window", 3, "--out", tmp_path) == 1


def test_forecast_default_files(data_dir, tmp_path, capsys):
    assert run("forecast", "--data", data_dir, "--country", "India", "--metric", "confirmed", "--out", tmp_path) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == [
        "curve_brr_confirmed.csv",
        "curve_gpr_confirmed.csv",
        "report.csv",
        "report_brr_confirmed.json",
        "report_gpr_confirmed.json",
    ]
    assert capsys.readouterr().out.startswith("regressor,metric,train_ms")
    rows = list(csv.DictReader(open(tmp_path / "curve_gpr_confirmed.csv")))
    assert len(rows) == 100
    assert rows[0]["date"] == "2020-01-30"
    assert sum(r["segment"] == "train" for r in rows) == 67


def test_forecast_single_regressor(data_dir, tmp_path):
    code = run("forecast", "--data", data_dir, "--country", "India", "--metric", "deaths",
               "--regressors", "brr", "--out", tmp_path)
    assert code == 0
    assert sorted(p.name for p in tmp_path.glob("*_*")) == ["curve_brr_deaths.csv", "report_brr_deaths.json"]
    report = json.loads((tmp_path / "report_brr_deaths.json").read_text())
    assert report["start_date"] == "2020-01-30"
    assert report["train_size"] == 75


def test_curve_rows_match_window(fixture_csv, tmp_path):
    code = run("forecast", "--data", fixture_csv, "--country", "Freedonia", "--metric", "confirmed",
               "--regressors", "brr", "--degree", 1, "--out", tmp_path)
    assert code == 0
    lines = (tmp_path / "curve_brr_confirmed.csv").read_text().splitlines()
    assert len(lines) - 1 == 4  # fixture series after trimming the two leading zeros


def test_compare_four_rows(data_dir, tmp_path):
    assert run("compare", "--data", data_dir, "--country", "India", "--out", tmp_path) == 0
    rows = list(csv.DictReader(open(tmp_path / "report.csv")))
    assert [(r["regressor"], r["metric"]) for r in rows] == [
        ("BRR", "Confirmed"),
        ("GPR", "Confirmed"),
        ("BRR", "Deaths"),
        ("GPR", "Deaths"),
    ]


def test_config_file_and_flag_precedence(data_dir, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# run settings\ndata = {data_dir}\ncountry = India\nregressors = brr,gpr\ndegree = 2\n")
    out = tmp_path / "out"
    assert run("forecast", "--config", cfg, "--metric", "confirmed", "--regressors", "brr", "--out", out) == 0
    assert sorted(p.name for p in out.glob("report_*")) == ["report_brr_confirmed.json"]


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = blue\n")
    assert run("inspect", "--config", cfg, "--country", "India", "--metric", "confirmed") == 1


def test_env_data_fallback(data_dir, monkeypatch, capsys):
    monkeypatch.setenv("EPICAST_DATA", str(data_dir))
    assert run("inspect", "--country", "India", "--metric", "deaths") == 0
    assert "metric: deaths" in capsys.readouterr().out
    monkeypatch.delenv("EPICAST_DATA")
    assert run("inspect", "--country", "India", "--metric", "deaths") == 1


def test_unwritable_output_exits_5(data_dir, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code = run("forecast", "--data", data_dir, "--country", "India", "--metric", "confirmed",
               "--regressors", "brr", "--out", blocker / "sub")
    assert code == 5


def snapshot(out_dir):
    files = {}
    for p in sorted(out_dir.iterdir()):
        if p.suffix == ".json":
            files[p.name] = strip_timings(json.loads(p.read_text()))
        elif p.name == "report.csv":
            files[p.name] = strip_timings(list(csv.DictReader(open(p))))
        else:
            files[p.name] = p.read_bytes()
    return files


def test_outputs_deterministic_except_timings(data_dir, tmp_path):
    for name in ("a", "b"):
        assert run("compare", "--data", data_dir, "--country", "India", "--out", tmp_path / name) == 0
    assert snapshot(tmp_path / "a") == snapshot(tmp_path / "b")


def test_module_entry_point(data_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "epicast", "inspect", "--data", str(data_dir), "--country", "India", "--metric", "confirmed"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "country: India"
