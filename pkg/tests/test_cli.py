import json

import pytest

from rffso.cli import EXIT_CONFIG, EXIT_OK, EXIT_VALIDATION, main
from rffso.sweep import CSV_HEADER


@pytest.fixture
def scenario(tmp_path):
    p = tmp_path / "s.ini"
    p.write_text("[sweep]\nstart_db = 0\nstop_db = 5\nstep_db = 5\nschemes = all\n"
                 "[numerics]\nmc_samples = 4000\nstream_count = 2\n")
    return p


def test_analyze_writes_csv(scenario, tmp_path):
    out = tmp_path / "a.csv"
    assert main(["analyze", "--config", str(scenario), "--out", str(out), "--scheme", "tase"]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert tuple(lines[0].split(",")) == CSV_HEADER
    assert len(lines) == 3
    row = lines[1].split(",")
    assert row[1] == "TASE" and 0 <= float(row[2]) <= 1 and row[5] == ""


def test_simulate_is_byte_identical(scenario, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", str(scenario), "--out", str(a), "--seed", "9"]) == EXIT_OK
    assert main(["simulate", "--config", str(scenario), "--out", str(b), "--seed", "9"]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    rows = [r.split(",") for r in a.read_text().splitlines()[1:]]
    assert [r[1] for r in rows] == ["OTAS", "TASR", "TASE", "ATAS"] * 2
    for r in rows:
        assert 0 <= float(r[5]) <= 1 and 0 <= float(r[8]) <= 0.01


def test_sweep_with_workers(scenario, tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--config", str(scenario), "--out", str(out), "--scheme", "atas",
                 "--workers", "2"]) == EXIT_OK
    rows = [r.split(",") for r in out.read_text().splitlines()[1:]]
    assert [float(r[0]) for r in rows] == [0.0, 5.0]
    assert all("dispatch=" in r[-1] for r in rows)


def test_config_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[fso]\nrho_fso = 1.5\n")
    assert main(["analyze", "--config", str(bad)]) == EXIT_CONFIG
    assert "rho_fso" in capsys.readouterr().err
    assert main(["analyze", "--config", str(tmp_path / "missing.ini")]) == EXIT_CONFIG


def test_validate_subset(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["validate", "--only", "1,2", "--out", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    assert [r["criterion"] for r in report] == [1, 2] and all(r["passed"] for r in report)
    assert "[PASS] criterion 1" in capsys.readouterr().out


def test_corrupted_fixture_is_named(tmp_path, capsys):
    from importlib import resources

    text = resources.files("rffso").joinpath("data/meijer_fixtures.txt").read_text()
    lines = text.splitlines()
    parts = lines[3].split("|")
    parts[5] = " 1.234 "
    lines[3] = "|".join(parts)
    bad = tmp_path / "fx.txt"
    bad.write_text("\n".join(lines) + "\n")
    assert main(["validate", "--only", "2", "--fixtures", str(bad)]) == EXIT_VALIDATION
    out = capsys.readouterr().out
    assert "[FAIL] criterion 2" in out and "row 3" in out
