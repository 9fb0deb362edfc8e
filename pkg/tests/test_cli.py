import json

import pytest

from concavelab.cli import load_config, parse_and_dispatch

CONFIG = """\
[domain]
kind = square

[weight]
kind = constant
c = 1.0

[source]
kind = one

[grid]
h = 0.125
T = 0.5
snapshots = 6

[audit]
mode = space
alpha = 0.5
"""


@pytest.fixture()
def config_file(tmp_path):
    path = tmp_path / "torsion.ini"
    path.write_text(CONFIG)
    return path


def test_usage_error_names_offending_flag(capsys, config_file):
    rc = parse_and_dispatch(["solve", "--config", str(config_file),
                             "--h", "-1"])
    assert rc == 2
    assert "--h" in capsys.readouterr().err


def test_usage_error_bad_format(capsys, config_file):
    rc = parse_and_dispatch(["solve", "--config", str(config_file),
                             "--format", "xml"])
    assert rc == 2
    assert "--format" in capsys.readouterr().err


def test_missing_config_is_usage_error(capsys):
    assert parse_and_dispatch(["solve"]) == 2
    assert "config" in capsys.readouterr().err


def test_bad_domain_kind_rejected(tmp_path, capsys):
    path = tmp_path / "bad.ini"
    path.write_text("[domain]\nkind = pentagon\n")
    rc = parse_and_dispatch(["solve", "--config", str(path)])
    assert rc == 2
    assert "pentagon" in capsys.readouterr().err


def test_unknown_scenario_rejected(capsys):
    rc = parse_and_dispatch(["verify", "--scenario", "bogus"])
    assert rc == 2


def test_load_config_roundtrip(config_file):
    problem, grid, audit = load_config(config_file)
    assert problem.weight.kind == "constant"
    assert problem.source.kind == "one"
    assert grid["h"] == pytest.approx(0.125)
    assert grid["T"] == pytest.approx(0.5)
    assert audit["alpha"] == pytest.approx(0.5)


def test_solve_then_audit_and_envelope(tmp_path, config_file, capsys):
    out = tmp_path / "out"
    rc = parse_and_dispatch(["solve", "--config", str(config_file),
                             "--out", str(out), "--format", "csv"])
    assert rc == 0
    summary = json.loads((out / "solve_report.json").read_text())
    assert summary["monotone"] is True
    assert len(summary["files"]) == len(summary["snapshots"])

    rc = parse_and_dispatch(["stationary", "--config", str(config_file),
                             "--out", str(out), "--format", "csv"])
    assert rc == 0
    assert (out / "stationary.csv").exists()

    rc = parse_and_dispatch(["audit", "--config", str(config_file),
                             "--field", str(out / "stationary.csv"),
                             "--out", str(out)])
    assert rc == 0  # sqrt of the torsion function is concave up to tau
    rep = json.loads((out / "audit_report.json").read_text())
    assert rep["min"] >= -rep["tau_audit"]

    rc = parse_and_dispatch(["envelope", "--config", str(config_file),
                             "--field", str(out / "stationary.csv"),
                             "--out", str(out)])
    assert rc == 0
    env = json.loads((out / "envelope_report.json").read_text())
    assert env["bound_ok"] is True


def test_solve_binary_format(tmp_path, config_file):
    out = tmp_path / "bin"
    rc = parse_and_dispatch(["solve", "--config", str(config_file),
                             "--out", str(out)])
    assert rc == 0
    summary = json.loads((out / "solve_report.json").read_text())
    assert summary["files"][0].endswith(".bin")
    assert (out / summary["files"][0]).exists()


def test_verify_scenario_exit_zero(tmp_path):
    out = tmp_path / "v"
    rc = parse_and_dispatch(["verify", "--scenario", "torsion-square",
                             "--h", "0.125", "--out", str(out)])
    assert rc == 0
    rep = json.loads((out / "verify_torsion-square.json").read_text())
    assert rep["verdict"] == "pass"


def test_verify_reports_byte_identical(tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        rc = parse_and_dispatch(["verify", "--scenario",
                                 "lane-emden-square", "--h", "0.125",
                                 "--out", str(out)])
        assert rc == 0
        outs.append((out / "verify_lane-emden-square.json").read_bytes())
    assert outs[0] == outs[1]


def test_props_exit_zero_and_deterministic(tmp_path):
    outs = []
    for name in ("p1", "p2"):
        out = tmp_path / name
        rc = parse_and_dispatch(["props", "--seed", "3", "--draws", "400",
                                 "--out", str(out)])
        assert rc == 0
        outs.append((out / "props_report.json").read_bytes())
    assert outs[0] == outs[1]


def test_suite_requires_selection(capsys):
    assert parse_and_dispatch(["suite"]) == 2


def test_suite_ids_subset(tmp_path):
    out = tmp_path / "s"
    rc = parse_and_dispatch(["suite", "--ids", "torsion-square",
                             "--h", "0.125", "--out", str(out)])
    assert rc == 0
    merged = json.loads((out / "suite_report.json").read_text())
    assert merged["verdicts"] == {"torsion-square": "pass"}


def test_console_entry_point(tmp_path):
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "concavelab.cli"],
                          capture_output=True, text=True)
    # no subcommand -> argparse usage error
    assert proc.returncode == 2
