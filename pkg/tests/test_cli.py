import json
import subprocess
import sys

import pytest

from nadsys.cli import EXIT_DIAGNOSTICS, EXIT_FIXTURE, EXIT_OK, main
from nadsys.fixtures import FixtureReport, FixtureResult

SYSTEM = """\
map tent = pl [(0,0),(1/2,1),(1,0)]
map half = pl [(0,0),(1,1/2)]
seq T = cycle [tent]
seq H = eventually [half] then tent
set U = (1/4,1/2)
set V = (1/2,3/4)
query hitset T U V horizon=10
query compose tent tent
"""


@pytest.fixture
def system(tmp_path):
    p = tmp_path / "sys.nds"
    p.write_text(SYSTEM)
    return str(p)


def test_check_ok_and_diagnostics(system, tmp_path, capsys):
    assert main(["check", system]) == EXIT_OK
    assert "2 maps" in capsys.readouterr().out
    bad = tmp_path / "bad.nds"
    bad.write_text("map f = pl [(0,0),(1/2,2),(1,1)]\n")
    assert main(["check", str(bad)]) == EXIT_DIAGNOSTICS
    assert f"{bad}:1:19: value 2 at x=1/2 outside [0,1]" in capsys.readouterr().err


def test_missing_file_is_an_error(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.nds")]) == EXIT_DIAGNOSTICS
    assert "error:" in capsys.readouterr().err


def test_run_json(system, capsys):
    assert main(["run", system]) == EXIT_OK
    reports = json.loads(capsys.readouterr().out)
    assert [r["query"]["kind"] for r in reports] == ["hitset", "compose"]
    assert reports[0]["result"]["horizon"] == 10
    assert reports[1]["result"]["nodes"][1] == ["1/4", "1"]


def test_run_overrides_horizon_and_csv(system, capsys):
    assert main(["run", system, "--horizon", "4", "--format", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[1] == "n,hit,prefix_density"
    assert [l.split(",")[0] for l in lines[2:6]] == ["1", "2", "3", "4"]


def test_hitset_subcommand(system, capsys):
    assert main(["hitset", system, "T", "U", "V", "--horizon", "5", "--family", "cofinite"]) == 0
    (rep,) = json.loads(capsys.readouterr().out)
    assert rep["result"]["family"]["name"] == "cofinite"
    assert main(["hitset", system, "T", "U", "nope"]) == EXIT_DIAGNOSTICS
    assert "unknown set name 'nope'" in capsys.readouterr().err


def test_compose_subcommand(system, capsys):
    assert main(["compose", system, "tent", "half"]) == EXIT_OK
    (rep,) = json.loads(capsys.readouterr().out)
    assert rep["result"]["nodes"] == [["0", "0"], ["1", "1"]]
    assert main(["compose", system, "H"]) == EXIT_DIAGNOSTICS
    assert main(["compose", system, "H", "-n", "3"]) == EXIT_OK


def test_compose_node_cap_exits_one(system, monkeypatch, capsys):
    monkeypatch.setenv("NADSYS_COMPOSE_NODE_CAP", "50")
    assert main(["compose", system, "T", "-n", "10"]) == EXIT_DIAGNOSTICS
    assert "NADSYS_COMPOSE_NODE_CAP" in capsys.readouterr().err


def test_classify_subcommand(system, capsys):
    assert main(["classify", system, "T", "--depth", "2", "--horizon", "50"]) == EXIT_OK
    (rep,) = json.loads(capsys.readouterr().out)
    assert rep["result"]["verdict"] == "CertifiedYes" and rep["result"]["depth"] == 2


def test_stdin_input(monkeypatch, capsys):
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO(SYSTEM))
    assert main(["check", "-"]) == EXIT_OK


def test_verify_paper_exit_code_on_failure(monkeypatch, capsys):
    failing = FixtureReport([FixtureResult("x", "fail", "boom")])
    monkeypatch.setattr("nadsys.fixtures.verify_paper", lambda **kw: failing)
    assert main(["verify-paper", "--format", "csv"]) == EXIT_FIXTURE
    assert "boom" in capsys.readouterr().out


def test_verify_paper_subprocess():
    out = subprocess.run([sys.executable, "-m", "nadsys.cli", "verify-paper"],
                         capture_output=True, text=True, timeout=300)
    assert out.returncode == EXIT_OK, out.stderr
    report = json.loads(out.stdout)
    assert report["failed"] == 0 and report["passed"] > 30
