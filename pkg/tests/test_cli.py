"""Tests for the command line interface."""
import json
from pathlib import Path

import pytest

from twisted_moments.__main__ import main
from twisted_moments.const import (
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    EXIT_VERIFICATION_FAILED,
)


def test_verify_suite(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    report = tmp_path / "report.csv"
    assert main(["verify", "characters", "--report", str(report)]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out
    assert all(line.startswith("ok ") for line in out)
    assert len(report.read_text(encoding="utf-8").splitlines()) == len(out) + 1


def test_unknown_suite() -> None:
    with pytest.raises(SystemExit):
        main(["verify", "everything"])


def _compute_eta(path: Path) -> None:
    argv = ["eigendata", "compute", "--q", "3", "--nmax", "50", "--out", str(path)]
    assert main([*argv, "--eta"]) == EXIT_OK


def test_eigendata_compute_and_ingest(
    capsys: pytest.CaptureFixture[str], tmp_path: Path
) -> None:
    path = tmp_path / "eta3.txt"
    _compute_eta(path)
    assert "3.6.0: 50 coefficients, fricke -1" in capsys.readouterr().out
    assert main(["eigendata", "ingest", str(path)]) == EXIT_OK
    (line,) = capsys.readouterr().out.splitlines()
    assert json.loads(line) == {
        "form": "3.6.0",
        "level": 3,
        "weight": 6,
        "n_max": 50,
        "fricke": -1,
        "provenance": "ingested",
    }


def test_corrupted_eigendata(
    capsys: pytest.CaptureFixture[str], tmp_path: Path
) -> None:
    path = tmp_path / "eta3.txt"
    _compute_eta(path)
    text = path.read_text(encoding="utf-8").replace("\n2,-6\n", "\n2,-7\n")
    path.write_text(text, encoding="utf-8")
    assert main(["eigendata", "ingest", str(path)]) == EXIT_VERIFICATION_FAILED
    assert "error: InvariantViolationError" in capsys.readouterr().err


def test_genus_zero_compute(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    out = str(tmp_path / "forms.txt")
    argv = ["eigendata", "compute", "--q", "7", "--nmax", "50", "--out", out]
    assert main(argv) == EXIT_VERIFICATION_FAILED
    assert "EmptySpaceError" in capsys.readouterr().err


def test_moment(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["moment", "--q", "11", "--p", "3", "--char", "3:1"]) == EXIT_OK
    (entry,) = json.loads(capsys.readouterr().out)
    assert entry["q"] == 11
    assert entry["character"] == "3:1"
    assert entry["dim"] == 1
    assert len(entry["forms"]) == 1
    assert entry["moment_harmonic"] > 0


@pytest.mark.parametrize(
    "argv",
    [
        ["moment", "--q", "11", "--p", "11"],
        ["moment", "--q", "11", "--p", "3", "--char", "5:1"],
        ["moment", "--q", "11", "--p", "3", "--char", "three"],
        ["moment", "--q", "12", "--p", "3"],
        ["moment", "--q", "11", "--p", "3", "--k", "3"],
    ],
)
def test_moment_configuration_errors(
    capsys: pytest.CaptureFixture[str], argv: list[str]
) -> None:
    assert main(argv) == EXIT_CONFIG_ERROR
    assert capsys.readouterr().err.startswith("configuration error: ")


def test_scan(tmp_path: Path) -> None:
    config = tmp_path / "scan.json"
    output = tmp_path / "scan.csv"
    config.write_text(
        json.dumps({"q_list": [11], "p_list": [3], "output": str(output)}),
        encoding="utf-8",
    )
    assert main(["scan", "--config", str(config), "--workers", "1"]) == EXIT_OK
    assert output.read_text(encoding="utf-8").startswith("q,p,k,character,dim,")


@pytest.mark.parametrize(
    "document",
    [
        {"q_list": [11], "p_list": [3]},
        {"q_list": [11], "p_list": [4], "output": "scan.csv"},
        {"q_list": [11], "p_list": [3], "output": "scan.csv", "workers": "two"},
    ],
)
def test_scan_configuration_errors(
    capsys: pytest.CaptureFixture[str], tmp_path: Path, document: dict[str, object]
) -> None:
    config = tmp_path / "scan.json"
    config.write_text(json.dumps(document), encoding="utf-8")
    assert main(["scan", "--config", str(config)]) == EXIT_CONFIG_ERROR
    assert "configuration error" in capsys.readouterr().err


def test_scan_missing_config(tmp_path: Path) -> None:
    assert (
        main(["scan", "--config", str(tmp_path / "missing.json")])
        == EXIT_CONFIG_ERROR
    )
