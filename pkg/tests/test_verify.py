"""Tests for the verification suites."""
from math import nan
from pathlib import Path

import pytest

from twisted_moments.const import REPORT_COLUMNS, TOL_DUAL_OFF_DIAGONAL, VERIFY_SUITES
from twisted_moments.exceptions import EigendataFormatError
from twisted_moments.verify import (
    VERIFICATIONS,
    VerificationContext,
    VerificationDescription,
    VerificationResult,
    descriptions,
    first_failure,
    run_verification,
    write_report,
)


def test_every_suite_has_verifications() -> None:
    for suite in VERIFY_SUITES:
        assert descriptions(suite)
    assert len(descriptions("all")) == len(VERIFICATIONS)
    keys = [description.key for description in VERIFICATIONS]
    assert len(set(keys)) == len(keys)


def test_ingested_files_join_the_eigendata_suite(tmp_path: Path) -> None:
    missing = tmp_path / "missing.txt"
    selected = descriptions("eigendata", [missing])
    assert selected[-1].key == "ingested_eigendata"
    assert selected[-1].parameters == str(missing)
    assert descriptions("characters", [missing]) == descriptions("characters")
    with pytest.raises(EigendataFormatError):
        selected[-1].residual_fn(VerificationContext())


def test_character_suite_passes() -> None:
    results = run_verification("characters")
    assert results
    assert all(result.passed for result in results)
    assert first_failure(results) is None


def _description(key: str) -> VerificationDescription:
    (description,) = [item for item in VERIFICATIONS if item.key == key]
    return description


@pytest.mark.parametrize(
    "key", ["point_count_11a", "eisenstein_eigenvalue", "dimension_genus"]
)
def test_eigendata_checks(key: str) -> None:
    description = _description(key)
    assert description.residual_fn(VerificationContext()) <= description.tolerance


def test_envelope_constants_are_reported() -> None:
    description = _description("bessel_sqrt_envelope")
    assert description.resolved_fn is not None
    context = VerificationContext()
    assert description.residual_fn(context) <= description.tolerance
    resolved = description.resolved_fn(context)
    assert [part.split("=")[0] for part in resolved.split(";")] == [
        "C_1",
        "C_3",
        "C_11",
    ]
    assert resolved.startswith("C_1=0.5000/0.82")


def test_dual_moment_verification() -> None:
    description = _description("dual_moment_check")
    assert description.tolerance == TOL_DUAL_OFF_DIAGONAL
    assert description.residual_fn(VerificationContext()) <= description.tolerance


def test_report(tmp_path: Path) -> None:
    results = [
        VerificationResult("characters", "a", "", 0.0, 1e-9, True),
        VerificationResult(
            "eigendata", "b", "x", nan, 0.0, False, detail="EmptySpaceError: none"
        ),
        VerificationResult("exp-sums", "c", "", 1.0, 1e-9, False, resolved="S+"),
    ]
    assert first_failure(results) is results[1]
    path = tmp_path / "report.csv"
    write_report(path, results)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(REPORT_COLUMNS)
    assert lines[1] == "characters,a,,0,1e-09,true,"
    assert lines[2] == "eigendata,b,x,nan,0,false,"
    assert lines[3] == "exp-sums,c,,1,1e-09,false,S+"
