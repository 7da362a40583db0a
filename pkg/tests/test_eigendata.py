"""Tests for newform eigendata."""
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis.strategies import sampled_from

from twisted_moments.arith import primes_up_to
from twisted_moments.const import CURVE_11A
from twisted_moments.eigendata import (
    NewformEigendata,
    Provenance,
    elliptic_curve_ap,
    eta_product_eigendata,
    export_eigendata,
    extend_multiplicatively,
    ingest_eigendata,
    validate_eigendata,
)
from twisted_moments.exceptions import (
    DomainError,
    EigendataFormatError,
    InvariantViolationError,
)

# a(ell) of curve 11a
CURVE_11A_AP = {2: -2, 3: -1, 5: 1, 7: -2, 11: 1, 13: 4, 17: -2, 19: 0}


@pytest.mark.parametrize(("ell", "ap"), sorted(CURVE_11A_AP.items()))
def test_point_count(ell: int, ap: int) -> None:
    if ell == 11:
        pytest.skip("bad reduction")
    assert elliptic_curve_ap(CURVE_11A, ell) == ap


def test_point_count_needs_prime() -> None:
    with pytest.raises(DomainError):
        elliptic_curve_ap(CURVE_11A, 9)


def test_level_11(forms_11: list[NewformEigendata]) -> None:
    assert len(forms_11) == 1
    form = forms_11[0]
    assert form.label == "11.2.0"
    assert form.n_max == 300
    assert form.provenance is Provenance.COMPUTED
    assert form.fricke_sign == -1
    assert form.is_rational
    for ell, ap in CURVE_11A_AP.items():
        assert form.coefficients[ell - 1] == pytest.approx(ap, abs=1e-8)
    assert form(2) == pytest.approx(-2 / np.sqrt(2))
    assert form.lambdas[0] == 0


@given(sampled_from(primes_up_to(300)))
def test_level_11_matches_point_count(
    forms_11: list[NewformEigendata], ell: int
) -> None:
    if ell == 11:
        return
    assert forms_11[0].coefficients[ell - 1] == pytest.approx(
        elliptic_curve_ap(CURVE_11A, ell), abs=1e-6
    )


def test_level_11_matches_eta_product(forms_11: list[NewformEigendata]) -> None:
    eta = eta_product_eigendata(11, forms_11[0].n_max)
    assert eta.weight == 2
    assert eta.fricke_sign == forms_11[0].fricke_sign
    assert np.allclose(eta.lambdas, forms_11[0].lambdas, atol=1e-8)


def test_level_23(forms_23: list[NewformEigendata]) -> None:
    assert len(forms_23) == 2
    a2 = sorted(form.coefficients[1] for form in forms_23)
    root5 = np.sqrt(5)
    assert a2 == pytest.approx([(-1 - root5) / 2, (-1 + root5) / 2], abs=1e-8)
    assert not any(form.is_rational for form in forms_23)
    assert [form.form_index for form in forms_23] == [0, 1]


@pytest.mark.parametrize(
    ("level", "weight", "a2", "fricke"),
    [(2, 8, -8, 1), (3, 6, -6, -1), (5, 4, -4, 1)],
)
def test_eta_products(level: int, weight: int, a2: int, fricke: int) -> None:
    form = eta_product_eigendata(level, 100)
    assert form.weight == weight
    assert form.coefficients[0] == 1
    assert form.coefficients[1] == a2
    assert abs(form.coefficients[level - 1]) == level ** (weight // 2 - 1)
    assert form.fricke_sign == fricke
    assert form.is_rational


def test_eta_3(eta_3: NewformEigendata) -> None:
    assert eta_3.coefficients[:3] == (1.0, -6.0, 9.0)
    assert eta_3(3) == pytest.approx(3**-0.5)


def test_eta_product_domain() -> None:
    with pytest.raises(DomainError):
        eta_product_eigendata(7, 100)
    with pytest.raises(DomainError):
        eta_product_eigendata(3, 10)


def test_extend_multiplicatively() -> None:
    coefficients = extend_multiplicatively(CURVE_11A_AP, 11, 2, 19)
    assert coefficients[0] == 0
    assert coefficients[1] == 1
    assert coefficients[4] == 2  # a(2)^2 - 2
    assert coefficients[6] == 2
    assert coefficients[8] == -2 * 2 - 2 * -2  # a(2) a(4) - 2 a(2)
    assert coefficients[9] == -2  # a(3)^2 - 3


def test_newform_constructor_domain(forms_11: list[NewformEigendata]) -> None:
    form = forms_11[0]
    with pytest.raises(DomainError):
        replace(form, level=12)
    with pytest.raises(DomainError):
        replace(form, weight=3)
    with pytest.raises(DomainError):
        replace(form, fricke_sign=0)
    with pytest.raises(DomainError):
        replace(form, coefficients=())


def _corrupt(form: NewformEigendata, n: int, value: float) -> NewformEigendata:
    coefficients = list(form.coefficients)
    coefficients[n - 1] = value
    return replace(form, coefficients=tuple(coefficients))


@pytest.mark.parametrize(
    ("n", "value", "invariant"),
    [
        (1, 2.0, "normalization"),
        # 293 > 300/2 has no multiples in range and 293^2 > 300
        (293, 100.0, "deligne bound"),
        (6, 3.0, "multiplicativity"),
        # also far above the Deligne bound d(6) = 4
        (6, 100.0, "multiplicativity"),
    ],
)
def test_invariant_violations(
    forms_11: list[NewformEigendata], n: int, value: float, invariant: str
) -> None:
    with pytest.raises(InvariantViolationError) as excinfo:
        validate_eigendata(_corrupt(forms_11[0], n, value))
    assert excinfo.value.invariant == invariant
    assert excinfo.value.n == n


def test_hecke_recursion_violation(forms_11: list[NewformEigendata]) -> None:
    short = replace(forms_11[0], coefficients=(1.0, -2.0, -1.0, 3.0))
    with pytest.raises(InvariantViolationError) as excinfo:
        validate_eigendata(short)
    assert excinfo.value.invariant == "hecke recursion"
    assert excinfo.value.n == 4


def test_fricke_sign_violation(forms_11: list[NewformEigendata]) -> None:
    with pytest.raises(InvariantViolationError) as excinfo:
        validate_eigendata(replace(forms_11[0], fricke_sign=1))
    assert excinfo.value.invariant == "fricke sign"
    assert excinfo.value.n == 11


def test_atkin_lehner_violation(forms_11: list[NewformEigendata]) -> None:
    with pytest.raises(InvariantViolationError) as excinfo:
        # truncated before n=22 so only the check at q itself can fail
        validate_eigendata(
            replace(forms_11[0], coefficients=forms_11[0].coefficients[:10] + (2.0,))
        )
    assert excinfo.value.invariant == "atkin-lehner"


def test_export_and_ingest(
    tmp_path: Path, forms_11: list[NewformEigendata], eta_3: NewformEigendata
) -> None:
    path = tmp_path / "forms.txt"
    export_eigendata([forms_11[0], eta_3], path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# level=11 weight=2 form=0 fricke=-1"
    assert lines[1:4] == ["1,1", "2,-2", "3,-1"]
    assert lines[301] == "# level=3 weight=6 form=0 fricke=-1"

    ingested = ingest_eigendata(path)
    assert [form.label for form in ingested] == ["11.2.0", "3.6.0"]
    assert all(form.provenance is Provenance.INGESTED for form in ingested)
    assert ingested[0].coefficients == pytest.approx(forms_11[0].coefficients)
    assert ingested[1].coefficients == eta_3.coefficients


def test_export_rejects_irrational(
    tmp_path: Path, forms_23: list[NewformEigendata]
) -> None:
    with pytest.raises(EigendataFormatError):
        export_eigendata(forms_23, tmp_path / "forms.txt")


@pytest.mark.parametrize(
    "text",
    [
        "",
        "1,1\n",
        "# level=11 weight=2\n1,1\n",
        "# level=11 weight=2 form=0 fricke=-1\n1,1\n3,-1\n",
        "# level=11 weight=2 form=0 fricke=-1\n1,1\n2,x\n",
        "# level=11 weight=2 form=0 fricke=-1\n",
        "# level=12 weight=2 form=0 fricke=-1\n1,1\n",
    ],
)
def test_ingest_format_errors(tmp_path: Path, text: str) -> None:
    path = tmp_path / "forms.txt"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(EigendataFormatError):
        ingest_eigendata(path)


def test_ingest_missing_file(tmp_path: Path) -> None:
    with pytest.raises(EigendataFormatError):
        ingest_eigendata(tmp_path / "missing.txt")


def test_ingest_corrupted_coefficients(
    tmp_path: Path, forms_11: list[NewformEigendata]
) -> None:
    path = tmp_path / "forms.txt"
    export_eigendata([forms_11[0]], path)
    text = path.read_text(encoding="utf-8").replace("\n2,-2\n", "\n2,-3\n")
    path.write_text(text, encoding="utf-8")
    with pytest.raises(InvariantViolationError):
        ingest_eigendata(path)
