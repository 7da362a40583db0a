"""Tests for central values, root numbers and moments."""
from dataclasses import replace

import pytest

from twisted_moments import lfunctions
from twisted_moments.characters import DirichletCharacter, primitive_characters
from twisted_moments.const import TOL_DUAL, TOL_DUAL_OFF_DIAGONAL, TOL_ROOT_NUMBER
from twisted_moments.eigendata import NewformEigendata
from twisted_moments.exceptions import (
    DomainError,
    EigendataTooShortError,
    NotCoprimeError,
    SystemSingularError,
)
from twisted_moments.exp_sums import kloosterman_matrix
from twisted_moments.lfunctions import (
    Weighting,
    afe_bound_check,
    afe_length,
    afe_sums,
    central_value,
    dual_moment_check,
    eigendata_length,
    max_central_ratio,
    root_number,
    root_number_closed_form,
    smoothed_sum,
    solve_root_number,
    twisted_moment,
)
from twisted_moments.petersson import CMaxPolicy, HarmonicWeights, solve_harmonic_weights

# L(E, 1) of curve 11a
L_11A = 0.2538418608559107


def test_untwisted_central_value(forms_11: list[NewformEigendata]) -> None:
    form = forms_11[0]
    principal = DirichletCharacter(3, 0)
    value = central_value(form, principal)
    assert value.root_number == pytest.approx(1.0, abs=TOL_ROOT_NUMBER)
    assert root_number_closed_form(form, principal) == pytest.approx(1.0)
    # Euler factor 1 - lambda(3)/sqrt(3) + 1/3 with lambda(3) = -1/sqrt(3)
    assert value.value == pytest.approx(L_11A * 5 / 3, abs=1e-8)
    assert value.error_estimate < 1e-9


@pytest.mark.parametrize("p", [3, 5, 7, 13])
def test_root_numbers_level_11(forms_11: list[NewformEigendata], p: int) -> None:
    form = forms_11[0]
    for chi in primitive_characters(p):
        solved = solve_root_number(form, chi)
        assert solved.modulus_defect < TOL_ROOT_NUMBER
        assert solved.consistency < TOL_ROOT_NUMBER
        closed = root_number_closed_form(form, chi)
        assert abs(abs(closed) - 1) < 1e-12
        assert solved.value == pytest.approx(closed, abs=TOL_ROOT_NUMBER)


@pytest.mark.parametrize(("form_name", "p"), [("eta_3", 5), ("eta_3", 7), ("eta_5", 3)])
def test_root_numbers_higher_weight(
    request: pytest.FixtureRequest, form_name: str, p: int
) -> None:
    form = request.getfixturevalue(form_name)
    for chi in primitive_characters(p):
        assert root_number(form, chi) == pytest.approx(
            root_number_closed_form(form, chi), abs=TOL_ROOT_NUMBER
        )


def test_conjugate_twist(forms_23: list[NewformEigendata]) -> None:
    chi = DirichletCharacter(5, 1)
    for form in forms_23:
        value = central_value(form, chi)
        conjugate = central_value(form, chi.conjugate())
        assert conjugate.value == pytest.approx(value.value.conjugate(), abs=1e-8)
        assert conjugate.root_number == pytest.approx(
            value.root_number.conjugate(), abs=TOL_ROOT_NUMBER
        )


def test_afe_bound(forms_23: list[NewformEigendata]) -> None:
    for form in forms_23:
        for chi in primitive_characters(7):
            value, bound = afe_bound_check(central_value(form, chi))
            assert value <= bound


def test_central_value_stable_in_length(forms_11: list[NewformEigendata]) -> None:
    form = forms_11[0]
    chi = DirichletCharacter(3, 1)
    base = central_value(form, chi)
    longer = central_value(form, chi, 2.0, epsilon=base.root_number)
    assert longer.afe_length > base.afe_length
    assert longer.value == pytest.approx(base.value, abs=1e-9)


def test_eigendata_length(forms_11: list[NewformEigendata]) -> None:
    chi = DirichletCharacter(3, 1)
    required = eigendata_length(11, 3, 2)
    assert required == afe_length(forms_11[0], chi, 0.8)
    assert required >= afe_length(forms_11[0], chi)
    assert eigendata_length(11, 3, 2, 2.0) > required


def test_eigendata_too_short(forms_11: list[NewformEigendata]) -> None:
    short = replace(forms_11[0], coefficients=forms_11[0].coefficients[:40])
    with pytest.raises(EigendataTooShortError) as excinfo:
        afe_sums(short, DirichletCharacter(13, 1))
    assert excinfo.value.available == 40
    assert excinfo.value.required == afe_length(short, DirichletCharacter(13, 1))


def test_argument_checks(forms_11: list[NewformEigendata]) -> None:
    form = forms_11[0]
    with pytest.raises(NotCoprimeError):
        central_value(form, DirichletCharacter(11, 1))
    with pytest.raises(DomainError):
        afe_sums(form, DirichletCharacter(3, 1), balance=0.0)
    with pytest.raises(DomainError):
        solve_root_number(form, DirichletCharacter(3, 1), balance_points=[1.0])
    with pytest.raises(SystemSingularError):
        solve_root_number(form, DirichletCharacter(3, 1), balance_points=[1.0, 1.0])
    with pytest.raises(DomainError):
        smoothed_sum(form, DirichletCharacter(3, 1), 0.0)


def test_natural_moment(forms_23: list[NewformEigendata]) -> None:
    chi = DirichletCharacter(7, 2)
    moment = twisted_moment(forms_23, chi)
    values = [central_value(form, chi) for form in forms_23]
    assert moment.weighting is Weighting.NATURAL
    assert (moment.q, moment.p, moment.k, moment.character, moment.dim) == (
        23,
        7,
        2,
        2,
        2,
    )
    assert moment.moment == pytest.approx(sum(abs(v.value) ** 2 for v in values))
    assert moment.ratio == pytest.approx(moment.moment / 30)
    ratio = max_central_ratio(values)
    assert ratio == pytest.approx(
        max(abs(v.value) for v in values) / (23**0.5 + 7**0.5)
    )
    assert max_central_ratio([]) == 0.0


def test_harmonic_moment(forms_23: list[NewformEigendata]) -> None:
    chi = DirichletCharacter(5, 1)
    weights = solve_harmonic_weights(forms_23, 23, 2, policy=CMaxPolicy.fixed(200))
    moment = twisted_moment(forms_23, chi, Weighting.HARMONIC, weights)
    assert moment.weighting is Weighting.HARMONIC
    assert moment.moment > 0
    with pytest.raises(DomainError):
        twisted_moment(forms_23, chi, Weighting.HARMONIC)
    with pytest.raises(DomainError):
        twisted_moment(forms_23[:1], chi, Weighting.HARMONIC, weights)


def test_moment_rejects_mixed_forms(
    forms_11: list[NewformEigendata], forms_23: list[NewformEigendata]
) -> None:
    with pytest.raises(DomainError):
        twisted_moment(forms_11 + forms_23, DirichletCharacter(3, 1))
    with pytest.raises(DomainError):
        twisted_moment([], DirichletCharacter(3, 1))


def test_dual_moment_check(eta_3: NewformEigendata) -> None:
    weights = solve_harmonic_weights([eta_3], 3, 6, policy=CMaxPolicy.certified())
    check = dual_moment_check([eta_3], weights, DirichletCharacter(5, 1), 10.0)
    assert check.passed
    assert check.residual < TOL_DUAL * max(1.0, check.spectral)
    assert check.off_diagonal_error <= TOL_DUAL_OFF_DIAGONAL
    assert check.geometric == pytest.approx(check.diagonal + check.off_diagonal)
    assert check.diagonal > 0
    assert check.off_diagonal != 0
    assert check.tail_bound <= 1e-6


@pytest.fixture(name="weights_11", scope="module")
def weights_11_fixture(forms_11: list[NewformEigendata]) -> HarmonicWeights:
    return solve_harmonic_weights(forms_11, 11, 2, policy=CMaxPolicy.fixed(1000))


@pytest.mark.parametrize(("p", "length"), [(3, 10.0), (5, 20.0)])
def test_dual_moment_check_level_11(
    forms_11: list[NewformEigendata],
    weights_11: HarmonicWeights,
    p: int,
    length: float,
) -> None:
    check = dual_moment_check(forms_11, weights_11, DirichletCharacter(p, 1), length)
    assert check.c_max == 1000
    assert check.passed
    assert check.residual < 1e-9
    assert check.off_diagonal_error <= TOL_DUAL_OFF_DIAGONAL


def test_dual_moment_check_needs_the_off_diagonal(
    forms_11: list[NewformEigendata], weights_11: HarmonicWeights
) -> None:
    check = dual_moment_check(forms_11, weights_11, DirichletCharacter(3, 1), 10.0)
    diagonal_only = replace(check, geometric=check.diagonal)
    # max(1, spectral) alone cannot tell the two apart on the dyadic window
    assert diagonal_only.residual < TOL_DUAL * max(1.0, diagonal_only.spectral)
    assert diagonal_only.off_diagonal_error > TOL_DUAL_OFF_DIAGONAL
    assert not diagonal_only.passed


@pytest.mark.parametrize("scale", [-1.0, 0.0])
def test_dual_moment_check_corrupted_kloosterman(
    monkeypatch: pytest.MonkeyPatch, eta_3: NewformEigendata, scale: float
) -> None:
    weights = solve_harmonic_weights([eta_3], 3, 6, policy=CMaxPolicy.certified())
    monkeypatch.setattr(
        lfunctions,
        "kloosterman_matrix",
        lambda ms, ns, c: scale * kloosterman_matrix(ms, ns, c),
    )
    for p in (5, 7):
        check = dual_moment_check([eta_3], weights, DirichletCharacter(p, 1), 10.0)
        assert check.residual < TOL_DUAL * max(1.0, check.spectral)
        assert not check.passed


def test_dual_moment_check_arguments(eta_3: NewformEigendata) -> None:
    weights = solve_harmonic_weights([eta_3], 3, 6, policy=CMaxPolicy.fixed(10))
    chi = DirichletCharacter(5, 1)
    with pytest.raises(DomainError):
        dual_moment_check([eta_3], weights, chi, 0.0)
    with pytest.raises(DomainError):
        dual_moment_check([eta_3], weights, chi, 0.3)
    with pytest.raises(NotCoprimeError):
        dual_moment_check([eta_3], weights, DirichletCharacter(3, 1), 10.0)
