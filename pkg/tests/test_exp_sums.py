"""Tests for Kloosterman sums and the complete sum identities."""
from math import cos, gcd, pi

import numpy as np
import pytest
from hypothesis import assume, example, given, settings
from hypothesis.strategies import integers, sampled_from

from twisted_moments.arith import euler_phi
from twisted_moments.characters import DirichletCharacter, primitive_characters
from twisted_moments.const import TOL_IDENTITY, TOL_RECIPROCITY
from twisted_moments.exceptions import (
    DomainError,
    NotCoprimeError,
    OverflowBudgetError,
)
from twisted_moments.exp_sums import (
    CharacterOrientation,
    SignConventions,
    TwistedSumParams,
    kloosterman,
    kloosterman_matrix,
    poisson_n2_identity,
    reciprocity_identity,
    resolve_conventions,
    twisted_sum_identity,
    weil_bound,
)


@pytest.mark.parametrize(
    ("m", "n", "c", "expected"),
    [
        (1, 1, 1, 1.0),
        (1, 1, 2, 1.0),
        (1, 1, 3, -1.0),
        (1, 1, 5, 2 + 2 * cos(4 * pi / 5)),
        (1, 0, 7, -1.0),
        (0, 0, 12, 4.0),
    ],
)
def test_kloosterman_values(m: int, n: int, c: int, expected: float) -> None:
    assert kloosterman(m, n, c).value == pytest.approx(expected, abs=1e-12)


@given(
    integers(min_value=-(10**6), max_value=10**6),
    integers(min_value=-(10**6), max_value=10**6),
    integers(min_value=1, max_value=600),
)
@example(0, 0, 1)
@example(1, 1, 512)
def test_weil_bound(m: int, n: int, c: int) -> None:
    value = kloosterman(m, n, c)
    assert abs(value.imaginary) < 1e-8
    assert abs(value.value) <= value.weil_bound + 1e-8


@given(
    integers(min_value=1, max_value=1000),
    integers(min_value=1, max_value=1000),
    integers(min_value=2, max_value=300),
)
def test_kloosterman_symmetries(m: int, n: int, c: int) -> None:
    assume(gcd(m, c) == 1)
    value = kloosterman(m, n, c).value
    assert value == pytest.approx(kloosterman(n, m, c).value, abs=1e-8)
    assert value == pytest.approx(kloosterman(1, m * n, c).value, abs=1e-8)


def test_ramanujan_sum() -> None:
    for c in (1, 6, 30, 97):
        assert kloosterman(0, 0, c).value == pytest.approx(euler_phi(c))


def test_kloosterman_matrix() -> None:
    ms, ns = [1, 2, 5, 11], [3, 4, 9]
    matrix = kloosterman_matrix(ms, ns, 21)
    assert matrix.shape == (4, 3)
    for i, m in enumerate(ms):
        for j, n in enumerate(ns):
            assert matrix[i, j] == pytest.approx(kloosterman(m, n, 21).value)


def test_kloosterman_rejects_bad_modulus() -> None:
    with pytest.raises(DomainError):
        kloosterman(1, 1, 0)


def test_weil_bound_value() -> None:
    # tau(12) = 6, gcd(4, 8, 12) = 4
    assert weil_bound(4, 8, 12) == pytest.approx(6 * 2 * np.sqrt(12))


def test_conventions_resolved_once() -> None:
    conventions = resolve_conventions()
    assert conventions is resolve_conventions()
    assert isinstance(conventions, SignConventions)
    assert conventions.twisted_sum in CharacterOrientation
    assert conventions.congruence_sign in (1, -1)
    assert "congruence_sign=" in conventions.describe()


@pytest.mark.parametrize(
    ("c", "q", "p"), [(1, 3, 5), (2, 3, 7), (3, 7, 5), (1, 5, 3), (2, 5, 7)]
)
def test_twisted_sum_identity(c: int, q: int, p: int) -> None:
    for chi in primitive_characters(p):
        for n2, m1 in ((1, 1), (2, 3), (1, 4)):
            lhs, rhs, residual = twisted_sum_identity(
                TwistedSumParams(c, q, p, n2, m1, chi)
            )
            assert residual < TOL_IDENTITY, (c, q, p, chi.label, n2, m1, lhs, rhs)


def test_twisted_sum_orientation_matters() -> None:
    # a complex character tells the two orientations apart
    params = TwistedSumParams(1, 3, 7, 1, 2, DirichletCharacter(7, 1))
    fitted = resolve_conventions().twisted_sum
    other = next(o for o in CharacterOrientation if o is not fitted)
    assert twisted_sum_identity(params, fitted)[2] < TOL_IDENTITY
    assert twisted_sum_identity(params, other)[2] > 1e-3


def test_twisted_sum_params_validation() -> None:
    chi = DirichletCharacter(5, 1)
    with pytest.raises(NotCoprimeError):
        TwistedSumParams(5, 3, 5, 1, 1, chi)
    with pytest.raises(DomainError):
        TwistedSumParams(1, 3, 7, 1, 1, chi)
    with pytest.raises(DomainError):
        TwistedSumParams(0, 3, 5, 1, 1, chi)
    with pytest.raises(NotCoprimeError):
        TwistedSumParams(1, 5, 5, 1, 1, chi)


def test_twisted_sum_budget() -> None:
    params = TwistedSumParams(1000, 101, 103, 1, 1, DirichletCharacter(103, 1))
    with pytest.raises(OverflowBudgetError):
        twisted_sum_identity(params)


@settings(max_examples=300)
@given(
    integers(min_value=1, max_value=1000),
    sampled_from([3, 5, 7, 11, 13, 101]),
    integers(min_value=1, max_value=50),
    sampled_from([3, 5, 7, 11, 13, 103]),
    integers(min_value=-5000, max_value=5000),
)
def test_reciprocity(n2: int, p: int, c: int, q: int, m1: int) -> None:
    assume(m1 != 0 and gcd(m1, c * q) == 1)
    assert reciprocity_identity(n2, p, c, q, m1) < TOL_RECIPROCITY


def test_reciprocity_requires_coprime() -> None:
    with pytest.raises(NotCoprimeError):
        reciprocity_identity(1, 5, 2, 3, 6)


@pytest.mark.parametrize(("p", "c", "q"), [(5, 1, 3), (7, 2, 3), (5, 2, 7)])
def test_poisson_dual_identity(p: int, c: int, q: int) -> None:
    chi = DirichletCharacter(p, 1)
    for m1 in (1, 4, 11):
        if gcd(m1, p * c * q) != 1:
            continue
        for m2 in range(1, m1 * p + 1):
            brute, closed, residual, sign = poisson_n2_identity(m1, p, c, q, m2, chi)
            assert residual < TOL_IDENTITY, (m1, m2, brute, closed)
            assert sign == resolve_conventions().congruence_sign


def test_poisson_dual_argument_checks() -> None:
    chi = DirichletCharacter(5, 1)
    with pytest.raises(DomainError):
        poisson_n2_identity(0, 5, 1, 3, 1, chi)
    with pytest.raises(NotCoprimeError):
        poisson_n2_identity(10, 5, 1, 3, 1, chi)
    with pytest.raises(NotCoprimeError):
        poisson_n2_identity(3, 5, 1, 3, 1, chi)
