"""Tests for Dirichlet characters and Gauss sums."""
from math import sqrt

import numpy as np
import pytest
from hypothesis import given
from hypothesis.strategies import SearchStrategy, integers, sampled_from

from twisted_moments.arith import primes_up_to
from twisted_moments.characters import (
    DirichletCharacter,
    discrete_log_table,
    gauss_sum,
    parse_character_label,
    primitive_characters,
    twisted_gauss_sum,
)
from twisted_moments.exceptions import DomainError

ODD_PRIMES = primes_up_to(200)[1:]


def characters(primitive: bool = True) -> SearchStrategy[DirichletCharacter]:
    """Return a strategy over characters of odd prime modulus."""
    first = 1 if primitive else 0
    return sampled_from(ODD_PRIMES).flatmap(
        lambda p: integers(min_value=first, max_value=p - 2).map(
            lambda a: DirichletCharacter(p, a)
        )
    )


def test_discrete_log_table() -> None:
    table = discrete_log_table(7)
    assert table[0] == -1
    # 3 generates (Z/7)^*: 3^0=1, 3^1=3, 3^2=2, 3^3=6, 3^4=4, 3^5=5
    assert list(table[1:]) == [0, 2, 1, 4, 5, 3]


def test_character_basics() -> None:
    chi = DirichletCharacter(7, 2)
    assert chi.label == "7:2"
    assert chi.generator == 3
    assert chi.is_primitive
    assert not chi.is_real
    assert DirichletCharacter(7, 3).is_real
    assert chi(0) == 0
    assert chi(1) == pytest.approx(1)
    assert chi(3) == pytest.approx(np.exp(2j * np.pi * 2 / 6))
    assert chi.conjugate() == DirichletCharacter(7, 4)
    assert DirichletCharacter(7, 0).conjugate() == DirichletCharacter(7, 0)
    assert np.allclose(chi.at([1, 8, -6]), 1)


@pytest.mark.parametrize(
    ("modulus", "exponent"), [(9, 1), (7, 6), (7, -1), (5, 4)]
)
def test_invalid_characters(modulus: int, exponent: int) -> None:
    with pytest.raises(DomainError):
        DirichletCharacter(modulus, exponent)


def test_parse_character_label() -> None:
    assert parse_character_label("11:3") == DirichletCharacter(11, 3)
    with pytest.raises(DomainError):
        parse_character_label("11")
    with pytest.raises(DomainError):
        parse_character_label("eleven:3")


def test_primitive_characters() -> None:
    chars = primitive_characters(11)
    assert len(chars) == 9
    assert [chi.exponent for chi in chars] == list(range(1, 10))


@pytest.mark.parametrize("p", [3, 5, 7, 13, 17, 19])
def test_quadratic_gauss_sum(p: int) -> None:
    tau = gauss_sum(DirichletCharacter(p, (p - 1) // 2)).value
    expected = sqrt(p) if p % 4 == 1 else 1j * sqrt(p)
    assert abs(tau - expected) < 1e-9


@given(characters())
def test_gauss_sum_magnitude(chi: DirichletCharacter) -> None:
    assert gauss_sum(chi).magnitude_defect < 1e-9


def test_trivial_gauss_sum() -> None:
    assert gauss_sum(DirichletCharacter(11, 0)).value == pytest.approx(-1)


@given(characters())
def test_gauss_sum_of_conjugate(chi: DirichletCharacter) -> None:
    tau = gauss_sum(chi).value
    tau_bar = gauss_sum(chi.conjugate()).value
    assert abs(tau_bar - chi(-1) * tau.conjugate()) < 1e-9


@given(characters(), integers(min_value=-1000, max_value=1000))
def test_twisted_gauss_sum(chi: DirichletCharacter, b: int) -> None:
    twisted = twisted_gauss_sum(chi, b)
    if b % chi.modulus == 0:
        assert abs(twisted) < 1e-9
    else:
        expected = chi.conjugate()(b) * gauss_sum(chi).value
        assert abs(twisted - expected) < 1e-9


@given(characters(), integers(min_value=2**62, max_value=2**100))
def test_twisted_gauss_sum_large_argument(chi: DirichletCharacter, b: int) -> None:
    for shift in (b, -b):
        reduced = twisted_gauss_sum(chi, shift % chi.modulus)
        assert abs(twisted_gauss_sum(chi, shift) - reduced) < 1e-9


@given(characters(primitive=False), integers(), integers())
def test_multiplicativity(chi: DirichletCharacter, m: int, n: int) -> None:
    assert abs(chi(m * n) - chi(m) * chi(n)) < 1e-12
