"""Tests for the arithmetic primitives."""
from math import gcd, sqrt

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis.strategies import integers

from twisted_moments.arith import (
    PrimePair,
    ResidueClass,
    additive_character,
    divisor_count,
    divisor_counts,
    euler_phi,
    factorize,
    is_prime,
    mod_inverse,
    primes_up_to,
    primitive_root,
    split_additive_character,
    unit_inverses,
)
from twisted_moments.exceptions import DomainError, NotCoprimeError


def test_primes_up_to() -> None:
    assert primes_up_to(1) == []
    assert primes_up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert all(is_prime(p) for p in primes_up_to(500))
    assert sum(is_prime(n) for n in range(501)) == len(primes_up_to(500))


def test_factorize_and_multiplicative_functions() -> None:
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert factorize(1) == {}
    assert euler_phi(36) == 12
    assert divisor_count(36) == 9
    assert divisor_counts(12)[12] == 6
    assert divisor_counts(12)[0] == 0
    with pytest.raises(DomainError):
        factorize(0)


@given(integers(min_value=1, max_value=2000))
def test_divisor_table_matches_factorization(n: int) -> None:
    assert divisor_counts(2000)[n] == divisor_count(n)


@pytest.mark.parametrize(("p", "g"), [(3, 2), (7, 3), (23, 5), (41, 6), (71, 7)])
def test_primitive_root(p: int, g: int) -> None:
    assert primitive_root(p) == g


def test_residue_class() -> None:
    assert ResidueClass.of(-1, 5) == ResidueClass(4, 5)
    assert int(mod_inverse(3, 7)) == 5
    with pytest.raises(DomainError):
        ResidueClass(5, 5)
    with pytest.raises(NotCoprimeError):
        mod_inverse(2, 4)


def test_prime_pair() -> None:
    pair = PrimePair(11, 3)
    assert pair.conductor == 99
    assert pair.balance_point == pytest.approx(3 * sqrt(11))
    with pytest.raises(DomainError):
        PrimePair(11, 2)
    with pytest.raises(DomainError):
        PrimePair(7, 7)
    with pytest.raises(DomainError):
        PrimePair(9, 5)


def test_additive_character() -> None:
    assert additive_character(5, 10) == pytest.approx(-1)
    assert additive_character(1, -4) == pytest.approx(additive_character(-1, 4))
    assert additive_character(10**18 + 1, 4) == pytest.approx(1j)
    with pytest.raises(DomainError):
        additive_character(1, 0)


@given(
    integers(min_value=-(10**6), max_value=10**6),
    integers(min_value=1, max_value=300),
    integers(min_value=1, max_value=300),
)
def test_split_additive_character(a: int, m1: int, m2: int) -> None:
    assume(gcd(m1, m2) == 1)
    first, second = split_additive_character(a, m1, m2)
    assert abs(first * second - additive_character(a, m1 * m2)) < 1e-12


@given(integers(min_value=1, max_value=3000))
def test_unit_inverses(m: int) -> None:
    units, inverses = unit_inverses(m)
    assert units.size == euler_phi(m)
    assert np.all((units * inverses) % m == 1 % m)


def test_unit_inverses_are_read_only() -> None:
    units, _ = unit_inverses(12)
    assert list(units) == [1, 5, 7, 11]
    with pytest.raises(ValueError):
        units[0] = 2
