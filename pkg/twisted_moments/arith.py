"""Exact modular arithmetic primitives."""
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt, pi

import numpy as np
import numpy.typing as npt

from .exceptions import DomainError, NotCoprimeError

# Vectorized products stay inside int64 below this modulus.
_INT64_SAFE_MODULUS = 3_000_000_000


@dataclass(frozen=True)
class ResidueClass:
    """Residue class value mod modulus."""

    value: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise DomainError(f"modulus must be positive, got {self.modulus}")
        if not 0 <= self.value < self.modulus:
            raise DomainError(
                f"value {self.value} is not reduced modulo {self.modulus}"
            )

    @classmethod
    def of(cls, value: int, modulus: int) -> "ResidueClass":
        """Return the class of an arbitrary integer."""
        if modulus < 1:
            raise DomainError(f"modulus must be positive, got {modulus}")
        return cls(value % modulus, modulus)

    def __int__(self) -> int:
        return self.value


@dataclass(frozen=True)
class PrimePair:
    """Prime level q and prime character modulus p."""

    q: int
    p: int

    def __post_init__(self) -> None:
        if not is_prime(self.q):
            raise DomainError(f"q={self.q} is not prime")
        if self.p < 3 or not is_prime(self.p):
            raise DomainError(f"p={self.p} is not an odd prime")
        if self.q == self.p:
            raise DomainError(f"q and p must differ, got {self.q} twice")

    @property
    def conductor(self) -> int:
        """Return the conductor q*p^2 of a twist."""
        return self.q * self.p * self.p

    @property
    def balance_point(self) -> float:
        """Return q^(1/2) p, the natural length of the AFE sums."""
        return float(self.q) ** 0.5 * self.p


def is_prime(n: int) -> bool:
    """Return True if n is prime (trial division)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    """Return all primes <= n."""
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for d in range(2, isqrt(n) + 1):
        if sieve[d]:
            sieve[d * d :: d] = False
    return [int(v) for v in np.flatnonzero(sieve)]


def factorize(n: int) -> dict[int, int]:
    """Return the prime factorization of n as prime -> exponent."""
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def euler_phi(n: int) -> int:
    """Return Euler's totient of n."""
    result = n
    for prime in factorize(n):
        result -= result // prime
    return result


def divisor_count(n: int) -> int:
    """Return tau(n), the number of divisors of n."""
    count = 1
    for exponent in factorize(n).values():
        count *= exponent + 1
    return count


@lru_cache(maxsize=8)
def divisor_counts(n_max: int) -> npt.NDArray[np.int64]:
    """Return tau(n) for n = 0..n_max, with tau(0) set to 0."""
    counts = np.zeros(n_max + 1, dtype=np.int64)
    for d in range(1, n_max + 1):
        counts[d::d] += 1
    counts.setflags(write=False)
    return counts


def mod_inverse(a: int, m: int) -> ResidueClass:
    """Return the inverse of a modulo m."""
    if m < 1:
        raise DomainError(f"modulus must be positive, got {m}")
    if gcd(a, m) != 1:
        raise NotCoprimeError(f"gcd({a}, {m}) = {gcd(a, m)}")
    return ResidueClass(pow(a, -1, m), m)


def primitive_root(p: int) -> int:
    """Return the least primitive root of the prime p."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p == 2:
        return 1
    cofactors = [(p - 1) // ell for ell in factorize(p - 1)]
    for g in range(2, p):
        if all(pow(g, e, p) != 1 for e in cofactors):
            return g
    raise DomainError(f"no primitive root found for {p}")  # pragma: no cover


def additive_character(num: int, den: int) -> complex:
    """Return e(num/den) = exp(2 pi i num/den) with exact reduction."""
    if den == 0:
        raise DomainError("denominator must be nonzero")
    if den < 0:
        num, den = -num, -den
    angle = 2.0 * pi * (num % den) / den
    return complex(np.cos(angle), np.sin(angle))


def split_additive_character(a: int, m1: int, m2: int) -> tuple[complex, complex]:
    """Split e(a/(m1 m2)) into e(a inv(m2)/m1) * e(a inv(m1)/m2)."""
    if m1 < 1 or m2 < 1:
        raise DomainError(f"moduli must be positive, got {m1}, {m2}")
    if gcd(m1, m2) != 1:
        raise NotCoprimeError(f"gcd({m1}, {m2}) = {gcd(m1, m2)}")
    m2_bar = pow(m2, -1, m1) if m1 > 1 else 0
    m1_bar = pow(m1, -1, m2) if m2 > 1 else 0
    return (
        additive_character(a * m2_bar, m1),
        additive_character(a * m1_bar, m2),
    )


def powmod_array(
    base: npt.NDArray[np.int64], exponent: int, modulus: int
) -> npt.NDArray[np.int64]:
    """Return base**exponent % modulus elementwise."""
    if modulus >= _INT64_SAFE_MODULUS:
        return np.array(
            [pow(int(b), exponent, modulus) for b in base], dtype=np.int64
        )
    result = np.ones_like(base) % modulus
    square = base % modulus
    while exponent:
        if exponent & 1:
            result = (result * square) % modulus
        square = (square * square) % modulus
        exponent >>= 1
    return result


@lru_cache(maxsize=128)
def unit_inverses(m: int) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """Return the units b mod m and their inverses as parallel arrays.

    For m = 1 the single class 0 counts as a unit.
    """
    if m < 1:
        raise DomainError(f"modulus must be positive, got {m}")
    if m == 1:
        zero = np.zeros(1, dtype=np.int64)
        zero.setflags(write=False)
        return zero, zero
    residues = np.arange(m, dtype=np.int64)
    units = residues[np.gcd(residues, m) == 1]
    inverses = powmod_array(units, euler_phi(m) - 1, m)
    units.setflags(write=False)
    inverses.setflags(write=False)
    return units, inverses


@lru_cache(maxsize=32)
def roots_of_unity(m: int) -> npt.NDArray[np.complex128]:
    """Return e(j/m) for j = 0..m-1."""
    roots = np.exp(2j * np.pi * np.arange(m) / m)
    roots.setflags(write=False)
    return roots
