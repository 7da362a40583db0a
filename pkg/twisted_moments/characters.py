"""Dirichlet characters of prime modulus and their Gauss sums."""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import numpy.typing as npt

from .arith import is_prime, primitive_root, roots_of_unity
from .exceptions import DomainError


@lru_cache(maxsize=64)
def discrete_log_table(p: int) -> npt.NDArray[np.int64]:
    """Return ind_g(n) for n mod p with the least primitive root g.

    The entry for n = 0 is -1.
    """
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    g = primitive_root(p)
    table = np.full(p, -1, dtype=np.int64)
    power = 1
    for index in range(p - 1):
        table[power] = index
        power = power * g % p
    table.setflags(write=False)
    return table


@lru_cache(maxsize=512)
def _value_table(p: int, exponent: int) -> npt.NDArray[np.complex128]:
    logs = discrete_log_table(p)
    order = p - 1
    values = np.where(
        logs >= 0,
        np.exp(2j * np.pi * ((exponent * logs) % order) / order),
        0.0,
    )
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class DirichletCharacter:
    """Character chi(n) = e(a ind_g(n)/(p-1)) modulo a prime p."""

    modulus: int
    exponent: int
    generator: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if not is_prime(self.modulus):
            raise DomainError(f"modulus {self.modulus} is not prime")
        if not 0 <= self.exponent < max(self.modulus - 1, 1):
            raise DomainError(
                f"exponent {self.exponent} outside [0, {self.modulus - 1})"
            )
        object.__setattr__(self, "generator", primitive_root(self.modulus))

    @property
    def label(self) -> str:
        """Return the canonical "p:a" label."""
        return f"{self.modulus}:{self.exponent}"

    @property
    def is_primitive(self) -> bool:
        """Return True for nontrivial characters."""
        return self.exponent != 0

    @property
    def is_real(self) -> bool:
        """Return True if the character takes only real values."""
        return (2 * self.exponent) % max(self.modulus - 1, 1) == 0

    @property
    def values(self) -> npt.NDArray[np.complex128]:
        """Return chi(n) for n = 0..p-1."""
        return _value_table(self.modulus, self.exponent)

    def conjugate(self) -> "DirichletCharacter":
        """Return the conjugate character with exponent p-1-a."""
        order = max(self.modulus - 1, 1)
        return DirichletCharacter(self.modulus, (order - self.exponent) % order)

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.modulus])

    def at(self, n: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """Evaluate on an integer array."""
        return self.values[np.asarray(n, dtype=np.int64) % self.modulus]


@dataclass(frozen=True)
class GaussSumValue:
    """Gauss sum of a character."""

    value: complex
    character: DirichletCharacter

    @property
    def magnitude_defect(self) -> float:
        """Return ||tau|^2 - p|, zero for primitive characters."""
        return abs(abs(self.value) ** 2 - self.character.modulus)


def evaluate(chi: DirichletCharacter, n: int) -> complex:
    """Return chi(n)."""
    return chi(n)


def twisted_gauss_sum(chi: DirichletCharacter, b: int) -> complex:
    """Return sum over a mod p of chi(a) e(ab/p)."""
    p = chi.modulus
    roots = roots_of_unity(p)
    residues = np.arange(p, dtype=np.int64)
    b %= p
    return complex(np.sum(chi.values * roots[(residues * b) % p]))


def gauss_sum(chi: DirichletCharacter) -> GaussSumValue:
    """Return tau(chi) = sum over a mod p of chi(a) e(a/p)."""
    return GaussSumValue(twisted_gauss_sum(chi, 1), chi)


def primitive_characters(p: int) -> list[DirichletCharacter]:
    """Return the nontrivial characters mod p in exponent order."""
    return [DirichletCharacter(p, a) for a in range(1, p - 1)]


def parse_character_label(label: str) -> DirichletCharacter:
    """Parse a "p:a" label."""
    try:
        modulus, exponent = (int(part) for part in label.split(":"))
    except ValueError as ex:
        raise DomainError(f"invalid character label {label!r}") from ex
    return DirichletCharacter(modulus, exponent)
