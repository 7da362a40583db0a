"""Kloosterman sums and complete character sum identities.

Every closed form here has a brute-force counterpart. The orientation of the
character factors and the sign of the congruence in the Poisson dual sum are
not hard-coded: they are fixed once per process by comparing the candidates
against the brute-force sums (see resolve_conventions).
"""
import logging
from dataclasses import dataclass
from enum import StrEnum
from functools import cache
from math import gcd, pi, sqrt

import numpy as np
import numpy.typing as npt

from .arith import (
    additive_character,
    divisor_count,
    is_prime,
    roots_of_unity,
    unit_inverses,
)
from .characters import DirichletCharacter, gauss_sum
from .const import BRUTE_FORCE_BUDGET, TOL_IDENTITY
from .exceptions import (
    ConventionUnresolvedError,
    DomainError,
    NotCoprimeError,
    OverflowBudgetError,
)

_LOGGER = logging.getLogger(__name__)


class CharacterOrientation(StrEnum):
    """Which of the two arguments carries chi in a closed form."""

    CHI_AT_M1 = "chi(m1)"
    CHI_BAR_AT_M1 = "conj(chi)(m1)"


@dataclass(frozen=True)
class SignConventions:
    """Oracle-resolved orientations of the closed forms."""

    twisted_sum: CharacterOrientation
    poisson_dual: CharacterOrientation
    congruence_sign: int

    def describe(self) -> str:
        """Return the conventions as report text."""
        return (
            f"twisted_sum={self.twisted_sum.value};"
            f"poisson_dual={self.poisson_dual.value};"
            f"congruence_sign={self.congruence_sign:+d}"
        )


@dataclass(frozen=True)
class KloostermanValue:
    """Kloosterman sum S(m, n; c)."""

    m: int
    n: int
    c: int
    value: float
    imaginary: float = 0.0

    @property
    def weil_bound(self) -> float:
        """Return tau(c) gcd(m, n, c)^(1/2) c^(1/2)."""
        return weil_bound(self.m, self.n, self.c)


@dataclass(frozen=True)
class TwistedSumParams:
    """Parameters of the complete sum over a mod cpq."""

    c: int
    q: int
    p: int
    n2: int
    m1: int
    chi: DirichletCharacter

    def __post_init__(self) -> None:
        if self.c < 1:
            raise DomainError(f"c must be positive, got {self.c}")
        if not (is_prime(self.q) and is_prime(self.p)):
            raise DomainError(f"q={self.q} and p={self.p} must be prime")
        if self.chi.modulus != self.p:
            raise DomainError(
                f"character modulus {self.chi.modulus} differs from p={self.p}"
            )
        if gcd(self.c, self.p) != 1:
            raise NotCoprimeError(f"gcd(c, p) > 1 for c={self.c}, p={self.p}")
        if self.q == self.p:
            raise NotCoprimeError(f"q and p coincide ({self.q})")


def weil_bound(m: int, n: int, c: int) -> float:
    """Return the Weil bound for |S(m, n; c)|."""
    return divisor_count(c) * sqrt(gcd(gcd(m, n), c)) * sqrt(c)


def kloosterman(m: int, n: int, c: int) -> KloostermanValue:
    """Return S(m, n; c) summed over the units b mod c."""
    if c < 1:
        raise DomainError(f"c must be positive, got {c}")
    units, inverses = unit_inverses(c)
    phases = ((m % c) * units + (n % c) * inverses) % c
    total = np.sum(np.exp(2j * pi * phases / c))
    return KloostermanValue(m, n, c, float(total.real), float(total.imag))


def kloosterman_matrix(
    ms: npt.ArrayLike, ns: npt.ArrayLike, c: int
) -> npt.NDArray[np.float64]:
    """Return the matrix S(ms[i], ns[j]; c)."""
    units, inverses = unit_inverses(c)
    roots = roots_of_unity(c)
    m_arr = np.asarray(ms, dtype=np.int64) % c
    n_arr = np.asarray(ns, dtype=np.int64) % c
    left = roots[(m_arr[:, None] * units[None, :]) % c]
    right = roots[(n_arr[:, None] * inverses[None, :]) % c]
    return np.asarray((left @ right.T).real, dtype=np.float64)


def _twisted_sum_lhs(params: TwistedSumParams) -> complex:
    modulus = params.c * params.q
    full = modulus * params.p
    if full * modulus > BRUTE_FORCE_BUDGET:
        raise OverflowBudgetError(
            f"cpq*cq = {full * modulus} exceeds {BRUTE_FORCE_BUDGET}"
        )
    units, inverses = unit_inverses(modulus)
    roots = roots_of_unity(modulus)
    residues = np.arange(modulus, dtype=np.int64)
    # S(a, n2; cq) depends on a mod cq only
    phases = residues[:, None] * units[None, :] + (params.n2 % modulus) * inverses
    kloosterman_row = roots[phases % modulus].sum(axis=1)
    a = np.arange(full, dtype=np.int64)
    twist = np.exp(2j * pi * ((a * (params.m1 % full)) % full) / full)
    return complex(np.sum(kloosterman_row[a % modulus] * params.chi.at(a) * twist))


def _twisted_sum_rhs(
    params: TwistedSumParams, orientation: CharacterOrientation
) -> complex:
    modulus = params.c * params.q
    if gcd(params.m1, modulus) != 1:
        return 0j
    chi = params.chi
    m1_bar = pow(params.m1, -1, modulus)
    if orientation is CharacterOrientation.CHI_AT_M1:
        factor = chi(params.m1) * chi.conjugate()(modulus)
    else:
        factor = chi.conjugate()(params.m1) * chi(modulus)
    return (
        modulus
        * gauss_sum(chi).value
        * additive_character(-params.n2 * params.p * m1_bar, modulus)
        * factor
    )


def twisted_sum_identity(
    params: TwistedSumParams, orientation: CharacterOrientation | None = None
) -> tuple[complex, complex, float]:
    """Compare the complete sum over a mod cpq with its closed form.

    The left side is the brute-force sum of S(a, n2; cq) chi(a) e(a m1/(cpq));
    the right side is cq tau(chi) e(-n2 p inv(m1)/cq) times the character factor
    in m1 and cq, and vanishes unless gcd(m1, cq) = 1.
    """
    if orientation is None:
        orientation = resolve_conventions().twisted_sum
    lhs = _twisted_sum_lhs(params)
    rhs = _twisted_sum_rhs(params, orientation)
    return lhs, rhs, abs(lhs - rhs)


def reciprocity_identity(n2: int, p: int, c: int, q: int, m1: int) -> float:
    """Return |e(n2 p/(cq m1)) - e(n2 p inv(m1)/cq) e(n2 p inv(cq)/m1)|."""
    modulus = c * q
    if m1 == 0 or gcd(m1, modulus) != 1:
        raise NotCoprimeError(f"gcd({m1}, {modulus}) > 1")
    m1_bar = pow(m1, -1, modulus)
    modulus_bar = pow(modulus, -1, abs(m1)) if abs(m1) > 1 else 0
    lhs = additive_character(n2 * p, modulus * m1)
    rhs = additive_character(n2 * p * m1_bar, modulus) * additive_character(
        n2 * p * modulus_bar, m1
    )
    return abs(lhs - rhs)


def _poisson_dual_brute(
    m1: int, p: int, c: int, q: int, m2: int, chi: DirichletCharacter
) -> complex:
    cq_bar = pow(c * q, -1, m1) if m1 > 1 else 0
    p_bar = pow(p, -1, m1) if m1 > 1 else 0
    m1_bar = pow(m1, -1, p)
    b1 = np.arange(m1, dtype=np.int64)
    b2 = np.arange(p, dtype=np.int64)
    first = np.exp(2j * pi * ((b1 * ((p * cq_bar + m2 * p_bar) % m1)) % m1) / m1)
    second = chi.conjugate().at(b2) * np.exp(
        2j * pi * ((b2 * ((m2 * m1_bar) % p)) % p) / p
    )
    return complex(np.sum(np.outer(first, second)))


def _poisson_dual_closed(
    m1: int,
    p: int,
    c: int,
    q: int,
    m2: int,
    chi: DirichletCharacter,
    orientation: CharacterOrientation,
    sign: int,
) -> complex:
    q_bar = pow(q, -1, m1) if m1 > 1 else 0
    if (c * m2 - sign * p * p * q_bar) % m1 != 0:
        return 0j
    conj = chi.conjugate()
    if orientation is CharacterOrientation.CHI_AT_M1:
        factor = chi(m1) * conj(m2)
    else:
        factor = conj(m1) * chi(m2)
    return m1 * gauss_sum(conj).value * factor


def _check_poisson_dual_args(m1: int, p: int, c: int, q: int) -> None:
    if m1 < 1:
        raise DomainError(f"m1 must be positive, got {m1}")
    if gcd(m1, p) != 1:
        raise NotCoprimeError(f"gcd(m1, p) > 1 for m1={m1}, p={p}")
    if gcd(m1, c * q) != 1:
        raise NotCoprimeError(f"gcd(m1, cq) > 1 for m1={m1}, cq={c * q}")


def poisson_n2_identity(
    m1: int,
    p: int,
    c: int,
    q: int,
    m2: int,
    chi: DirichletCharacter,
) -> tuple[complex, complex, float, int]:
    """Compare the dual sum of the Poisson step in n2 with its closed form.

    Returns (brute force, closed form, residual, congruence sign).
    """
    _check_poisson_dual_args(m1, p, c, q)
    conventions = resolve_conventions()
    brute = _poisson_dual_brute(m1, p, c, q, m2, chi)
    closed = _poisson_dual_closed(
        m1,
        p,
        c,
        q,
        m2,
        chi,
        conventions.poisson_dual,
        conventions.congruence_sign,
    )
    return brute, closed, abs(brute - closed), conventions.congruence_sign


# (c, q, p, n2, m1, exponent); complex characters separate the orientations
_TWISTED_SUM_PROBES: tuple[tuple[int, int, int, int, int, int], ...] = (
    (1, 3, 5, 1, 1, 1),
    (2, 3, 5, 2, 1, 1),
    (1, 7, 5, 3, 2, 3),
    (1, 3, 7, 1, 2, 1),
)
# (m1, p, c, q, exponent); m1 > 2 separates the two congruence classes
_POISSON_DUAL_PROBES: tuple[tuple[int, int, int, int, int], ...] = (
    (7, 5, 1, 3, 1),
    (8, 5, 1, 3, 1),
    (9, 7, 2, 5, 1),
)


def _resolve_twisted_sum() -> CharacterOrientation:
    probes = [
        TwistedSumParams(c, q, p, n2, m1, DirichletCharacter(p, a))
        for c, q, p, n2, m1, a in _TWISTED_SUM_PROBES
    ]
    lhs = [_twisted_sum_lhs(params) for params in probes]
    fitting = [
        orientation
        for orientation in CharacterOrientation
        if max(
            abs(value - _twisted_sum_rhs(params, orientation))
            for params, value in zip(probes, lhs)
        )
        < TOL_IDENTITY
    ]
    if len(fitting) != 1:
        raise ConventionUnresolvedError(
            f"twisted sum orientation not determined, candidates fitting: {fitting}"
        )
    return fitting[0]


def _resolve_poisson_dual() -> tuple[CharacterOrientation, int]:
    fitting: list[tuple[CharacterOrientation, int]] = []
    for orientation in CharacterOrientation:
        for sign in (1, -1):
            worst = 0.0
            for m1, p, c, q, a in _POISSON_DUAL_PROBES:
                chi = DirichletCharacter(p, a)
                for m2 in range(1, m1 * p + 1):
                    brute = _poisson_dual_brute(m1, p, c, q, m2, chi)
                    closed = _poisson_dual_closed(
                        m1, p, c, q, m2, chi, orientation, sign
                    )
                    worst = max(worst, abs(brute - closed))
            if worst < TOL_IDENTITY:
                fitting.append((orientation, sign))
    if len(fitting) != 1:
        raise ConventionUnresolvedError(
            f"Poisson dual convention not determined, candidates fitting: {fitting}"
        )
    return fitting[0]


@cache
def resolve_conventions() -> SignConventions:
    """Fix the closed-form conventions against the brute-force oracles."""
    twisted = _resolve_twisted_sum()
    dual, sign = _resolve_poisson_dual()
    conventions = SignConventions(twisted, dual, sign)
    _LOGGER.info("Resolved sign conventions: %s", conventions.describe())
    return conventions
