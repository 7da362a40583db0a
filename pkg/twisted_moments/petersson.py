"""Geometric side of the Petersson formula and harmonic weights."""
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from math import factorial, gcd, log, pi, sqrt

import numpy as np
import numpy.typing as npt

from .arith import is_prime, primes_up_to
from .const import (
    C_MAX_LIMIT,
    C_MAX_MODE_CERTIFIED,
    C_MAX_MODE_FIXED,
    CONDITION_LIMIT,
    DEFAULT_C_MAX,
    DEFAULT_TAIL_TOLERANCE,
)
from .eigendata import NewformEigendata
from .exceptions import (
    DomainError,
    IllConditionedError,
    NonPositiveWeightError,
    NotCoprimeError,
    TailBudgetExceededError,
)
from .exp_sums import kloosterman_matrix
from .special import bessel_J

_LOGGER = logging.getLogger(__name__)


def _check_level_weight(q: int, k: int) -> None:
    if not is_prime(q):
        raise DomainError(f"q={q} is not prime")
    if k < 2 or k % 2:
        raise DomainError(f"weight {k} is not even and >= 2")


def tail_bound(m: int, n: int, q: int, k: int, c_max: int) -> float:
    """Return a rigorous bound for the terms c > c_max of the c-sum.

    Uses |S(m, n; cq)| <= 2 tau(c) sqrt(gcd(m, n)) sqrt(cq) and
    |J_{k-1}(x)| <= (x/2)^(k-1)/(k-1)!, then sum_{c > C} tau(c) c^-s with
    s = k - 1/2 by partial summation against sum_{c <= x} tau(c) <= x(log x + 1).
    """
    _check_level_weight(q, k)
    if c_max < 1:
        raise DomainError(f"c_max must be positive, got {c_max}")
    s = k - 0.5
    amplitude = (
        4
        * pi
        * sqrt(gcd(m, n))
        / sqrt(q)
        * (2 * pi * sqrt(m * n) / q) ** (k - 1)
        / factorial(k - 1)
    )
    shifted = s - 1
    divisor_tail = (
        s
        * c_max ** (1 - s)
        * (log(c_max) / shifted + 1 / shifted**2 + 1 / shifted)
    )
    return amplitude * divisor_tail


@dataclass(frozen=True)
class CMaxPolicy:
    """How the c-sum of the geometric side is truncated."""

    mode: str = C_MAX_MODE_CERTIFIED
    tolerance: float = DEFAULT_TAIL_TOLERANCE
    c_max: int = DEFAULT_C_MAX

    def __post_init__(self) -> None:
        if self.mode not in (C_MAX_MODE_CERTIFIED, C_MAX_MODE_FIXED):
            raise DomainError(f"unknown c_max mode {self.mode!r}")
        if not 1 <= self.c_max <= C_MAX_LIMIT:
            raise DomainError(f"c_max={self.c_max} outside [1, {C_MAX_LIMIT}]")
        if self.tolerance <= 0:
            raise DomainError(f"tolerance must be positive, got {self.tolerance}")

    @classmethod
    def certified(cls, tolerance: float = DEFAULT_TAIL_TOLERANCE) -> "CMaxPolicy":
        """Return the policy certifying tail_bound <= tolerance."""
        return cls(mode=C_MAX_MODE_CERTIFIED, tolerance=tolerance)

    @classmethod
    def fixed(cls, c_max: int) -> "CMaxPolicy":
        """Return the policy truncating at an explicit c_max."""
        return cls(mode=C_MAX_MODE_FIXED, c_max=c_max)

    def resolve(self, m: int, n: int, q: int, k: int) -> int:
        """Return the truncation point for the pair (m, n)."""
        if self.mode == C_MAX_MODE_FIXED:
            return self.c_max
        if tail_bound(m, n, q, k, C_MAX_LIMIT) > self.tolerance:
            raise TailBudgetExceededError(
                f"tail bound above {self.tolerance:g} for every c_max <= "
                f"{C_MAX_LIMIT} at (m, n, q, k) = ({m}, {n}, {q}, {k})"
            )
        lower, upper = 0, 1
        while tail_bound(m, n, q, k, upper) > self.tolerance:
            lower, upper = upper, min(2 * upper, C_MAX_LIMIT)
        while upper - lower > 1:
            middle = (lower + upper) // 2
            if tail_bound(m, n, q, k, middle) > self.tolerance:
                lower = middle
            else:
                upper = middle
        return upper


@dataclass(frozen=True)
class GeometricSideValue:
    """Truncated geometric side Delta(m, n) of the Petersson formula."""

    m: int
    n: int
    level: int
    weight: int
    c_max: int
    value: float
    tail_bound: float


def geometric_side_many(
    pairs: Sequence[tuple[int, int]],
    q: int,
    k: int,
    policy: CMaxPolicy | None = None,
) -> list[GeometricSideValue]:
    """Return Delta(m, n) for many pairs with one shared loop over c."""
    _check_level_weight(q, k)
    policy = policy or CMaxPolicy()
    if any(m < 1 or n < 1 for m, n in pairs):
        raise DomainError("m and n must be positive")
    if not pairs:
        return []
    cutoffs = np.array([policy.resolve(m, n, q, k) for m, n in pairs])
    ms = sorted({m for m, _ in pairs})
    ns = sorted({n for _, n in pairs})
    rows = np.array([ms.index(m) for m, _ in pairs])
    cols = np.array([ns.index(n) for _, n in pairs])
    products = np.array([m * n for m, n in pairs], dtype=np.float64)
    totals = np.zeros(len(pairs))
    for c in range(1, int(cutoffs.max()) + 1):
        active = cutoffs >= c
        modulus = c * q
        sums = kloosterman_matrix(ms, ns, modulus)[rows, cols]
        argument = 4 * pi * np.sqrt(products) / modulus
        terms = sums / modulus * bessel_J(k - 1, argument)
        totals += np.where(active, terms, 0.0)
    sign = -1.0 if (k // 2) % 2 else 1.0
    values = [
        GeometricSideValue(
            m=m,
            n=n,
            level=q,
            weight=k,
            c_max=int(cutoff),
            value=float(m == n) + 2 * pi * sign * float(total),
            tail_bound=tail_bound(m, n, q, k, int(cutoff)),
        )
        for (m, n), cutoff, total in zip(pairs, cutoffs, totals)
    ]
    _LOGGER.debug(
        "Geometric side at q=%d k=%d for %d pairs, c_max up to %d",
        q,
        k,
        len(pairs),
        int(cutoffs.max()),
    )
    return values


def geometric_side(
    m: int, n: int, q: int, k: int, c_max: int | CMaxPolicy | None = None
) -> GeometricSideValue:
    """Return Delta(m, n) = delta + 2 pi i^-k sum S(m,n;cq)/(cq) J_{k-1}(.)."""
    policy = CMaxPolicy.fixed(c_max) if isinstance(c_max, int) else c_max
    return geometric_side_many([(m, n)], q, k, policy)[0]


@dataclass(frozen=True)
class HarmonicWeights:
    """Petersson weights omega_f recovered from the trace formula."""

    level: int
    weight: int
    weights: tuple[float, ...]
    probes: tuple[int, ...]
    condition_number: float
    policy: CMaxPolicy

    @property
    def implied_l1_sym2(self) -> tuple[float, ...]:
        """Return 2 pi^2 / (q (k-1) omega_f) for every form."""
        return tuple(
            2 * pi**2 / (self.level * (self.weight - 1) * omega)
            for omega in self.weights
        )


def default_probes(q: int, count: int) -> list[int]:
    """Return 1 followed by the first primes coprime to q."""
    probes = [1]
    bound = 16
    while len(probes) < count:
        probes = [1] + [ell for ell in primes_up_to(bound) if ell != q]
        bound *= 2
    return probes[:count]


def _check_forms(forms: Sequence[NewformEigendata], q: int, k: int) -> None:
    if not forms:
        raise DomainError("no forms given")
    for form in forms:
        if form.level != q or form.weight != k:
            raise DomainError(
                f"form {form.label} does not belong to level {q} weight {k}"
            )


def solve_harmonic_weights(
    forms: Sequence[NewformEigendata],
    q: int,
    k: int,
    probe_indices: Sequence[int] | None = None,
    policy: CMaxPolicy | None = None,
) -> HarmonicWeights:
    """Solve sum_f omega_f lambda_f(n_j) = Delta(n_j, 1) for the weights."""
    _check_level_weight(q, k)
    _check_forms(forms, q, k)
    policy = policy or CMaxPolicy()
    probes = list(probe_indices or default_probes(q, len(forms)))
    if len(probes) != len(forms):
        raise DomainError(f"{len(probes)} probes for {len(forms)} forms")
    for probe in probes:
        if gcd(probe, q) != 1:
            raise NotCoprimeError(f"probe {probe} shares a factor with {q}")

    matrix = np.array([[form(probe) for form in forms] for probe in probes])
    condition = float(np.linalg.cond(matrix))
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise IllConditionedError(
            f"eigenvalue matrix at probes {probes} has condition {condition:.3g}"
        )
    geometric = geometric_side_many([(probe, 1) for probe in probes], q, k, policy)
    rhs = np.array([value.value for value in geometric])
    weights = np.linalg.solve(matrix, rhs)
    for index, omega in enumerate(weights):
        if omega <= 0:
            raise NonPositiveWeightError(
                f"omega={omega:.6g} for form {forms[index].label}"
            )

    result = HarmonicWeights(
        level=q,
        weight=k,
        weights=tuple(float(omega) for omega in weights),
        probes=tuple(probes),
        condition_number=condition,
        policy=policy,
    )
    for form, omega, l_value in zip(forms, result.weights, result.implied_l1_sym2):
        _LOGGER.info(
            "Form %s: omega=%.6g, implied L(1, sym^2 f)=%.6g",
            form.label,
            omega,
            l_value,
        )
    return result


def spectral_side(
    weights: HarmonicWeights, forms: Sequence[NewformEigendata], m: int, n: int
) -> float:
    """Return sum_f omega_f lambda_f(m) lambda_f(n)."""
    return float(
        sum(omega * form(m) * form(n) for omega, form in zip(weights.weights, forms))
    )


def trace_residual(
    weights: HarmonicWeights,
    forms: Sequence[NewformEigendata],
    pairs: Iterable[tuple[int, int]],
    policy: CMaxPolicy | None = None,
) -> float:
    """Return the largest held-out gap between spectral and geometric sides."""
    _check_forms(forms, weights.level, weights.weight)
    q = weights.level
    pairs = list(pairs)
    for m, n in pairs:
        if gcd(m * n, q) != 1:
            raise NotCoprimeError(f"pair ({m}, {n}) shares a factor with {q}")
        if {m, n} <= {1} | set(weights.probes) and 1 in (m, n):
            raise DomainError(f"pair ({m}, {n}) was used to solve the weights")
    geometric = geometric_side_many(
        pairs, q, weights.weight, policy or weights.policy
    )
    return max(
        (
            abs(spectral_side(weights, forms, value.m, value.n) - value.value)
            for value in geometric
        ),
        default=0.0,
    )


def delta_matrix(
    indices: Sequence[int], q: int, k: int, policy: CMaxPolicy | None = None
) -> npt.NDArray[np.float64]:
    """Return the symmetric matrix Delta(indices[i], indices[j])."""
    pairs = [
        (m, n) for i, m in enumerate(indices) for n in indices[i:]
    ]
    values = {
        (value.m, value.n): value.value
        for value in geometric_side_many(pairs, q, k, policy)
    }
    size = len(indices)
    matrix = np.empty((size, size))
    for i, m in enumerate(indices):
        for j, n in enumerate(indices):
            matrix[i, j] = values[(m, n) if i <= j else (n, m)]
    return matrix
