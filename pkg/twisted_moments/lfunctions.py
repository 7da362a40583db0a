"""Central values of twisted L-functions and their moments."""
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum
from math import ceil, inf, pi, sqrt

import numpy as np
import numpy.typing as npt

from .arith import PrimePair, divisor_counts
from .characters import DirichletCharacter, gauss_sum
from .const import (
    BESSEL_CROSSOVER,
    DEFAULT_AFE_LENGTH_MULTIPLIER,
    TOL_DUAL,
    TOL_DUAL_OFF_DIAGONAL,
    TOL_ROOT_NUMBER,
)
from .eigendata import NewformEigendata
from .exceptions import (
    DomainError,
    EigendataTooShortError,
    NotCoprimeError,
    NumericallyUnstableError,
    SystemSingularError,
)
from .exp_sums import kloosterman_matrix
from .petersson import CMaxPolicy, HarmonicWeights, tail_bound
from .special import DyadicCutoff, afe_cutoff_point, bessel_J, weight_V_array

_LOGGER = logging.getLogger(__name__)

# Balance parameters of the root number solve; the third one is a check.
BALANCE_POINTS = (1.0, 1.25, 0.8)
_UNSTABLE = 1e-4


class Weighting(StrEnum):
    """Weighting of a moment over the newforms."""

    NATURAL = "natural"
    HARMONIC = "harmonic"


@dataclass(frozen=True)
class AfeSums:
    """The two smoothed sums of the balanced approximate functional equation."""

    first: complex
    second: complex
    balance: float
    length: int
    error_estimate: float


def _check_pair(form: NewformEigendata, chi: DirichletCharacter) -> PrimePair:
    if form.level == chi.modulus:
        raise NotCoprimeError(
            f"level {form.level} and character modulus {chi.modulus} coincide"
        )
    return PrimePair(form.level, chi.modulus)


def _conductor_root(form: NewformEigendata, chi: DirichletCharacter) -> float:
    """Return the square root of the conductor of f x chi."""
    pair = _check_pair(form, chi)
    if chi.is_primitive:
        return pair.balance_point
    return sqrt(pair.q)


def _twist(
    chi: DirichletCharacter, n: npt.NDArray[np.int64]
) -> npt.NDArray[np.complex128]:
    # the principal character twists by nothing; its Euler factor at p is
    # restored in central_value
    if chi.is_primitive:
        return chi.at(n)
    return np.ones(n.shape, dtype=np.complex128)


def afe_length(
    form: NewformEigendata,
    chi: DirichletCharacter,
    balance: float = 1.0,
    afe_length_multiplier: float = DEFAULT_AFE_LENGTH_MULTIPLIER,
) -> int:
    """Return the number of terms kept before V drops below the cutoff."""
    conductor_root = _conductor_root(form, chi)
    stretch = max(balance, 1 / balance)
    return int(
        ceil(
            afe_length_multiplier
            * conductor_root
            * stretch
            * afe_cutoff_point(form.weight)
        )
    )


def eigendata_length(
    q: int,
    p: int,
    k: int,
    afe_length_multiplier: float = DEFAULT_AFE_LENGTH_MULTIPLIER,
) -> int:
    """Return how many coefficients the central values and moments at (q, p) read."""
    conductor_root = PrimePair(q, p).balance_point
    stretch = max(max(balance, 1 / balance) for balance in BALANCE_POINTS)
    cutoff = afe_cutoff_point(k)
    return max(
        int(ceil(afe_length_multiplier * conductor_root * stretch * cutoff)),
        int(ceil(conductor_root * cutoff)),
        p,
    )


def _require_length(form: NewformEigendata, length: int) -> None:
    if length > form.n_max:
        raise EigendataTooShortError(length, form.n_max)


def afe_sums(
    form: NewformEigendata,
    chi: DirichletCharacter,
    balance: float = 1.0,
    afe_length_multiplier: float = DEFAULT_AFE_LENGTH_MULTIPLIER,
) -> AfeSums:
    """Return the sums of lambda chi(n) n^-1/2 V(n/(QX)) and its dual at X.

    The error estimate bounds the next block of terms with |lambda| <= tau.
    """
    if balance <= 0:
        raise DomainError(f"balance parameter must be positive, got {balance}")
    conductor_root = _conductor_root(form, chi)
    length = afe_length(form, chi, balance, afe_length_multiplier)
    _require_length(form, length)

    n = np.arange(1, length + 1)
    scaled = form.lambdas[1 : length + 1] / np.sqrt(n)
    values = _twist(chi, n)
    first_weights = weight_V_array(form.weight, n / (conductor_root * balance))
    second_weights = weight_V_array(form.weight, n * balance / conductor_root)
    first = complex(np.sum(scaled * values * first_weights))
    second = complex(np.sum(scaled * np.conj(values) * second_weights))

    tail_n = np.arange(length + 1, 2 * length + 1)
    tail = divisor_counts(2 * length)[length + 1 :] / np.sqrt(tail_n)
    envelope = weight_V_array(
        form.weight, tail_n / (conductor_root * balance)
    ) + weight_V_array(form.weight, tail_n * balance / conductor_root)
    return AfeSums(
        first=first,
        second=second,
        balance=balance,
        length=length,
        error_estimate=float(np.sum(tail * envelope)),
    )


def _solve(first: AfeSums, second: AfeSums) -> complex:
    if abs(first.balance - second.balance) < 1e-6:
        raise SystemSingularError(
            f"balance points {first.balance} and {second.balance} coincide"
        )
    denominator = second.second - first.second
    scale = max(abs(first.second), abs(second.second), 1.0)
    if abs(denominator) < 1e-12 * scale:
        raise SystemSingularError("dual sums agree at both balance points")
    return (first.first - second.first) / denominator


@dataclass(frozen=True)
class RootNumberSolve:
    """Root number from two balance points with a third as a check."""

    value: complex
    consistency: float

    @property
    def modulus_defect(self) -> float:
        """Return ||epsilon| - 1|."""
        return abs(abs(self.value) - 1.0)


def solve_root_number(
    form: NewformEigendata,
    chi: DirichletCharacter,
    balance_points: Sequence[float] = BALANCE_POINTS,
    afe_length_multiplier: float = DEFAULT_AFE_LENGTH_MULTIPLIER,
) -> RootNumberSolve:
    """Solve the 2x2 AFE system for epsilon and recheck it at a third point."""
    if len(balance_points) < 2:
        raise DomainError("at least two balance points are needed")
    sums = [
        afe_sums(form, chi, balance, afe_length_multiplier)
        for balance in balance_points
    ]
    epsilon = _solve(sums[0], sums[1])
    if abs(abs(epsilon) - 1.0) > _UNSTABLE:
        raise NumericallyUnstableError(
            f"|epsilon| = {abs(epsilon):.9f} for {form.label} x {chi.label}"
        )
    consistency = max(
        (abs(_solve(sums[0], other) - epsilon) for other in sums[2:]), default=0.0
    )
    if consistency > _UNSTABLE:
        raise NumericallyUnstableError(
            f"third balance point moves epsilon by {consistency:.3g}"
        )
    if consistency > TOL_ROOT_NUMBER:
        _LOGGER.warning(
            "Root number of %s x %s consistent only to %.3g",
            form.label,
            chi.label,
            consistency,
        )
    return RootNumberSolve(epsilon, consistency)


def root_number(form: NewformEigendata, chi: DirichletCharacter) -> complex:
    """Return epsilon(f x chi) from the two balance point solve."""
    return solve_root_number(form, chi).value


def root_number_closed_form(form: NewformEigendata, chi: DirichletCharacter) -> complex:
    """Return i^k w_q chi(q) tau(chi)^2 / p, with w_q the Fricke sign."""
    _check_pair(form, chi)
    if not chi.is_primitive:
        return complex(1j**form.weight * form.fricke_sign)
    tau = gauss_sum(chi).value
    return complex(
        1j**form.weight * form.fricke_sign * chi(form.level) * tau * tau / chi.modulus
    )


@dataclass(frozen=True)
class CentralValue:
    """L(1/2, f x chi) from the balanced approximate functional equation."""

    form: NewformEigendata
    character: DirichletCharacter
    value: complex
    root_number: complex
    afe_length: int
    error_estimate: float
    first: complex
    second: complex


def central_value(
    form: NewformEigendata,
    chi: DirichletCharacter,
    afe_length_multiplier: float = DEFAULT_AFE_LENGTH_MULTIPLIER,
    epsilon: complex | None = None,
) -> CentralValue:
    """Return L(1/2, f x chi) = A + epsilon B at the natural balance point.

    For the principal character this is L(1/2, f) times its inverse Euler
    factor at p.
    """
    if epsilon is None:
        epsilon = root_number(form, chi)
    sums = afe_sums(form, chi, 1.0, afe_length_multiplier)
    value = sums.first + epsilon * sums.second
    if not chi.is_primitive:
        p = chi.modulus
        _require_length(form, p)
        value *= 1 - form(p) / sqrt(p) + 1 / p
    return CentralValue(
        form=form,
        character=chi,
        value=value,
        root_number=epsilon,
        afe_length=sums.length,
        error_estimate=sums.error_estimate,
        first=sums.first,
        second=sums.second,
    )


def afe_bound_check(value: CentralValue) -> tuple[float, float]:
    """Return (|A + eps B|^2, 2(|A|^2 + |B|^2)); the first never exceeds the second."""
    return (
        abs(value.first + value.root_number * value.second) ** 2,
        2 * (abs(value.first) ** 2 + abs(value.second) ** 2),
    )


@dataclass(frozen=True)
class MomentValue:
    """Second moment over the newforms of a level."""

    q: int
    p: int
    k: int
    character: int
    moment: float
    weighting: Weighting
    dim: int

    @property
    def ratio(self) -> float:
        """Return moment / (q + p)."""
        return self.moment / (self.q + self.p)


def _check_forms(forms: Sequence[NewformEigendata]) -> tuple[int, int]:
    if not forms:
        raise DomainError("no forms given")
    levels = {(form.level, form.weight) for form in forms}
    if len(levels) != 1:
        raise DomainError(f"forms mix levels and weights: {sorted(levels)}")
    return levels.pop()


def smoothed_sum(
    form: NewformEigendata,
    chi: DirichletCharacter,
    length: float,
    cutoff: DyadicCutoff | None = None,
) -> complex:
    """Return sum chi(n) lambda(n) W(n/N), W the AFE weight unless a cutoff is given."""
    if length <= 0:
        raise DomainError(f"length must be positive, got {length}")
    if cutoff is None:
        terms = int(ceil(length * afe_cutoff_point(form.weight)))
    else:
        terms = int(ceil(length * cutoff.upper))
    _require_length(form, terms)
    n = np.arange(1, terms + 1)
    if cutoff is None:
        weights = weight_V_array(form.weight, n / length)
    else:
        weights = cutoff(n / length)
    return complex(np.sum(chi.at(n) * form.lambdas[1 : terms + 1] * weights))


def twisted_moment(
    forms: Sequence[NewformEigendata],
    chi: DirichletCharacter,
    weighting: Weighting = Weighting.NATURAL,
    weights: HarmonicWeights | None = None,
    afe_length_multiplier: float = DEFAULT_AFE_LENGTH_MULTIPLIER,
    central_values: Sequence[CentralValue] | None = None,
) -> MomentValue:
    """Return the natural or harmonic second moment of the twists by chi.

    natural:  sum_f |L(1/2, f x chi)|^2
    harmonic: (1/N) sum_f omega_f |sum_n chi(n) lambda_f(n) V(n/N)|^2, N = q^1/2 p
    """
    q, k = _check_forms(forms)
    pair = _check_pair(forms[0], chi)
    if weighting == Weighting.NATURAL:
        if central_values is None:
            central_values = [
                central_value(form, chi, afe_length_multiplier) for form in forms
            ]
        moment = float(sum(abs(value.value) ** 2 for value in central_values))
    else:
        if weights is None:
            raise DomainError("harmonic moment needs harmonic weights")
        if len(weights.weights) != len(forms):
            raise DomainError(
                f"{len(weights.weights)} weights for {len(forms)} forms"
            )
        length = pair.balance_point
        moment = float(
            sum(
                omega * abs(smoothed_sum(form, chi, length)) ** 2
                for omega, form in zip(weights.weights, forms)
            )
            / length
        )
    return MomentValue(
        q=q,
        p=chi.modulus,
        k=k,
        character=chi.exponent,
        moment=moment,
        weighting=weighting,
        dim=len(forms),
    )


@dataclass(frozen=True)
class DualMomentCheck:
    """Spectral and geometric evaluation of the smoothed harmonic moment."""

    spectral: float
    geometric: float
    diagonal: float
    small_argument: float
    large_argument: float
    c_max: int
    tail_bound: float

    @property
    def residual(self) -> float:
        """Return |spectral - geometric|."""
        return abs(self.spectral - self.geometric)

    @property
    def off_diagonal(self) -> float:
        """Return the Kloosterman/Bessel part of the geometric side."""
        return self.small_argument + self.large_argument

    @property
    def off_diagonal_error(self) -> float:
        """Return the residual as a share of the off-diagonal."""
        if self.off_diagonal == 0:
            return 0.0 if self.residual == 0 else inf
        return self.residual / abs(self.off_diagonal)

    @property
    def passed(self) -> bool:
        """Return True if the residual is small against both scales.

        Both sides sit far below 1 on the dyadic window, so the residual must
        also stay within a share of the off-diagonal.
        """
        return (
            self.residual < TOL_DUAL * max(1.0, self.spectral)
            and self.off_diagonal_error <= TOL_DUAL_OFF_DIAGONAL
        )


def _dual_coefficients(
    chi: DirichletCharacter, cutoff: DyadicCutoff, length: float
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.complex128]]:
    n = np.arange(1, int(ceil(length * cutoff.upper)) + 1)
    weights = cutoff(n / length)
    support = weights != 0
    return n[support], chi.at(n[support]) * weights[support]


def dual_moment_check(
    forms: Sequence[NewformEigendata],
    weights: HarmonicWeights,
    chi: DirichletCharacter,
    length: float,
    policy: CMaxPolicy | None = None,
    crossover: float = BESSEL_CROSSOVER,
) -> DualMomentCheck:
    """Compare (1/N) sum_f omega_f |sum chi(n) lambda_f(n) W(n/N)|^2 with its
    expansion by the Petersson formula.

    W is the AFE weight restricted to the dyadic window [N, 2N]. The geometric
    side splits into the diagonal, the Kloosterman terms whose Bessel argument
    4 pi sqrt(n1 n2)/(cq) is at most the crossover and the remaining ones.
    """
    q, k = _check_forms(forms)
    if (weights.level, weights.weight) != (q, k):
        raise DomainError("weights belong to another space")
    _check_pair(forms[0], chi)
    if length <= 0:
        raise DomainError(f"length must be positive, got {length}")
    cutoff = DyadicCutoff(k)
    n, coefficients = _dual_coefficients(chi, cutoff, length)
    if n.size == 0:
        raise DomainError(f"no integers in the window ({length}, {2 * length})")
    for form in forms:
        _require_length(form, int(n[-1]))

    spectral = sum(
        omega * abs(np.sum(coefficients * form.lambdas[n])) ** 2
        for omega, form in zip(weights.weights, forms)
    ) / length
    diagonal = float(np.sum(np.abs(coefficients) ** 2)) / length

    policy = policy or weights.policy
    largest = int(n[-1])
    c_max = policy.resolve(largest, largest, q, k)
    magnitudes = np.abs(coefficients)
    tails = np.array(
        [[tail_bound(int(a), int(b), q, k, c_max) for b in n] for a in n]
    )
    tail = float(magnitudes @ tails @ magnitudes) / length

    sign = -1.0 if (k // 2) % 2 else 1.0
    products = np.sqrt(np.outer(n, n).astype(np.float64))
    small = 0.0
    large = 0.0
    for c in range(1, c_max + 1):
        modulus = c * q
        argument = 4 * pi * products / modulus
        bessel = bessel_J(k - 1, argument.ravel()).reshape(argument.shape)
        terms = 2 * pi * sign * kloosterman_matrix(n, n, modulus) / modulus * bessel
        form_value = np.real(coefficients @ terms @ np.conj(coefficients))
        below = argument <= crossover
        small_part = np.real(
            coefficients @ np.where(below, terms, 0.0) @ np.conj(coefficients)
        )
        small += float(small_part)
        large += float(form_value - small_part)
    small /= length
    large /= length
    result = DualMomentCheck(
        spectral=float(spectral),
        geometric=diagonal + small + large,
        diagonal=diagonal,
        small_argument=small,
        large_argument=large,
        c_max=c_max,
        tail_bound=tail,
    )
    _LOGGER.debug(
        "Dual check q=%d k=%d chi=%s N=%g: spectral=%.12g geometric=%.12g",
        q,
        k,
        chi.label,
        length,
        result.spectral,
        result.geometric,
    )
    return result


def max_central_ratio(values: Sequence[CentralValue]) -> float:
    """Return max |L(1/2, f x chi)| / (q^1/2 + p^1/2) over the given values."""
    return max(
        (
            abs(value.value)
            / (sqrt(value.form.level) + sqrt(value.character.modulus))
            for value in values
        ),
        default=0.0,
    )
