"""Special functions: the AFE weight V, J-Bessel and oscillatory integrals."""
import logging
from collections.abc import Callable
from dataclasses import dataclass
from enum import StrEnum
from functools import lru_cache
from math import factorial, log, pi, sqrt

import numpy as np
import numpy.typing as npt
from scipy import optimize, special

from .arith import is_prime
from .const import AFE_CUTOFF, BESSEL_CROSSOVER, QUADRATURE_PANEL_BUDGET
from .exceptions import (
    DomainError,
    QuadratureNonConvergenceError,
    StationaryPointOutsideSupportError,
    TruncationTooSmallError,
)

_LOGGER = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]

_PANEL_ORDER = 16
_HANKEL_TERMS = 48
_HANKEL_TOLERANCE = 1e-13
_SERIES_MAX_TERMS = 200


# ---------------------------------------------------------------------------
# Panel quadrature


@lru_cache(maxsize=8)
def _legendre_rule(order: int) -> tuple[FloatArray, FloatArray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


def _panel_sums(
    func: Callable[[FloatArray], npt.NDArray[np.generic]],
    lefts: FloatArray,
    rights: FloatArray,
    order: int = _PANEL_ORDER,
) -> npt.NDArray[np.generic]:
    nodes, weights = _legendre_rule(order)
    half = 0.5 * (rights - lefts)
    centre = 0.5 * (rights + lefts)
    points = centre[:, None] + half[:, None] * nodes[None, :]
    values = func(points.ravel()).reshape(points.shape)
    return np.asarray(half * (values @ weights))


def fixed_panel_quadrature(
    func: Callable[[FloatArray], npt.NDArray[np.generic]],
    lower: float,
    upper: float,
    panels: int,
    order: int = _PANEL_ORDER,
) -> complex:
    """Integrate func over [lower, upper] with equal Gauss-Legendre panels."""
    edges = np.linspace(lower, upper, panels + 1)
    return complex(np.sum(_panel_sums(func, edges[:-1], edges[1:], order)))


def adaptive_panel_quadrature(
    func: Callable[[FloatArray], npt.NDArray[np.generic]],
    lower: float,
    upper: float,
    initial_width: float,
    tolerance: float,
    budget: int = QUADRATURE_PANEL_BUDGET,
) -> complex:
    """Integrate func over [lower, upper] by bisection of Gauss-Legendre panels.

    A panel is accepted once the rule on the panel and on its two halves agree
    to its share of the tolerance; the rest are bisected. The number of panels
    ever evaluated is capped by budget.
    """
    count = max(1, int(np.ceil((upper - lower) / initial_width)))
    edges = np.linspace(lower, upper, count + 1)
    lefts, rights = edges[:-1], edges[1:]
    length = upper - lower
    total = 0j
    evaluated = 0
    while lefts.size:
        evaluated += lefts.size
        if evaluated > budget:
            raise QuadratureNonConvergenceError(
                f"more than {budget} panels needed on [{lower}, {upper}]"
            )
        mids = 0.5 * (lefts + rights)
        coarse = _panel_sums(func, lefts, rights)
        fine = _panel_sums(func, lefts, mids) + _panel_sums(func, mids, rights)
        accepted = np.abs(fine - coarse) <= tolerance * (rights - lefts) / length
        total += complex(np.sum(fine[accepted]))
        rejected = ~accepted
        lefts, rights = (
            np.concatenate((lefts[rejected], mids[rejected])),
            np.concatenate((mids[rejected], rights[rejected])),
        )
    _LOGGER.debug("Adaptive quadrature evaluated %d panels", evaluated)
    return total


# ---------------------------------------------------------------------------
# AFE weight V


class VMethod(StrEnum):
    """Evaluation method of the AFE weight."""

    CLOSED_FORM = "closed-form"
    QUADRATURE = "quadrature"


def _check_weight(k: int) -> None:
    if k < 2 or k % 2:
        raise DomainError(f"weight must be even and >= 2, got {k}")


def weight_V(k: int, x: float) -> float:
    """Return V(x) = Q(k/2, 2 pi x), the regularized upper incomplete gamma."""
    _check_weight(k)
    if x <= 0:
        raise DomainError(f"V is defined for x > 0, got {x}")
    return float(special.gammaincc(k / 2, 2 * pi * x))


def weight_V_array(k: int, x: npt.ArrayLike) -> FloatArray:
    """Vectorized weight_V."""
    _check_weight(k)
    values = np.asarray(x, dtype=np.float64)
    if np.any(values <= 0):
        raise DomainError("V is defined for x > 0")
    return np.asarray(special.gammaincc(k / 2, 2 * pi * values))


def _contour_integrand(
    k: int, x: float, sigma: float
) -> Callable[[FloatArray], FloatArray]:
    log_scale = log(2 * pi * x)
    log_gamma_k = special.gammaln(k / 2)

    def integrand(t: FloatArray) -> FloatArray:
        u = sigma + 1j * t
        values = np.exp(-u * log_scale + special.loggamma(k / 2 + u) - log_gamma_k) / u
        return np.asarray(values.real)

    return integrand


def weight_V_oracle(k: int, x: float, sigma: float = 2.0, T: float = 60.0) -> float:
    """Evaluate V by quadrature on the vertical line Re(u) = sigma.

    V(x) = (1/2 pi i) int (2 pi x)^(-u) Gamma(k/2 + u)/Gamma(k/2) du/u. The
    integrand at sigma - it is the conjugate of that at sigma + it, so the
    integral is (1/pi) int_0^T of the real part.
    """
    _check_weight(k)
    if x <= 0:
        raise DomainError(f"V is defined for x > 0, got {x}")
    if sigma <= 0:
        raise DomainError(f"the contour must lie right of 0, got sigma={sigma}")
    integrand = _contour_integrand(k, x, sigma)
    u_end = sigma + 1j * T
    tail = abs(
        np.exp(
            -u_end * log(2 * pi * x)
            + special.loggamma(k / 2 + u_end)
            - special.gammaln(k / 2)
        )
        / u_end
    )
    # |Gamma| decays like exp(-pi t/2) along the line
    if tail * 2 / pi / pi > 1e-12:
        raise DomainError(f"T={T} leaves a contour tail of about {tail:.3g}")
    panels = max(64, int(4 * T))
    return fixed_panel_quadrature(integrand, 0.0, T, panels).real / pi


@dataclass(frozen=True)
class WeightFunctionV:
    """The AFE weight V for a given weight k."""

    weight: int
    method: VMethod = VMethod.CLOSED_FORM

    def __post_init__(self) -> None:
        _check_weight(self.weight)

    def __call__(self, x: float) -> float:
        if self.method is VMethod.QUADRATURE:
            return weight_V_oracle(self.weight, x)
        return weight_V(self.weight, x)


@lru_cache(maxsize=32)
def afe_cutoff_point(k: int, threshold: float = AFE_CUTOFF) -> float:
    """Return the x beyond which V(x) < threshold."""
    _check_weight(k)
    upper = 1.0
    while weight_V(k, upper) > threshold:
        upper *= 2
    return float(
        optimize.brentq(
            lambda x: log(max(weight_V(k, x), 1e-300)) - log(threshold),
            1e-6,
            upper,
            xtol=1e-12,
        )
    )


# ---------------------------------------------------------------------------
# Bessel functions


def bessel_J_series(
    order: int, x: npt.ArrayLike
) -> tuple[FloatArray, FloatArray]:
    """Return the power series value of J_order and a bound on the dropped tail.

    Terms are (-1)^l (x/2)^(order+2l) / (l! Gamma(order+l+1)). Once the term
    ratio r = (x/2)^2/((l+1)(order+l+1)) is below 1/2 the tail is bounded by
    the geometric series |term| r/(1-r).
    """
    if order < 0:
        raise DomainError(f"order must be nonnegative, got {order}")
    values = np.atleast_1d(np.asarray(x, dtype=np.float64))
    half_sq = (values / 2) ** 2
    term = (values / 2) ** order / factorial(order)
    total = term.copy()
    tail = np.zeros_like(values)
    for index in range(_SERIES_MAX_TERMS):
        ratio = half_sq / ((index + 1) * (order + index + 1))
        term = -term * ratio
        total += term
        bound = np.abs(term) * ratio / np.maximum(1 - ratio, 1e-300)
        tail = np.where(ratio < 0.5, bound, np.inf)
        if np.all(tail <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total, tail


def hankel_envelope(x: npt.ArrayLike) -> FloatArray:
    """Return the large-argument amplitude sqrt(2/(pi x))."""
    return np.sqrt(2 / (pi * np.asarray(x, dtype=np.float64)))


def _hankel_asymptotic(order: int, x: FloatArray) -> tuple[FloatArray, FloatArray]:
    mu = 4.0 * order * order
    index = np.arange(1, _HANKEL_TERMS + 1)
    factors = (mu - (2 * index - 1) ** 2) / (8.0 * index)
    coefficients = np.concatenate(([1.0], np.cumprod(factors)))
    powers = x[:, None] ** -np.arange(_HANKEL_TERMS + 1)[None, :]
    terms = coefficients[None, :] * powers
    # optimal truncation: stop before the smallest term
    cut = np.argmin(np.abs(terms[:, 1:]), axis=1) + 1
    mask = np.arange(_HANKEL_TERMS + 1)[None, :] < cut[:, None]
    signs = np.array([1, 1, -1, -1] * ((_HANKEL_TERMS + 4) // 4))[: _HANKEL_TERMS + 1]
    even = (np.arange(_HANKEL_TERMS + 1) % 2 == 0)[None, :]
    p_part = np.sum(np.where(mask & even, signs * terms, 0.0), axis=1)
    q_part = np.sum(np.where(mask & ~even, signs * terms, 0.0), axis=1)
    omega = x - order * pi / 2 - pi / 4
    value = hankel_envelope(x) * (p_part * np.cos(omega) - q_part * np.sin(omega))
    error = hankel_envelope(x) * np.abs(terms[np.arange(x.size), cut])
    return value, error


def _bessel_integral(order: int, x: FloatArray) -> FloatArray:
    # trapezoidal rule on the periodic Bessel integral, exact up to aliasing
    nodes = 2 * int(np.ceil(np.max(x) + order)) + 64
    tau = 2 * pi * np.arange(nodes) / nodes
    phase = order * tau[None, :] - x[:, None] * np.sin(tau)[None, :]
    return np.asarray(np.mean(np.cos(phase), axis=1))


def bessel_J_large(order: int, x: npt.ArrayLike) -> FloatArray:
    """Return J_order(x) for large arguments.

    The Hankel expansion is used where its optimally truncated remainder is
    below 1e-13; elsewhere Bessel's integral with the trapezoidal rule.
    """
    values = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(values <= 0):
        raise DomainError("large-argument evaluation needs x > 0")
    result = np.empty_like(values)
    hankel, error = _hankel_asymptotic(order, values)
    good = error < _HANKEL_TOLERANCE
    result[good] = hankel[good]
    if np.any(~good):
        result[~good] = _bessel_integral(order, values[~good])
    return result


def bessel_J(
    order: int, x: npt.ArrayLike, crossover: float = BESSEL_CROSSOVER
) -> FloatArray:
    """Return J_order(x), switching from the power series at crossover."""
    if order < 1:
        raise DomainError(f"order must be >= 1, got {order}")
    values = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(values < 0):
        raise DomainError("x must be nonnegative")
    result = np.empty_like(values)
    small = values <= crossover
    if np.any(small):
        result[small] = bessel_J_series(order, values[small])[0]
    if np.any(~small):
        result[~small] = bessel_J_large(order, values[~small])
    return result


def bessel_envelope_constant(order: int, small_argument: bool) -> float:
    """Return sup |J|/x on (0, 1] or sup sqrt(x)|J| on [1, 200] over a grid."""
    if small_argument:
        grid = np.linspace(1e-4, 1.0, 2000)
        return float(np.max(np.abs(bessel_J(order, grid)) / grid))
    grid = np.linspace(1.0, 200.0, 20000)
    return float(np.max(np.sqrt(grid) * np.abs(bessel_J(order, grid))))


# ---------------------------------------------------------------------------
# Cutoffs


@dataclass(frozen=True)
class SmoothCutoff:
    """C-infinity bump supported on (lower, upper), equal to 1 at the centre."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not 0 <= self.lower < self.upper:
            raise DomainError(f"invalid support [{self.lower}, {self.upper}]")

    def __call__(self, x: npt.ArrayLike) -> FloatArray:
        values = np.asarray(x, dtype=np.float64)
        half = (self.upper - self.lower) / 2
        t = (values - self.lower - half) / half
        inside = np.abs(t) < 1
        safe = np.where(inside, 1 - t * t, 1.0)
        return np.where(inside, np.exp(1 - 1 / safe), 0.0)


@dataclass(frozen=True)
class ProductCutoff:
    """Bivariate cutoff V(x, y) = b_x(x) b_y(y)."""

    x_cutoff: SmoothCutoff
    y_cutoff: SmoothCutoff

    @property
    def x_support(self) -> tuple[float, float]:
        """Return the support in x."""
        return self.x_cutoff.lower, self.x_cutoff.upper

    def __call__(self, x: npt.ArrayLike, y: float) -> FloatArray:
        return self.x_cutoff(x) * float(self.y_cutoff(y))


@dataclass(frozen=True)
class DyadicCutoff:
    """The AFE weight V_k restricted smoothly to the window (lower, upper)."""

    k: int
    lower: float = 1.0
    upper: float = 2.0

    def __call__(self, x: npt.ArrayLike) -> FloatArray:
        values = np.asarray(x, dtype=np.float64)
        bump = SmoothCutoff(self.lower, self.upper)(values)
        safe = np.where(values > 0, values, 1.0)
        return np.where(values > 0, weight_V_array(self.k, safe) * bump, 0.0)


DEFAULT_CUTOFF = ProductCutoff(SmoothCutoff(0.2, 5.0), SmoothCutoff(0.2, 5.0))


# ---------------------------------------------------------------------------
# Oscillatory integrals


class IntegralKind(StrEnum):
    """Which of the two Poisson-dual integrals is evaluated."""

    V1 = "V1"
    V2 = "V2"


@dataclass(frozen=True)
class OscillatorySpec:
    """Parameters of the oscillatory integrals after Poisson in n1."""

    N: float
    c: int
    q: int
    p: int
    m1: int
    y: float
    sign: int = 1
    kind: IntegralKind = IntegralKind.V2
    p_power: float = 1.0

    def __post_init__(self) -> None:
        if self.N <= 0 or self.c < 1 or self.y <= 0:
            raise DomainError("N, c and y must be positive")
        if not (is_prime(self.q) and is_prime(self.p)):
            raise DomainError(f"q={self.q} and p={self.p} must be prime")
        if self.sign not in (1, -1):
            raise DomainError(f"sign must be +1 or -1, got {self.sign}")
        if self.kind is IntegralKind.V2:
            if self.m1 == 0:
                raise DomainError("m1 must be nonzero for the Bessel integral")
            if self.c * self.q * self.p_power > self.N:
                raise DomainError(
                    f"c={self.c} outside the oscillatory range c <= N/(p^eps q)"
                )

    @property
    def frequency(self) -> float:
        """Return N/(cq)."""
        return self.N / (self.c * self.q)

    def phase(self, x: FloatArray) -> FloatArray:
        """Return the phase in cycles, so the integrand is e(phase) V."""
        linear = -x * self.m1 * self.frequency / self.p
        if self.kind is IntegralKind.V1:
            return linear
        return self.sign * 2 * np.sqrt(x * self.y) * self.frequency + linear

    def phase_derivative(self, x: FloatArray) -> FloatArray:
        """Return d(phase)/dx in cycles."""
        linear = -self.m1 * self.frequency / self.p
        if self.kind is IntegralKind.V1:
            return np.full_like(x, linear)
        return self.sign * np.sqrt(self.y / x) * self.frequency + linear

    def max_frequency(self, lower: float) -> float:
        """Return a bound on |phase'| on [lower, oo)."""
        bound = abs(self.m1) * self.frequency / self.p
        if self.kind is IntegralKind.V2:
            bound += sqrt(self.y / lower) * self.frequency
        return bound


def oscillatory_V_integral(
    spec: OscillatorySpec,
    cutoff: ProductCutoff = DEFAULT_CUTOFF,
    tolerance: float = 1e-10,
) -> complex:
    """Return the integral of e(phase(x)) V(x, y) over the cutoff support."""
    lower, upper = cutoff.x_support
    lower = max(lower, 1e-12)
    scale = max(float(np.max(cutoff(np.linspace(lower, upper, 257), spec.y))), 1e-300)

    def integrand(x: FloatArray) -> ComplexArray:
        return np.exp(2j * pi * spec.phase(x)) * cutoff(x, spec.y)

    width = min((upper - lower) / 8, 0.5 / max(spec.max_frequency(lower), 1e-12))
    return adaptive_panel_quadrature(
        integrand, lower, upper, width, tolerance * scale * (upper - lower)
    )


@dataclass(frozen=True)
class StationaryPhaseComparison:
    """Quadrature against the leading stationary-phase term."""

    quadrature: complex
    prediction: complex
    relative_error: float
    stationary_point: float
    located_stationary_point: float
    amplitude: complex


def stationary_phase_compare(
    spec: OscillatorySpec,
    cutoff: ProductCutoff = DEFAULT_CUTOFF,
    epsilon: float = 0.5,
) -> StationaryPhaseComparison:
    """Compare the Bessel-side integral with its stationary-phase prediction.

    The phase 2 pi (sign 2 sqrt(xy) N/(cq) - x m1 N/(cpq)) is stationary at
    x0 = p^2 y/m1^2 with value 2 pi y p N/(cq m1). The prediction is
    (cq/N)^(1/2) e(y p N/(cq m1)) W(y); amplitude holds W(y).
    """
    if spec.kind is not IntegralKind.V2:
        raise DomainError("stationary phase applies to the Bessel-side integral")
    size = abs(spec.m1)
    if not spec.p ** (1 - epsilon) <= size <= spec.p ** (1 + epsilon):
        raise DomainError(f"m1={spec.m1} outside the window around p={spec.p}")
    if spec.m1 * spec.sign < 0:
        raise DomainError("sign of m1 does not match the integral sign")
    x0 = spec.p**2 * spec.y / spec.m1**2
    lower, upper = cutoff.x_support
    if not (lower < x0 < upper and float(cutoff(np.array([x0]), spec.y)[0]) > 0):
        raise StationaryPointOutsideSupportError(
            f"x0={x0} outside the support [{lower}, {upper}]"
        )
    located = float(
        optimize.brentq(
            lambda x: float(spec.phase_derivative(np.array([x]))[0]),
            x0 / 16,
            x0 * 16,
            xtol=1e-14,
            rtol=1e-15,
        )
    )
    curvature = (
        2 * pi * -spec.sign * sqrt(spec.y) * spec.frequency / 2 * x0 ** (-1.5)
    )
    value = cutoff(np.array([x0]), spec.y)[0]
    phase_at = 2 * pi * spec.y * spec.p * spec.frequency / spec.m1
    prediction = (
        value
        * sqrt(2 * pi / abs(curvature))
        * np.exp(1j * (phase_at + np.sign(curvature) * pi / 4))
    )
    quadrature = oscillatory_V_integral(spec, cutoff)
    amplitude = prediction / (
        sqrt(1 / spec.frequency) * np.exp(1j * phase_at)
    )
    return StationaryPhaseComparison(
        quadrature=quadrature,
        prediction=complex(prediction),
        relative_error=abs(quadrature - prediction) / abs(prediction),
        stationary_point=x0,
        located_stationary_point=located,
        amplitude=complex(amplitude),
    )


# ---------------------------------------------------------------------------
# Poisson summation


@dataclass(frozen=True)
class SchwartzFunction:
    """Test function with an optional closed-form Fourier transform.

    transform(xi) = int psi(t) e(-t xi) dt. Without a closed form the
    transform is computed on [-support, support].
    """

    func: Callable[[FloatArray], FloatArray]
    transform: Callable[[FloatArray], ComplexArray] | None = None
    support: float | None = None

    def fourier(self, xi: FloatArray) -> ComplexArray:
        """Return the Fourier transform at xi."""
        if self.transform is not None:
            return np.asarray(self.transform(xi), dtype=np.complex128)
        if self.support is None:
            raise DomainError("numerical transform needs a bounded support")
        radius = self.support
        values = []
        for point in np.atleast_1d(xi):
            width = min(radius / 8, 0.25 / (abs(point) + 1))

            def integrand(t: FloatArray, point: float = float(point)) -> ComplexArray:
                return np.asarray(self.func(t) * np.exp(-2j * pi * t * point))

            values.append(
                adaptive_panel_quadrature(integrand, -radius, radius, width, 1e-14)
            )
        return np.asarray(values, dtype=np.complex128)


def gaussian() -> SchwartzFunction:
    """Return e^(-pi t^2), its own Fourier transform."""

    def func(t: FloatArray) -> FloatArray:
        return np.exp(-pi * np.asarray(t) ** 2)

    return SchwartzFunction(func, lambda xi: func(xi).astype(np.complex128))


def bump(radius: float) -> SchwartzFunction:
    """Return a compactly supported smooth bump on (-radius, radius)."""
    cutoff = SmoothCutoff(0.0, 2 * radius)
    return SchwartzFunction(
        lambda t: cutoff(np.asarray(t) + radius), support=radius
    )


def numeric_poisson_check(
    psi: SchwartzFunction,
    a: int,
    r: int,
    M: int,
    denominator: int | None = None,
) -> float:
    """Return |sum_{n = a mod r} psi(n) - (1/r) sum_m e(am/r) psi^(m/r)|.

    Both sums run over |n| <= M and |m/r| <= M. denominator replaces r in
    the transform argument and is only used to demonstrate that other
    denominators fail.
    """
    if r < 1:
        raise DomainError(f"r must be positive, got {r}")
    scale = r if denominator is None else denominator
    edges = np.array([-M, M], dtype=np.float64)
    if np.max(np.abs(psi.func(edges))) > 1e-12:
        raise TruncationTooSmallError(f"psi(+-{M}) above 1e-12")
    if np.max(np.abs(psi.fourier(edges))) > 1e-12:
        raise TruncationTooSmallError(f"transform at +-{M} above 1e-12")
    n = np.arange(-M, M + 1)
    n = n[(n - a) % r == 0]
    lhs = float(np.sum(psi.func(n.astype(np.float64))))
    m = np.arange(-M * r, M * r + 1)
    transform = psi.fourier(m.astype(np.float64) / scale)
    rhs = complex(np.sum(np.exp(2j * pi * ((a * m) % r) / r) * transform)) / r
    return abs(lhs - rhs)
