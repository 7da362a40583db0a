"""Normalized Hecke eigenvalues of newforms of prime level."""
import logging
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum
from functools import cached_property
from pathlib import Path

import numpy as np
import numpy.typing as npt

from .arith import divisor_counts, factorize, is_prime, primes_up_to
from .const import MIN_EIGENDATA_LENGTH, TOL_EIGENDATA, TOL_TRACE
from .exceptions import (
    DomainError,
    EigendataFormatError,
    EigenspaceDegenerateError,
    InvariantViolationError,
)
from .modular_symbols import ModularSymbolSpace, heilbronn_matrices

_LOGGER = logging.getLogger(__name__)

_HEADER = re.compile(
    r"^# level=(?P<level>\d+) weight=(?P<weight>\d+) "
    r"form=(?P<form>\d+) fricke=(?P<fricke>[+-]1)$"
)
_BODY = re.compile(r"^(?P<n>\d+),(?P<a>-?\d+)$")

# Hecke operators tried before giving up on separating the eigenspaces.
_SEPARATING_PRIMES = 10
_SEPARATION = 1e-6
_RNG_SEED = 20_240_101


class Provenance(StrEnum):
    """Where eigendata came from."""

    COMPUTED = "computed"
    INGESTED = "ingested"


@dataclass(frozen=True)
class NewformEigendata:
    """Fourier coefficients a(1..n_max) of a newform in S_k(Gamma0(q))."""

    level: int
    weight: int
    coefficients: tuple[float, ...]
    fricke_sign: int
    provenance: Provenance
    form_index: int = 0

    def __post_init__(self) -> None:
        if not is_prime(self.level):
            raise DomainError(f"level {self.level} is not prime")
        if self.weight < 2 or self.weight % 2:
            raise DomainError(f"weight {self.weight} is not even and >= 2")
        if self.fricke_sign not in (1, -1):
            raise DomainError(f"fricke sign {self.fricke_sign} is not +1 or -1")
        if not self.coefficients:
            raise DomainError("no coefficients")

    @property
    def n_max(self) -> int:
        """Return the number of known coefficients."""
        return len(self.coefficients)

    @cached_property
    def lambdas(self) -> npt.NDArray[np.float64]:
        """Return lambda(n) = a(n)/n^((k-1)/2) indexed by n, entry 0 set to 0."""
        n = np.arange(1, self.n_max + 1, dtype=np.float64)
        values = np.zeros(self.n_max + 1)
        values[1:] = np.asarray(self.coefficients) / n ** ((self.weight - 1) / 2)
        values.setflags(write=False)
        return values

    def __call__(self, n: int) -> float:
        return float(self.lambdas[n])

    @property
    def is_rational(self) -> bool:
        """Return True if every coefficient is an integer."""
        values = np.asarray(self.coefficients)
        return bool(np.all(np.abs(values - np.round(values)) <= TOL_EIGENDATA))

    @property
    def label(self) -> str:
        """Return a short "q.k.i" label."""
        return f"{self.level}.{self.weight}.{self.form_index}"


def _close(value: float, expected: float) -> bool:
    return abs(value - expected) <= TOL_EIGENDATA * max(1.0, abs(expected))


def _prime_power_split(n: int) -> tuple[int, int, int]:
    """Return (ell, ell^e, n / ell^e) for the least prime ell dividing n."""
    factors = factorize(n)
    ell = min(factors)
    power = ell ** factors[ell]
    return ell, power, n // power


def validate_eigendata(form: NewformEigendata) -> NewformEigendata:
    """Run the newform invariant battery, raising on the first failure."""
    lam = form.lambdas
    q = form.level
    n_max = form.n_max
    if not _close(lam[1], 1.0):
        raise InvariantViolationError("normalization", 1, f"lambda(1)={lam[1]:.12g}")

    for n in range(2, n_max + 1):
        _, power, rest = _prime_power_split(n)
        if rest > 1 and not _close(lam[n], lam[power] * lam[rest]):
            raise InvariantViolationError(
                "multiplicativity",
                n,
                f"lambda({n})={lam[n]:.12g}, "
                f"lambda({power})lambda({rest})={lam[power] * lam[rest]:.12g}",
            )

    for n in range(2, n_max + 1):
        ell, power, rest = _prime_power_split(n)
        if rest > 1 or power == ell:
            continue
        previous = lam[power // ell]
        if ell == q:
            expected = lam[ell] * previous
        else:
            expected = lam[ell] * previous - lam[power // (ell * ell)]
        if not _close(lam[n], expected):
            raise InvariantViolationError(
                "hecke recursion", n, f"{lam[n]:.12g} != {expected:.12g}"
            )

    # composite indices are products of checked prime powers by now
    bounds = divisor_counts(n_max)
    for n in range(2, n_max + 1):
        if abs(lam[n]) > bounds[n] + TOL_EIGENDATA:
            raise InvariantViolationError(
                "deligne bound", n, f"|lambda|={abs(lam[n]):.12g} > {bounds[n]}"
            )

    if q <= n_max:
        if not _close(abs(lam[q]), q**-0.5):
            raise InvariantViolationError(
                "atkin-lehner", q, f"|lambda(q)|={abs(lam[q]):.12g}"
            )
        if np.sign(lam[q]) != -form.fricke_sign:
            raise InvariantViolationError(
                "fricke sign", q, f"lambda(q)={lam[q]:.12g}, fricke={form.fricke_sign}"
            )
    return form


def extend_multiplicatively(
    prime_coefficients: dict[int, float], level: int, weight: int, n_max: int
) -> npt.NDArray[np.float64]:
    """Return a(0..n_max) from a(ell) at primes ell <= n_max, a(0) set to 0."""
    coefficients = np.zeros(n_max + 1)
    if n_max >= 1:
        coefficients[1] = 1.0
    for n in range(2, n_max + 1):
        ell, power, rest = _prime_power_split(n)
        if rest > 1:
            coefficients[n] = coefficients[power] * coefficients[rest]
        elif power == ell:
            coefficients[n] = prime_coefficients[ell]
        elif ell == level:
            coefficients[n] = coefficients[ell] * coefficients[power // ell]
        else:
            coefficients[n] = (
                coefficients[ell] * coefficients[power // ell]
                - ell ** (weight - 1) * coefficients[power // (ell * ell)]
            )
    return coefficients


def _coprime_primes(level: int, count: int) -> list[int]:
    primes: list[int] = []
    bound = 32
    while len(primes) < count:
        primes = [ell for ell in primes_up_to(bound) if ell != level][:count]
        bound *= 2
    return primes


def _eigen_functionals(
    space: ModularSymbolSpace,
) -> npt.NDArray[np.float64]:
    """Return left eigenvectors of the Hecke algebra on the cuspidal part.

    Rows are linear forms on the plus space, one per newform.
    """
    rng = np.random.default_rng(_RNG_SEED)
    combination = np.zeros((space.ambient_dimension, space.ambient_dimension))
    for ell in _coprime_primes(space.level, _SEPARATING_PRIMES):
        combination += rng.uniform(-1.0, 1.0) * space.ambient_hecke_matrix(ell)
        eigenvalues, vectors = np.linalg.eig(combination)
        gaps = np.abs(eigenvalues[:, None] - eigenvalues[None, :])
        np.fill_diagonal(gaps, np.inf)
        scale = max(1.0, float(np.max(np.abs(eigenvalues))))
        if np.min(gaps, initial=np.inf) > _SEPARATION * scale:
            _LOGGER.debug(
                "Hecke eigenspaces at q=%d separated using primes up to %d",
                space.level,
                ell,
            )
            break
    else:
        raise EigenspaceDegenerateError(
            f"T_ell for the first {_SEPARATING_PRIMES} primes do not separate "
            f"eigenspaces at q={space.level}"
        )
    dual = np.linalg.inv(vectors)
    boundary = np.linalg.norm(space.boundary @ vectors, axis=0)
    cuspidal = boundary <= _SEPARATION * np.linalg.norm(vectors, axis=0)
    if int(np.sum(cuspidal)) != space.dimension:
        raise EigenspaceDegenerateError(
            f"found {int(np.sum(cuspidal))} cuspidal eigenvectors, "
            f"expected {space.dimension}"
        )
    return dual[cuspidal]


def newform_eigendata(
    space: ModularSymbolSpace, n_max: int
) -> list[NewformEigendata]:
    """Return validated eigendata for every newform of the space."""
    if n_max < MIN_EIGENDATA_LENGTH:
        raise DomainError(f"n_max={n_max} below {MIN_EIGENDATA_LENGTH}")
    q = space.level
    functionals = _eigen_functionals(space)
    # Anchor each form on the symbol it sees most strongly.
    pairing = functionals @ space.coordinates.T
    anchors = np.argmax(np.abs(pairing), axis=1)

    prime_values: list[dict[int, float]] = [{} for _ in functionals]
    primes = primes_up_to(n_max)
    if q > n_max:
        primes.append(q)
    for ell in primes:
        matrices = heilbronn_matrices(ell, q)
        for i, (functional, anchor) in enumerate(zip(functionals, anchors)):
            image = functional @ space.hecke_image(int(anchor), matrices)
            value = image / pairing[i, anchor]
            if abs(value.imag) > TOL_TRACE * max(1.0, abs(value.real)):
                raise EigenspaceDegenerateError(
                    f"a({ell}) = {value} is not real at q={q}"
                )
            prime_values[i][ell] = float(value.real)

    for ell in _coprime_primes(q, 2):
        if ell > n_max:
            continue
        exact = float(space.exact_cuspidal_trace(ell))
        numeric = sum(values[ell] for values in prime_values)
        if abs(numeric - exact) > TOL_TRACE:
            raise InvariantViolationError(
                "hecke trace", ell, f"sum of eigenvalues {numeric:.12g} != {exact}"
            )

    prime_values.sort(key=lambda values: tuple(round(v, 6) for v in values.values()))
    forms = []
    for index, values in enumerate(prime_values):
        coefficients = extend_multiplicatively(values, q, 2, n_max)
        # Weight two at prime level: a(q) = -fricke.
        fricke = -int(np.sign(values[q]))
        forms.append(
            validate_eigendata(
                NewformEigendata(
                    level=q,
                    weight=2,
                    coefficients=tuple(float(a) for a in coefficients[1:]),
                    fricke_sign=fricke,
                    provenance=Provenance.COMPUTED,
                    form_index=index,
                )
            )
        )
    _LOGGER.info("Computed %d newforms at level %d", len(forms), q)
    return forms


def elliptic_curve_ap(coefficients: Sequence[int], ell: int) -> int:
    """Return ell + 1 - #E(F_ell) for E: [a1, a2, a3, a4, a6]."""
    if not is_prime(ell):
        raise DomainError(f"{ell} is not prime")
    a1, a2, a3, a4, a6 = coefficients
    x = np.arange(ell, dtype=np.int64)[None, :]
    y = np.arange(ell, dtype=np.int64)[:, None]
    lhs = (y * y + a1 * x * y + a3 * y) % ell
    rhs = (x * x * x + a2 * x * x + a4 * x + a6) % ell
    points = int(np.count_nonzero(lhs == rhs)) + 1
    return ell + 1 - points


ETA_PRODUCT_WEIGHTS: dict[int, int] = {2: 8, 3: 6, 5: 4, 11: 2}


def _pentagonal_series(step: int, n_max: int) -> npt.NDArray[np.int64]:
    """Return the coefficients of prod (1 - x^(step n)) up to x^n_max."""
    series = np.zeros(n_max + 1, dtype=np.int64)
    j = 0
    while step * j * (3 * j - 1) // 2 <= n_max:
        sign = -1 if j % 2 else 1
        for exponent in {j * (3 * j - 1) // 2, j * (3 * j + 1) // 2}:
            if step * exponent <= n_max:
                series[step * exponent] = sign
        j += 1
    return series


def _times_sparse(
    series: npt.NDArray[np.int64], factor: npt.NDArray[np.int64]
) -> npt.NDArray[np.int64]:
    result = np.zeros_like(series)
    for shift in np.flatnonzero(factor):
        result[shift:] += factor[shift] * series[: series.size - shift]
    return result


def eta_product_eigendata(level: int, n_max: int) -> NewformEigendata:
    """Return eta(z)^k eta(qz)^k.

    It spans S_k(Gamma0(q)) exactly when k(q + 1) = 24.
    """
    if level not in ETA_PRODUCT_WEIGHTS:
        raise DomainError(
            f"no eta product of level {level}, known: {sorted(ETA_PRODUCT_WEIGHTS)}"
        )
    if n_max < MIN_EIGENDATA_LENGTH:
        raise DomainError(f"n_max={n_max} below {MIN_EIGENDATA_LENGTH}")
    weight = ETA_PRODUCT_WEIGHTS[level]
    # q-expansion starts at q^1, so a(n) is the coefficient of x^(n-1).
    base = _pentagonal_series(1, n_max - 1)
    stretched = _pentagonal_series(level, n_max - 1)
    series = np.zeros(n_max, dtype=np.int64)
    series[0] = 1
    for _ in range(weight):
        series = _times_sparse(_times_sparse(series, base), stretched)
    fricke = -int(np.sign(series[level - 1]))
    form = NewformEigendata(
        level=level,
        weight=weight,
        coefficients=tuple(float(a) for a in series),
        fricke_sign=fricke,
        provenance=Provenance.COMPUTED,
    )
    _LOGGER.debug(
        "Eta product of level %d weight %d up to n=%d", level, weight, n_max
    )
    return validate_eigendata(form)


def ingest_eigendata(path: Path | str) -> list[NewformEigendata]:
    """Load and validate every form in an eigendata file."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as ex:
        raise EigendataFormatError(f"cannot read {path}: {ex}") from ex

    forms: list[NewformEigendata] = []
    header: re.Match[str] | None = None
    body: list[int] = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            if header is not None:
                forms.append(_parse_block(path, header, body))
            header = _HEADER.match(line)
            if header is None:
                raise EigendataFormatError(f"{path}:{lineno}: bad header {line!r}")
            body = []
            continue
        if header is None:
            raise EigendataFormatError(f"{path}:{lineno}: data before header")
        match = _BODY.match(line.strip())
        if match is None:
            raise EigendataFormatError(f"{path}:{lineno}: bad line {line!r}")
        n = int(match["n"])
        if n != len(body) + 1:
            raise EigendataFormatError(
                f"{path}:{lineno}: expected n={len(body) + 1}, found n={n}"
            )
        body.append(int(match["a"]))
    if header is None:
        raise EigendataFormatError(f"{path}: no header")
    forms.append(_parse_block(path, header, body))
    _LOGGER.debug("Ingested %d forms from %s", len(forms), path)
    return forms


def _parse_block(
    path: Path, header: re.Match[str], body: list[int]
) -> NewformEigendata:
    if not body:
        raise EigendataFormatError(f"{path}: form {header['form']} has no data")
    try:
        form = NewformEigendata(
            level=int(header["level"]),
            weight=int(header["weight"]),
            coefficients=tuple(float(a) for a in body),
            fricke_sign=int(header["fricke"]),
            provenance=Provenance.INGESTED,
            form_index=int(header["form"]),
        )
    except DomainError as ex:
        raise EigendataFormatError(f"{path}: {ex}") from ex
    return validate_eigendata(form)


def export_eigendata(forms: Iterable[NewformEigendata], path: Path | str) -> None:
    """Write forms with integer coefficients in the eigendata format."""
    lines = []
    for form in forms:
        if not form.is_rational:
            raise EigendataFormatError(
                f"form {form.label} has non-integer coefficients"
            )
        fricke = "+1" if form.fricke_sign > 0 else "-1"
        lines.append(
            f"# level={form.level} weight={form.weight} "
            f"form={form.form_index} fricke={fricke}"
        )
        lines.extend(
            f"{n},{int(round(a))}" for n, a in enumerate(form.coefficients, start=1)
        )
    Path(path).write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
