"""Weight two modular symbols for Gamma0(q), q prime.

Manin symbols (c:d) run over the projective line mod q. The space kept here
is the plus quotient: the two term relations x + xS = 0 and x = x* are solved
by signed orbits, the three term relations x + xT + xT^2 = 0 exactly with
sympy. Hecke operators act through Heilbronn matrices.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np
import numpy.typing as npt
from sympy import Integer, Matrix, Rational, SparseMatrix, matrix2numpy

from .arith import is_prime, unit_inverses
from .const import MAX_MODULAR_SYMBOLS_LEVEL
from .exceptions import DomainError, EmptySpaceError, InvariantViolationError

_LOGGER = logging.getLogger(__name__)

# Cusp rows of the boundary matrix.
_CUSP_INFINITY = 0
_CUSP_ZERO = 1


def genus_x0(q: int) -> int:
    """Return the genus of X0(q) for a prime q."""
    if not is_prime(q):
        raise DomainError(f"q={q} is not prime")
    if q == 2:
        nu2, nu3 = 1, 0
    elif q == 3:
        nu2, nu3 = 0, 1
    else:
        nu2 = 2 if q % 4 == 1 else 0
        nu3 = 2 if q % 3 == 1 else 0
    genus = Rational(q + 1, 12) - Rational(nu2, 4) - Rational(nu3, 3)
    return int(genus)


def _round_half_away(num: int, den: int) -> int:
    sign = -1 if (num < 0) != (den < 0) else 1
    num, den = abs(num), abs(den)
    return sign * ((2 * num + den) // (2 * den))


def _as_array(matrices: list[tuple[int, int, int, int]]) -> npt.NDArray[np.int64]:
    array = np.array(matrices, dtype=np.int64).reshape(-1, 4)
    array.setflags(write=False)
    return array


@lru_cache(maxsize=256)
def heilbronn_cremona(p: int) -> npt.NDArray[np.int64]:
    """Return Cremona's Heilbronn matrices of determinant p, p prime.

    Rows are (a, b, c, d) for [[a, b], [c, d]].
    """
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p == 2:
        return _as_array([(1, 0, 0, 2), (2, 0, 0, 1), (2, 1, 0, 1), (1, 0, 1, 2)])
    matrices = [(1, 0, 0, p)]
    half = p // 2
    for r in range(-half, half + 1):
        x1, x2, y1, y2 = p, -r, 0, 1
        a, b = -p, r
        matrices.append((x1, x2, y1, y2))
        while b:
            quotient = _round_half_away(a, b)
            a, b = -b, a - b * quotient
            x1, x2 = x2, quotient * x2 - x1
            y1, y2 = y2, quotient * y2 - y1
            matrices.append((x1, x2, y1, y2))
    return _as_array(matrices)


@lru_cache(maxsize=32)
def heilbronn_merel(n: int) -> npt.NDArray[np.int64]:
    """Return Merel's set of matrices of determinant n."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    matrices: list[tuple[int, int, int, int]] = []
    for a in range(1, n + 1):
        for d in range((n + a - 1) // a, n + 2 - a):
            bc = a * d - n
            if bc == 0:
                matrices.extend((a, b, 0, d) for b in range(a))
                matrices.extend((a, 0, c, d) for c in range(1, d))
            else:
                for b in range((bc - 1) // (d - 1) + 1, a):
                    if bc % b == 0:
                        matrices.append((a, b, bc // b, d))
    return _as_array(matrices)


def heilbronn_matrices(n: int, level: int) -> npt.NDArray[np.int64]:
    """Return matrices realizing T_n on weight two Manin symbols of the level."""
    if n != level and is_prime(n):
        return heilbronn_cremona(n)
    return heilbronn_merel(n)


def _p1_index(q: int, c: int, d: int) -> int:
    c, d = c % q, d % q
    if c:
        return d * pow(c, -1, q) % q
    if d:
        return q
    raise DomainError(f"({c}:{d}) is not a point of P1 mod {q}")


def _reduce_two_term(
    symbols: list[tuple[int, int]], q: int
) -> tuple[list[int], list[int]]:
    """Return (sign, orbit representative) of every symbol.

    Symbols forced to vanish get sign 0.
    """
    count = len(symbols)
    signs = [0] * count
    representative = [-1] * count
    for start in range(count):
        if representative[start] >= 0:
            continue
        orbit = {start: 1}
        queue = [start]
        consistent = True
        while queue:
            current = queue.pop()
            c, d = symbols[current]
            images = (
                (_p1_index(q, d, -c), -orbit[current]),
                (_p1_index(q, -c, d), orbit[current]),
            )
            for image, sign in images:
                if image not in orbit:
                    orbit[image] = sign
                    queue.append(image)
                elif orbit[image] != sign:
                    consistent = False
        for member, sign in orbit.items():
            representative[member] = start
            signs[member] = sign if consistent else 0
    return signs, representative


def _three_term_rows(
    symbols: list[tuple[int, int]],
    q: int,
    signs: list[int],
    representative: list[int],
    column: dict[int, int],
) -> list[dict[int, int]]:
    seen: set[frozenset[int]] = set()
    rows = []
    for first, (c, d) in enumerate(symbols):
        second = _p1_index(q, d, -c - d)
        c2, d2 = symbols[second]
        third = _p1_index(q, d2, -c2 - d2)
        key = frozenset((first, second, third))
        if key in seen:
            continue
        seen.add(key)
        row: dict[int, int] = defaultdict(int)
        for member in (first, second, third):
            if signs[member]:
                row[column[representative[member]]] += signs[member]
        nonzero = {col: value for col, value in row.items() if value}
        if nonzero:
            rows.append(nonzero)
    return rows


@dataclass(frozen=True)
class ModularSymbolSpace:
    """Plus quotient of weight two modular symbols for Gamma0(level)."""

    level: int
    symbols: tuple[tuple[int, int], ...]
    exact_coordinates: Matrix
    coordinates: npt.NDArray[np.float64]
    free_symbols: tuple[int, ...]
    boundary: npt.NDArray[np.float64]
    cuspidal_basis: npt.NDArray[np.float64]
    hecke_cache: dict[int, npt.NDArray[np.float64]] = field(
        default_factory=dict, compare=False, repr=False
    )

    @property
    def dimension(self) -> int:
        """Return the dimension of the cuspidal subspace."""
        return int(self.cuspidal_basis.shape[1])

    @property
    def ambient_dimension(self) -> int:
        """Return the number of free generators."""
        return len(self.free_symbols)

    def indices(
        self, c: npt.NDArray[np.int64], d: npt.NDArray[np.int64]
    ) -> npt.NDArray[np.int64]:
        """Return symbol indices of (c:d), -1 where c = d = 0 mod level."""
        q = self.level
        units, inverses = unit_inverses(q)
        inverse_table = np.zeros(q, dtype=np.int64)
        inverse_table[units] = inverses
        c = np.asarray(c, dtype=np.int64) % q
        d = np.asarray(d, dtype=np.int64) % q
        return np.where(
            c != 0, d * inverse_table[c] % q, np.where(d != 0, q, -1)
        ).astype(np.int64)

    def _image_indices(
        self, symbol: int, matrices: npt.NDArray[np.int64]
    ) -> npt.NDArray[np.int64]:
        c, d = self.symbols[symbol]
        image = self.indices(
            c * matrices[:, 0] + d * matrices[:, 2],
            c * matrices[:, 1] + d * matrices[:, 3],
        )
        return image[image >= 0]

    def hecke_image(
        self, symbol: int, matrices: npt.NDArray[np.int64]
    ) -> npt.NDArray[np.float64]:
        """Return the coordinates of the sum of symbol * g over the matrices."""
        return self.coordinates[self._image_indices(symbol, matrices)].sum(axis=0)

    def ambient_hecke_matrix(self, n: int) -> npt.NDArray[np.float64]:
        """Return T_n on the whole plus space, acting on coordinate columns."""
        matrices = heilbronn_matrices(n, self.level)
        return np.column_stack(
            [self.hecke_image(symbol, matrices) for symbol in self.free_symbols]
        )

    def exact_ambient_trace(self, n: int) -> Rational:
        """Return the trace of T_n on the plus space in exact arithmetic."""
        matrices = heilbronn_matrices(n, self.level)
        trace = Integer(0)
        for column, symbol in enumerate(self.free_symbols):
            for index in self._image_indices(symbol, matrices):
                trace += self.exact_coordinates[int(index), column]
        return trace

    def exact_cuspidal_trace(self, n: int) -> Rational:
        """Return the trace of T_n on cusp forms, n coprime to the level."""
        if gcd(n, self.level) != 1:
            raise DomainError(f"n={n} is not coprime to {self.level}")
        eisenstein = sum(divisor for divisor in range(1, n + 1) if n % divisor == 0)
        return self.exact_ambient_trace(n) - eisenstein


def build_space(q: int) -> ModularSymbolSpace:
    """Return the weight two modular symbol space of prime level q."""
    if not is_prime(q):
        raise DomainError(f"q={q} is not prime")
    if q > MAX_MODULAR_SYMBOLS_LEVEL:
        raise DomainError(f"q={q} above {MAX_MODULAR_SYMBOLS_LEVEL}")
    genus = genus_x0(q)
    if genus == 0:
        raise EmptySpaceError(f"S_2(Gamma0({q})) is zero")

    symbols = [(1, v) for v in range(q)] + [(0, 1)]
    signs, representative = _reduce_two_term(symbols, q)
    reps = sorted({rep for rep, sign in zip(representative, signs) if sign})
    column = {rep: j for j, rep in enumerate(reps)}
    rows = _three_term_rows(symbols, q, signs, representative, column)

    relations = SparseMatrix(
        len(rows),
        len(reps),
        {(r, col): value for r, row in enumerate(rows) for col, value in row.items()},
    )
    reduced, pivots = relations.rref()
    free_columns = [j for j in range(len(reps)) if j not in pivots]

    rep_coordinates = Matrix.zeros(len(reps), len(free_columns))
    for position, j in enumerate(free_columns):
        rep_coordinates[j, position] = 1
    for r, pivot in enumerate(pivots):
        for position, j in enumerate(free_columns):
            rep_coordinates[pivot, position] = -reduced[r, j]

    exact = Matrix.zeros(len(symbols), len(free_columns))
    for i, sign in enumerate(signs):
        if sign:
            exact[i, :] = sign * rep_coordinates[column[representative[i]], :]
    free_symbols = tuple(reps[j] for j in free_columns)

    boundary = Matrix.zeros(2, len(free_symbols))
    for position, symbol in enumerate(free_symbols):
        c, d = symbols[symbol]
        boundary[_CUSP_INFINITY if c % q == 0 else _CUSP_ZERO, position] += 1
        boundary[_CUSP_INFINITY if d % q == 0 else _CUSP_ZERO, position] -= 1
    cuspidal = boundary.nullspace()
    if len(cuspidal) != genus:
        raise InvariantViolationError(
            "cuspidal dimension equals genus",
            q,
            f"found {len(cuspidal)}, genus {genus}",
        )

    _LOGGER.debug(
        "Modular symbols for q=%d: %d symbols, %d generators, cuspidal dimension %d",
        q,
        len(symbols),
        len(free_symbols),
        genus,
    )
    return ModularSymbolSpace(
        level=q,
        symbols=tuple(symbols),
        exact_coordinates=exact,
        coordinates=matrix2numpy(exact, dtype=np.float64),
        free_symbols=free_symbols,
        boundary=matrix2numpy(boundary, dtype=np.float64),
        cuspidal_basis=matrix2numpy(Matrix.hstack(*cuspidal), dtype=np.float64),
    )


def hecke_matrix(space: ModularSymbolSpace, n: int) -> npt.NDArray[np.float64]:
    """Return T_n restricted to the cuspidal subspace."""
    if n < 1 or (gcd(n, space.level) != 1 and n != space.level):
        raise DomainError(f"T_{n} not supported at level {space.level}")
    if n not in space.hecke_cache:
        basis = space.cuspidal_basis
        image = space.ambient_hecke_matrix(n) @ basis
        restricted, *_ = np.linalg.lstsq(basis, image, rcond=None)
        restricted.setflags(write=False)
        space.hecke_cache[n] = restricted
    return space.hecke_cache[n]
