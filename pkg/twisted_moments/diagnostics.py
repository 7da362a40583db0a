"""Diagnostics of the Petersson harmonic weights."""
from collections.abc import Sequence
from itertools import combinations
from math import gcd
from pathlib import Path
from typing import Any

from .arith import is_prime
from .const import DIAGNOSTIC_COLUMNS
from .eigendata import NewformEigendata
from .petersson import HarmonicWeights, trace_residual
from .util import write_csv

HELDOUT_PRIMES = 3


def heldout_pairs(weights: HarmonicWeights) -> list[tuple[int, int]]:
    """Return pairs of small primes that were not used to solve the weights."""
    primes: list[int] = []
    candidate = 2
    while len(primes) < HELDOUT_PRIMES:
        if (
            is_prime(candidate)
            and gcd(candidate, weights.level) == 1
            and candidate not in weights.probes
        ):
            primes.append(candidate)
        candidate += 1
    return list(combinations(primes, 2)) + [(primes[0], primes[0])]


def diagnostic_rows(
    forms: Sequence[NewformEigendata], weights: HarmonicWeights
) -> list[dict[str, Any]]:
    """Return one row per form."""
    residual = trace_residual(weights, forms, heldout_pairs(weights))
    diag = []
    for form, omega, l_value in zip(forms, weights.weights, weights.implied_l1_sym2):
        diag.append(
            {
                "q": weights.level,
                "k": weights.weight,
                "form": form.form_index,
                "omega": omega,
                "implied_l1_sym2": l_value,
                "condition_number": weights.condition_number,
                "max_heldout_residual": residual,
            }
        )
    return diag


def write_diagnostics(path: Path | str, rows: Sequence[dict[str, Any]]) -> None:
    """Write the diagnostics CSV."""
    write_csv(path, DIAGNOSTIC_COLUMNS, rows)
