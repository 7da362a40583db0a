"""Controller module."""
import logging
import time
from collections.abc import Sequence
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass
from math import isnan, log, nan
from pathlib import Path
from typing import Any

from scipy import stats

from .characters import DirichletCharacter
from .config import ScanConfig
from .const import RECORD_COLUMNS, TREND_ALPHA
from .diagnostics import diagnostic_rows, write_diagnostics
from .eigendata import NewformEigendata, ingest_eigendata, newform_eigendata
from .exceptions import ConfigError, InvariantViolationError
from .lfunctions import (
    Weighting,
    central_value,
    eigendata_length,
    max_central_ratio,
    root_number_closed_form,
    twisted_moment,
)
from .modular_symbols import build_space, genus_x0
from .petersson import HarmonicWeights, solve_harmonic_weights
from .util import dataclass_to_dict, write_csv

_LOGGER = logging.getLogger(__name__)

# Records whose |log q / log p - 1| stays below this lie on the q ~ p diagonal.
DIAGONAL_WIDTH = 0.25
_MIN_TREND_POINTS = 3


@dataclass(frozen=True)
class ExperimentRecord:
    """One (q, p, chi) cell of a scan."""

    q: int
    p: int
    k: int
    character: str
    dim: int
    moment_natural: float | None = None
    moment_harmonic: float | None = None
    ratio: float | None = None
    max_central_sq: float | None = None
    max_l_ratio: float | None = None
    runtime_ms: float | None = None
    errors: str | None = None


@dataclass(frozen=True)
class ScanCell:
    """Everything a worker needs for one cell."""

    q: int
    p: int
    k: int
    exponent: int
    forms: tuple[NewformEigendata, ...]
    weights: HarmonicWeights | None
    weights_error: str | None
    afe_length_multiplier: float
    record_timing: bool


def _measure(cell: ScanCell, chi: DirichletCharacter) -> dict[str, Any]:
    if not cell.forms:
        return {
            "moment_natural": 0.0,
            "moment_harmonic": 0.0,
            "ratio": 0.0,
            "max_central_sq": 0.0,
            "max_l_ratio": 0.0,
        }
    values = [
        central_value(form, chi, cell.afe_length_multiplier) for form in cell.forms
    ]
    natural = twisted_moment(cell.forms, chi, central_values=values)
    measured: dict[str, Any] = {
        "moment_natural": natural.moment,
        "ratio": natural.ratio,
        "max_central_sq": max(abs(value.value) ** 2 for value in values),
        "max_l_ratio": max_central_ratio(values),
    }
    if cell.weights is not None:
        harmonic = twisted_moment(
            cell.forms, chi, Weighting.HARMONIC, weights=cell.weights
        )
        measured["moment_harmonic"] = harmonic.moment
    else:
        measured["errors"] = cell.weights_error
    return measured


def run_cell(cell: ScanCell) -> ExperimentRecord:
    """Compute one record; failures end up in its errors column."""
    start = time.perf_counter()
    chi = DirichletCharacter(cell.p, cell.exponent)
    base: dict[str, Any] = {
        "q": cell.q,
        "p": cell.p,
        "k": cell.k,
        "character": chi.label,
        "dim": len(cell.forms),
    }
    try:
        measured = _measure(cell, chi)
    except Exception as ex:  # pylint: disable=broad-except
        _LOGGER.error(
            "Cell q=%d p=%d chi=%s failed", cell.q, cell.p, chi.label, exc_info=True
        )
        measured = {"errors": f"{type(ex).__name__}: {ex}"}
    if cell.record_timing:
        measured["runtime_ms"] = (time.perf_counter() - start) * 1000
    return ExperimentRecord(**base, **measured)


def _sort_key(record: ExperimentRecord) -> tuple[int, int, int]:
    _, exponent = record.character.split(":")
    return record.q, record.p, int(exponent)


def summarize(records: Sequence[ExperimentRecord]) -> dict[str, Any]:
    """Return the footer of a scan."""
    good = [record for record in records if record.errors is None]
    ratios = [record.ratio for record in good if record.ratio is not None]
    l_ratios = [record.max_l_ratio for record in good if record.max_l_ratio is not None]
    diagonal = [
        record
        for record in good
        if record.dim > 0
        and record.ratio is not None
        and abs(log(record.q) / log(record.p) - 1) <= DIAGONAL_WIDTH
    ]
    rho, pvalue = nan, nan
    if len({record.q + record.p for record in diagonal}) >= _MIN_TREND_POINTS:
        result = stats.spearmanr(
            [record.q + record.p for record in diagonal],
            [record.ratio for record in diagonal],
        )
        rho, pvalue = float(result.statistic), float(result.pvalue)
    return {
        "records": len(records),
        "errors": len(records) - len(good),
        "max_ratio": max(ratios, default=nan),
        "max_l_ratio": max(l_ratios, default=nan),
        "diagonal_rho": rho,
        "diagonal_pvalue": pvalue,
        "upward_trend": not isnan(rho) and rho > 0 and pvalue < TREND_ALPHA,
    }


class ScanController:
    """Scan Controller."""

    def __init__(self, config: ScanConfig):
        self._config = config
        self._forms: dict[int, tuple[NewformEigendata, ...]] = {}
        self._weights: dict[int, HarmonicWeights] = {}
        self._weights_errors: dict[int, str] = {}
        self._executor: Executor | None = None

    @property
    def forms(self) -> dict[int, tuple[NewformEigendata, ...]]:
        """Return the eigendata per level."""
        return self._forms

    def _required_length(self, q: int) -> int:
        lengths = [
            eigendata_length(q, p, self._config.k, self._config.afe_length_multiplier)
            for level, p in {(level, p) for level, p, _ in self._config.cells()}
            if level == q
        ]
        # held-out diagnostics pairs stay far below this
        return max(lengths + [q, 64])

    def _load_forms(self) -> None:
        ingested: dict[int, list[NewformEigendata]] = {}
        for path in self._config.eigendata:
            for form in ingest_eigendata(path):
                if form.weight == self._config.k:
                    ingested.setdefault(form.level, []).append(form)

        for q in sorted({q for q, _, _ in self._config.cells()}):
            if q in ingested:
                forms = tuple(ingested[q])
            elif self._config.k != 2:
                raise ConfigError(
                    f"no eigendata for q={q} at weight {self._config.k}; "
                    "ingest it with eigendata files"
                )
            elif genus_x0(q) == 0:
                forms = ()
            else:
                space = build_space(q)
                forms = tuple(newform_eigendata(space, self._required_length(q)))
            if self._config.k == 2 and len(forms) != genus_x0(q):
                raise InvariantViolationError(
                    "dimension equals genus",
                    q,
                    f"{len(forms)} forms, genus {genus_x0(q)}",
                )
            self._forms[q] = forms
            _LOGGER.debug("Level %d: %d forms", q, len(forms))

    def _solve_weights(self) -> None:
        for q, forms in self._forms.items():
            if not forms:
                continue
            try:
                self._weights[q] = solve_harmonic_weights(
                    forms, q, self._config.k, policy=self._config.c_max_policy
                )
            except Exception as ex:  # pylint: disable=broad-except
                _LOGGER.error("Harmonic weights at q=%d failed", q, exc_info=True)
                self._weights_errors[q] = f"{type(ex).__name__}: {ex}"

    def initialize(self) -> None:
        """Precompute eigendata and harmonic weights for every level."""
        self.teardown()
        self._load_forms()
        self._solve_weights()
        if self._config.workers > 1:
            self._executor = ProcessPoolExecutor(max_workers=self._config.workers)
        _LOGGER.debug("Controller initialize complete")

    def cells(self) -> list[ScanCell]:
        """Return the work items in output order."""
        return [
            ScanCell(
                q=q,
                p=p,
                k=self._config.k,
                exponent=exponent,
                forms=self._forms[q],
                weights=self._weights.get(q),
                weights_error=self._weights_errors.get(q),
                afe_length_multiplier=self._config.afe_length_multiplier,
                record_timing=self._config.record_timing,
            )
            for q, p, exponent in self._config.cells()
        ]

    def run(self) -> list[ExperimentRecord]:
        """Run every cell and return the records in deterministic order."""
        cells = self.cells()
        if not cells:
            raise ConfigError("no (q, p) pair of the grid lies in the window")
        if self._executor is None:
            records = [run_cell(cell) for cell in cells]
        else:
            records = list(self._executor.map(run_cell, cells, chunksize=4))
        records.sort(key=_sort_key)
        failed = sum(record.errors is not None for record in records)
        _LOGGER.info("Scan finished: %d records, %d failed", len(records), failed)
        return records

    def diagnostics(self) -> list[dict[str, Any]]:
        """Return Petersson diagnostics rows for every solved level."""
        rows = []
        for q, weights in sorted(self._weights.items()):
            rows.extend(diagnostic_rows(self._forms[q], weights))
        return rows

    def write(self, records: Sequence[ExperimentRecord], path: Path | str) -> None:
        """Write records and the summary footer."""
        footer = summarize(records)
        write_csv(
            path,
            RECORD_COLUMNS,
            (dataclass_to_dict(record) for record in records),
            footer,
        )
        _LOGGER.info(
            "Wrote %s: max ratio %s, max |L| ratio %s, upward trend %s",
            path,
            footer["max_ratio"],
            footer["max_l_ratio"],
            footer["upward_trend"],
        )
        if self._config.diagnostics is not None:
            write_diagnostics(self._config.diagnostics, self.diagnostics())

    def teardown(self) -> None:
        """Shut the worker pool down."""
        if self._executor is not None:
            self._executor.shutdown()
            self._executor = None


def scan(
    config: ScanConfig, output: Path | str | None = None
) -> list[ExperimentRecord]:
    """Run a full scan and write it to the output path."""
    target = output or config.output
    if target is None:
        raise ConfigError("output: no output path given")
    controller = ScanController(config)
    try:
        controller.initialize()
        records = controller.run()
        controller.write(records, target)
    finally:
        controller.teardown()
    return records


def _complex(value: complex) -> list[float]:
    return [value.real, value.imag]


def moment_report(config: ScanConfig) -> list[dict[str, Any]]:
    """Return central values, root numbers and both moments for every cell."""
    controller = ScanController(config.with_overrides(workers=1))
    controller.initialize()
    report = []
    for cell in controller.cells():
        chi = DirichletCharacter(cell.p, cell.exponent)
        values = [
            central_value(form, chi, cell.afe_length_multiplier) for form in cell.forms
        ]
        entry: dict[str, Any] = {
            "q": cell.q,
            "p": cell.p,
            "k": cell.k,
            "character": chi.label,
            "dim": len(cell.forms),
            "forms": [
                {
                    "form": value.form.label,
                    "central_value": _complex(value.value),
                    "root_number": _complex(value.root_number),
                    "closed_form_root_number": _complex(
                        root_number_closed_form(value.form, chi)
                    ),
                    "afe_length": value.afe_length,
                    "error_estimate": value.error_estimate,
                }
                for value in values
            ],
        }
        if values:
            natural = twisted_moment(cell.forms, chi, central_values=values)
            entry["moment_natural"] = natural.moment
            entry["ratio"] = natural.ratio
            entry["max_l_ratio"] = max_central_ratio(values)
        if cell.weights is not None:
            entry["moment_harmonic"] = twisted_moment(
                cell.forms, chi, Weighting.HARMONIC, weights=cell.weights
            ).moment
        report.append(entry)
    return report
