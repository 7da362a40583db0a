"""Util module."""
import csv
import dataclasses
import math
from collections.abc import Iterable, Mapping, Sequence
from enum import Enum
from pathlib import Path
from typing import Any

from .const import FLOAT_FORMAT


def dataclass_to_dict(obj: Any) -> dict[str, Any]:
    """Convert dataclass to dict and remove None fields."""
    dic = dataclasses.asdict(obj)
    for key, value in dic.copy().items():
        if value is None:
            dic.pop(key)
        elif isinstance(value, Enum):
            dic[key] = value.value

    return dic


def format_value(value: Any) -> str:
    """Return the canonical text form of a CSV cell."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return FLOAT_FORMAT % value
    return str(value)


def format_row(row: Mapping[str, Any]) -> dict[str, str]:
    """Return the row with every value formatted."""
    return {key: format_value(value) for key, value in row.items()}


def write_csv(
    path: Path | str,
    columns: Sequence[str],
    rows: Iterable[Mapping[str, Any]],
    footer: Mapping[str, Any] | None = None,
) -> None:
    """Write rows with fixed columns, missing cells empty, and a footer."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(
            handle,
            fieldnames=list(columns),
            restval="",
            extrasaction="ignore",
            lineterminator="\n",
        )
        writer.writeheader()
        for row in rows:
            writer.writerow(format_row(row))
        for key, value in (footer or {}).items():
            handle.write(f"# {key}={format_value(value)}\n")
