"""Scan configuration."""
import json
import logging
import os
from collections.abc import Mapping
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import voluptuous as vol

from .arith import is_prime
from .const import (
    C_MAX_LIMIT,
    C_MAX_MODE_CERTIFIED,
    C_MAX_MODE_FIXED,
    CHARACTERS_ALL,
    CONF_AFE_LENGTH_MULTIPLIER,
    CONF_C_MAX,
    CONF_C_MAX_POLICY,
    CONF_CHARACTERS,
    CONF_DIAGNOSTICS,
    CONF_EIGENDATA,
    CONF_INCLUDE_TRIVIAL,
    CONF_MODE,
    CONF_OUTPUT,
    CONF_P_LIST,
    CONF_Q_LIST,
    CONF_RECORD_TIMING,
    CONF_TOLERANCE,
    CONF_WEIGHT,
    CONF_WINDOW_EXPONENT,
    CONF_WORKERS,
    DEFAULT_AFE_LENGTH_MULTIPLIER,
    DEFAULT_C_MAX,
    DEFAULT_TAIL_TOLERANCE,
    DEFAULT_WINDOW_EXPONENT,
    DEFAULT_WORKERS,
    ENV_WORKERS,
)
from .exceptions import ConfigError
from .petersson import CMaxPolicy

_LOGGER = logging.getLogger(__name__)


def prime(value: Any) -> int:
    """Validate a prime."""
    if isinstance(value, bool) or not isinstance(value, int):
        raise vol.Invalid(f"expected an integer, got {value!r}")
    if not is_prime(value):
        raise vol.Invalid(f"{value} is not prime")
    return value


def odd_prime(value: Any) -> int:
    """Validate an odd prime."""
    value = prime(value)
    if value == 2:
        raise vol.Invalid("character modulus must be an odd prime")
    return value


def even_weight(value: Any) -> int:
    """Validate an even weight >= 2."""
    if isinstance(value, bool) or not isinstance(value, int):
        raise vol.Invalid(f"expected an integer, got {value!r}")
    if value < 2 or value % 2:
        raise vol.Invalid(f"weight {value} is not even and >= 2")
    return value


def _unique(values: list[int]) -> list[int]:
    if len(set(values)) != len(values):
        raise vol.Invalid("duplicate entries")
    return values


POLICY_SCHEMA = vol.Any(
    vol.Schema(
        {
            vol.Required(CONF_MODE): C_MAX_MODE_CERTIFIED,
            vol.Optional(CONF_TOLERANCE, default=DEFAULT_TAIL_TOLERANCE): vol.All(
                vol.Coerce(float), vol.Range(min=0, min_included=False)
            ),
        }
    ),
    vol.Schema(
        {
            vol.Required(CONF_MODE): C_MAX_MODE_FIXED,
            vol.Required(CONF_C_MAX): vol.All(
                int, vol.Range(min=1, max=C_MAX_LIMIT)
            ),
        }
    ),
)

SCAN_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_Q_LIST): vol.All([prime], vol.Length(min=1), _unique),
        vol.Required(CONF_P_LIST): vol.All([odd_prime], vol.Length(min=1), _unique),
        vol.Optional(CONF_WEIGHT, default=2): even_weight,
        vol.Optional(CONF_CHARACTERS, default=CHARACTERS_ALL): vol.Any(
            CHARACTERS_ALL, vol.All([vol.All(int, vol.Range(min=0))], _unique)
        ),
        vol.Optional(
            CONF_AFE_LENGTH_MULTIPLIER, default=DEFAULT_AFE_LENGTH_MULTIPLIER
        ): vol.All(vol.Coerce(float), vol.Range(min=1.0)),
        vol.Optional(
            CONF_C_MAX_POLICY,
            default={CONF_MODE: C_MAX_MODE_FIXED, CONF_C_MAX: DEFAULT_C_MAX},
        ): POLICY_SCHEMA,
        vol.Optional(CONF_WORKERS, default=DEFAULT_WORKERS): vol.All(
            int, vol.Range(min=1)
        ),
        vol.Optional(CONF_OUTPUT): str,
        vol.Optional(CONF_EIGENDATA, default=list): [str],
        vol.Optional(CONF_INCLUDE_TRIVIAL, default=False): bool,
        vol.Optional(CONF_RECORD_TIMING, default=False): bool,
        vol.Optional(CONF_DIAGNOSTICS): str,
        vol.Optional(CONF_WINDOW_EXPONENT, default=DEFAULT_WINDOW_EXPONENT): vol.All(
            vol.Coerce(float), vol.Range(min=1.0, max=4.0)
        ),
    }
)


@dataclass(frozen=True)
class ScanConfig:
    """Validated scan over a (q, p) grid."""

    q_list: tuple[int, ...]
    p_list: tuple[int, ...]
    k: int = 2
    characters: tuple[int, ...] | None = None
    afe_length_multiplier: float = DEFAULT_AFE_LENGTH_MULTIPLIER
    c_max_policy: CMaxPolicy = CMaxPolicy.fixed(DEFAULT_C_MAX)
    workers: int = DEFAULT_WORKERS
    output: Path | None = None
    eigendata: tuple[Path, ...] = ()
    include_trivial: bool = False
    record_timing: bool = False
    diagnostics: Path | None = None
    window_exponent: float = DEFAULT_WINDOW_EXPONENT

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ScanConfig":
        """Validate a configuration document."""
        try:
            conf = SCAN_SCHEMA(dict(data))
        except vol.MultipleInvalid as ex:
            raise _config_error(ex.errors[0]) from ex
        except vol.Invalid as ex:
            raise _config_error(ex) from ex

        policy_conf = conf[CONF_C_MAX_POLICY]
        if policy_conf[CONF_MODE] == C_MAX_MODE_FIXED:
            policy = CMaxPolicy.fixed(policy_conf[CONF_C_MAX])
        else:
            policy = CMaxPolicy.certified(policy_conf[CONF_TOLERANCE])
        characters = conf[CONF_CHARACTERS]
        return cls(
            q_list=tuple(conf[CONF_Q_LIST]),
            p_list=tuple(conf[CONF_P_LIST]),
            k=conf[CONF_WEIGHT],
            characters=None if characters == CHARACTERS_ALL else tuple(characters),
            afe_length_multiplier=conf[CONF_AFE_LENGTH_MULTIPLIER],
            c_max_policy=policy,
            workers=conf[CONF_WORKERS],
            output=Path(conf[CONF_OUTPUT]) if CONF_OUTPUT in conf else None,
            eigendata=tuple(Path(path) for path in conf[CONF_EIGENDATA]),
            include_trivial=conf[CONF_INCLUDE_TRIVIAL],
            record_timing=conf[CONF_RECORD_TIMING],
            diagnostics=(
                Path(conf[CONF_DIAGNOSTICS]) if CONF_DIAGNOSTICS in conf else None
            ),
            window_exponent=conf[CONF_WINDOW_EXPONENT],
        )

    def cells(self) -> list[tuple[int, int, int]]:
        """Return the (q, p, exponent) triples of the grid in output order.

        Pairs with q = p or q > p^window_exponent lie outside the window.
        """
        cells = []
        for q in sorted(self.q_list):
            for p in sorted(self.p_list):
                if q == p or q > p**self.window_exponent:
                    continue
                first = 0 if self.include_trivial else 1
                exponents = [
                    a
                    for a in range(first, p - 1)
                    if self.characters is None or a in self.characters
                ]
                cells.extend((q, p, a) for a in exponents)
        return cells

    def with_overrides(self, **overrides: Any) -> "ScanConfig":
        """Return a copy with the given non-None fields replaced."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        if (workers := changes.get(CONF_WORKERS)) is not None and workers < 1:
            raise ConfigError(f"{CONF_WORKERS}: must be at least 1, got {workers}")
        return replace(self, **changes)


def _config_error(ex: vol.Invalid) -> ConfigError:
    key = ".".join(str(part) for part in ex.path) or "config"
    return ConfigError(f"{key}: {ex.msg}")


def workers_from_env(config: ScanConfig) -> ScanConfig:
    """Apply the worker count from the environment, if set."""
    if (raw := os.environ.get(ENV_WORKERS)) is None:
        return config
    try:
        workers = int(raw)
    except ValueError as ex:
        raise ConfigError(f"{ENV_WORKERS}: not an integer: {raw!r}") from ex
    _LOGGER.debug("Worker count %d taken from %s", workers, ENV_WORKERS)
    return config.with_overrides(workers=workers)


def load_config(path: Path | str, **overrides: Any) -> ScanConfig:
    """Read a JSON configuration, apply CLI overrides, then the environment."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as ex:
        raise ConfigError(f"cannot read {path}: {ex}") from ex
    except json.JSONDecodeError as ex:
        raise ConfigError(f"{path}: invalid JSON: {ex}") from ex
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    config = ScanConfig.from_dict(data).with_overrides(**overrides)
    return workers_from_env(config)
