"""Command line interface."""
import argparse
import json
import logging
import math
import sys
from collections.abc import Sequence
from pathlib import Path

import voluptuous as vol

from .characters import parse_character_label
from .config import ScanConfig, load_config
from .const import (
    C_MAX_MODE_FIXED,
    CHARACTERS_ALL,
    CONF_AFE_LENGTH_MULTIPLIER,
    CONF_C_MAX,
    CONF_C_MAX_POLICY,
    CONF_CHARACTERS,
    CONF_EIGENDATA,
    CONF_INCLUDE_TRIVIAL,
    CONF_MODE,
    CONF_P_LIST,
    CONF_Q_LIST,
    CONF_WEIGHT,
    DEFAULT_AFE_LENGTH_MULTIPLIER,
    DEFAULT_C_MAX,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    EXIT_VERIFICATION_FAILED,
    STARTUP_MESSAGE,
    VERIFY_SUITES,
)
from .controller import moment_report, scan
from .eigendata import (
    ETA_PRODUCT_WEIGHTS,
    eta_product_eigendata,
    export_eigendata,
    ingest_eigendata,
    newform_eigendata,
)
from .exceptions import ConfigError, DomainError, TwistedMomentsError
from .modular_symbols import build_space
from .util import dataclass_to_dict
from .verify import first_failure, run_verification, write_report

_LOGGER = logging.getLogger(__name__)


def _verify(args: argparse.Namespace) -> int:
    results = run_verification(args.suite, [Path(path) for path in args.eigendata])
    if args.report:
        write_report(args.report, results)
    for result in results:
        status = "ok" if result.passed else "FAILED"
        print(
            f"{status:6} {result.suite}/{result.identity}: "
            f"residual {result.residual:.3g} (tolerance {result.tolerance:.3g})"
        )
    if (failure := first_failure(results)) is not None:
        detail = failure.detail or f"residual {failure.residual:.6g}"
        print(
            f"first failure: {failure.suite}/{failure.identity}: {detail}",
            file=sys.stderr,
        )
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def _eigendata_compute(args: argparse.Namespace) -> int:
    if args.eta:
        forms = [eta_product_eigendata(args.q, args.nmax)]
    else:
        forms = newform_eigendata(build_space(args.q), args.nmax)
    export_eigendata(forms, args.out)
    for form in forms:
        print(f"{form.label}: {form.n_max} coefficients, fricke {form.fricke_sign:+d}")
    return EXIT_OK


def _eigendata_ingest(args: argparse.Namespace) -> int:
    for form in ingest_eigendata(args.path):
        print(
            json.dumps(
                {
                    "form": form.label,
                    "level": form.level,
                    "weight": form.weight,
                    "n_max": form.n_max,
                    "fricke": form.fricke_sign,
                    "provenance": form.provenance.value,
                }
            )
        )
    return EXIT_OK


def _moment(args: argparse.Namespace) -> int:
    if args.q == args.p:
        raise ConfigError(f"q and p must differ, got {args.q} twice")
    characters: str | list[int] = CHARACTERS_ALL
    include_trivial = False
    if args.char:
        try:
            chi = parse_character_label(args.char)
        except DomainError as ex:
            raise ConfigError(f"char: {ex}") from ex
        if chi.modulus != args.p:
            raise ConfigError(f"char: modulus {chi.modulus} differs from p={args.p}")
        characters = [chi.exponent]
        include_trivial = chi.exponent == 0
    config = ScanConfig.from_dict(
        {
            CONF_Q_LIST: [args.q],
            CONF_P_LIST: [args.p],
            CONF_WEIGHT: args.k,
            CONF_CHARACTERS: characters,
            CONF_INCLUDE_TRIVIAL: include_trivial,
            CONF_EIGENDATA: args.eigendata,
            CONF_AFE_LENGTH_MULTIPLIER: args.afe_length_multiplier,
            CONF_C_MAX_POLICY: {CONF_MODE: C_MAX_MODE_FIXED, CONF_C_MAX: args.c_max},
        }
    ).with_overrides(window_exponent=math.inf)
    print(json.dumps(moment_report(config), indent=2))
    return EXIT_OK


def _scan(args: argparse.Namespace) -> int:
    config = load_config(
        args.config,
        output=Path(args.out) if args.out else None,
        workers=args.workers,
    )
    _LOGGER.debug("Scan configuration: %s", dataclass_to_dict(config))
    scan(config)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser."""
    parser = argparse.ArgumentParser(
        prog="twisted_moments",
        description="Desk-scale experiments for twisted modular L-functions.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="run identity and oracle suites")
    verify.add_argument("suite", nargs="?", default="all", choices=VERIFY_SUITES)
    verify.add_argument("--eigendata", nargs="*", default=[], metavar="PATH")
    verify.add_argument("--report", metavar="PATH")
    verify.set_defaults(handler=_verify)

    eigendata = commands.add_parser("eigendata", help="compute or ingest eigendata")
    eigendata_commands = eigendata.add_subparsers(dest="action", required=True)
    compute = eigendata_commands.add_parser("compute")
    compute.add_argument("--q", type=int, required=True)
    compute.add_argument("--nmax", type=int, required=True)
    compute.add_argument("--out", required=True)
    compute.add_argument(
        "--eta",
        action="store_true",
        help=f"eta product newform, levels {sorted(ETA_PRODUCT_WEIGHTS)}",
    )
    compute.set_defaults(handler=_eigendata_compute)
    ingest = eigendata_commands.add_parser("ingest")
    ingest.add_argument("path")
    ingest.set_defaults(handler=_eigendata_ingest)

    moment = commands.add_parser("moment", help="central values at one (q, p)")
    moment.add_argument("--q", type=int, required=True)
    moment.add_argument("--p", type=int, required=True)
    moment.add_argument("--k", type=int, default=2)
    moment.add_argument("--char", metavar="p:a")
    moment.add_argument("--eigendata", nargs="*", default=[], metavar="PATH")
    moment.add_argument("--c-max", type=int, default=DEFAULT_C_MAX)
    moment.add_argument(
        "--afe-length-multiplier", type=float, default=DEFAULT_AFE_LENGTH_MULTIPLIER
    )
    moment.set_defaults(handler=_moment)

    scan_parser = commands.add_parser("scan", help="moment scan over a (q, p) grid")
    scan_parser.add_argument("--config", required=True)
    scan_parser.add_argument("--out")
    scan_parser.add_argument("--workers", type=int)
    scan_parser.set_defaults(handler=_scan)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line interface."""
    args = build_parser().parse_args(argv)
    level = logging.WARNING
    if args.verbose == 1:
        level = logging.INFO
    elif args.verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    _LOGGER.info(STARTUP_MESSAGE)

    try:
        return int(args.handler(args))
    except (ConfigError, vol.Invalid) as ex:
        print(f"configuration error: {ex}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except TwistedMomentsError as ex:
        print(f"error: {type(ex).__name__}: {ex}", file=sys.stderr)
        return EXIT_VERIFICATION_FAILED


if __name__ == "__main__":
    sys.exit(main())
