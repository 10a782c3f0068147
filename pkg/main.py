import argparse
import sys
from collections.abc import Callable

from pydantic import ValidationError

from commands import bottleneck, certify, classify, curve, gates, qsl, table
from models.config import VERSION
from models.models import CliConfig, ExitCode
from ui.components import error
from utils.exceptions import (
    ConfigError,
    DimensionError,
    HermiticityError,
    NotFoundError,
    PersistenceError,
    QslKitError,
    RangeError,
    TraceError,
    UnitarityError,
)
from utils.logging import reconfigure

COMMANDS: dict[str, Callable[[CliConfig], ExitCode]] = {
    "qsl": qsl,
    "curve": curve,
    "classify": classify,
    "certify": certify,
    "bottleneck": bottleneck,
    "table": table,
    "gates": gates,
}

# Errors caused by what the user passed in, rather than by the computation
USAGE_ERRORS = (
    ConfigError,
    NotFoundError,
    PersistenceError,
    DimensionError,
    HermiticityError,
    TraceError,
    RangeError,
)


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per handler."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--omega-max", type=float, dest="omega_max", help="Spectral-width budget (default 1.0)")
    common.add_argument("--out", "-o", help="Output file (default: stdout)")
    common.add_argument("--format", "-f", choices=["json", "csv", "text"], help="Output format")
    common.add_argument("--debug", "-d", action="store_true", help="Debug logging on stderr")

    gate_arg = argparse.ArgumentParser(add_help=False)
    gate_arg.add_argument("--gate", "-g", help="Library gate name or JSON unitary file")

    certifier_arg = argparse.ArgumentParser(add_help=False)
    certifier_arg.add_argument(
        "--certifiers",
        choices=["pauli", "eigen", "p-only"],
        help="Certifier family built from the gate (default: pauli)",
    )

    parser = argparse.ArgumentParser(
        prog="qslkit",
        description="Exact quantum speed limits and space-curve geometry of quantum gates.",
    )
    parser.add_argument("--version", action="version", version=f"qslkit {VERSION}")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    subparsers.add_parser("qsl", parents=[common, gate_arg], help="Minimal gate time T-star")

    curve_parser = subparsers.add_parser("curve", parents=[common, gate_arg], help="Export a space curve")
    curve_parser.add_argument("--observable", help="Pauli word, e.g. ZZ or -XI")
    curve_parser.add_argument("--steps", type=int, help="Sampling intervals over [0, T-star]")

    subparsers.add_parser("classify", parents=[common, gate_arg], help="Speed limit and curve geometry")

    certify_parser = subparsers.add_parser(
        "certify", parents=[common, gate_arg, certifier_arg], help="Common-commutant test"
    )
    certify_parser.add_argument("--operators", help="JSON list of operators or Pauli words")
    certify_parser.add_argument("--canonical", type=int, help="Canonical two-operator set of dimension N")

    subparsers.add_parser(
        "bottleneck", parents=[common, gate_arg, certifier_arg], help="Bottleneck lower bound"
    )
    subparsers.add_parser("table", parents=[common], help="Recompute the minimal gate time table")
    subparsers.add_parser("gates", parents=[common], help="Dump the gate registry")
    return parser


def load_config(args: argparse.Namespace) -> CliConfig:
    """Validated CliConfig from parsed arguments (unset flags keep their defaults).

    Raises:
        ConfigError: If the arguments violate a CliConfig invariant
    """
    values = {key: value for key, value in vars(args).items() if value is not None}
    try:
        return CliConfig.model_validate(values)
    except ValidationError as e:
        details = "; ".join(err["msg"] for err in e.errors())
        raise ConfigError(details) from e


def cli(argv: list[str] | None = None) -> int:
    """Entry point for CLI."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.command is None:
        parser.print_help(sys.stderr)
        return ExitCode.USAGE

    reconfigure(args.debug)

    try:
        config = load_config(args)
        return int(COMMANDS[config.command](config))
    except UnitarityError as e:
        error(str(e))
        return ExitCode.NOT_UNITARY
    except USAGE_ERRORS as e:
        error(str(e))
        return ExitCode.USAGE
    except QslKitError as e:
        error(str(e))
        return ExitCode.FAILED


if __name__ == "__main__":
    sys.exit(cli())
