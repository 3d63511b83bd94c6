import argparse
import logging
import sys
from typing import List, Optional

from telemetry import Telemetry

# Configure logging FIRST; the settings file may raise the level later
Telemetry.configure_basic(logging.WARNING)

logger = logging.getLogger("nc_hilbert.main")

from connectors import dumps
from constants import (
    APP_NAME,
    CENSUS_BATCH_SIZE,
    CENSUS_BUDGET,
    CENSUS_PROGRESS,
    CENSUS_SHARDS,
    CENSUS_WORKERS,
    EXIT_OK,
    LOG_LEVEL,
    TANGENT_MAX_DEGREE,
)
from dependencies import CommandError, get_config, handle_exception
from nchilbert.exceptions import HilbertError, UsageError

import app as handlers


class CommandParser(argparse.ArgumentParser):
    """argparse that raises UsageError instead of exiting."""

    def error(self, message):
        raise UsageError(message)


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not an integer")
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} is not positive")
    return value


def build_parser() -> CommandParser:
    parser = CommandParser(prog=APP_NAME, description="Computations on noncommutative Hilbert schemes.")
    parser.add_argument("--config", help="dotenv-format settings file")
    parser.add_argument("--log-level", dest="log_level", help="overrides LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    def point_command(name, text):
        sub = commands.add_parser(name, help=text)
        sub.add_argument("--point", required=True, help="point JSON (a canonical form or command result also works)")
        return sub

    point_command("check", "check relations and cyclicity of a point")
    point_command("canon", "canonical form of the orbit of a point")
    orbit_eq = point_command("orbit-eq", "decide whether two points lie in one orbit")
    orbit_eq.add_argument("--other", required=True)
    point_command("ideal", "left ideal generators of a point")

    from_ideal = commands.add_parser("from-ideal", help="rebuild a point from ideal data")
    from_ideal.add_argument("--ideal", required=True)

    normal_form = commands.add_parser("normal-form", help="normal form of a polynomial modulo an ideal")
    normal_form.add_argument("--ideal", required=True)
    normal_form.add_argument("--poly", help="polynomial JSON file")
    normal_form.add_argument("--word", help="a single word as comma-separated generator indices")

    for name, text in (("cells", "list cells and their dimensions"), ("count", "point-count polynomial")):
        sub = commands.add_parser(name, help=text)
        sub.add_argument("--m", type=_positive, required=True)
        sub.add_argument("--n", type=_positive, required=True)

    def census_flags(sub):
        sub.add_argument("--budget", type=_positive, help="overrides CENSUS_BUDGET")
        sub.add_argument("--shards", type=_positive, help="overrides CENSUS_SHARDS")
        sub.add_argument("--workers", type=int, help="overrides CENSUS_WORKERS")
        sub.add_argument("--batch-size", dest="batch_size", type=_positive, help="overrides CENSUS_BATCH_SIZE")
        sub.add_argument("--progress", action="store_true", default=None, help="show a progress bar on stderr")

    census = commands.add_parser("census", help="brute-force orbit count over F_q")
    census.add_argument("--algebra", required=True)
    census.add_argument("--n", type=_positive, required=True)
    census.add_argument("--q", type=_positive, required=True)
    census_flags(census)

    fit = commands.add_parser("fit", help="compare census counts with the cell polynomial")
    fit.add_argument("--m", type=_positive, required=True)
    fit.add_argument("--n", type=_positive, required=True)
    fit.add_argument("--primes", required=True, help="comma-separated primes")
    census_flags(fit)

    embed = point_command("embed", "projective coordinates from chart determinants")
    embed.add_argument("--charts", help="JSON array of charts; defaults to all word charts")
    embed.add_argument("--max-length", dest="max_length", type=int, help="word length of the default family")
    embed.add_argument("--power", type=_positive, default=1)

    tangent = point_command("tangent", "tangent space dimensions at a point")
    tangent.add_argument("--max-degree", dest="max_degree", type=_positive, help="overrides TANGENT_MAX_DEGREE")

    reduce = point_command("reduce-mod-p", "reduce a rational point modulo a prime")
    reduce.add_argument("--p", type=_positive, required=True)

    veronese = commands.add_parser("veronese", help="Veronese degree bound")
    veronese.add_argument("--degrees", required=True, help="comma-separated generator degrees")

    embed_check = commands.add_parser("embed-check", help="closed embedding of the Hilbert scheme of a quotient")
    embed_check.add_argument("--algebra", required=True)
    embed_check.add_argument("--quotient", required=True)
    embed_check.add_argument("--n", type=_positive, required=True)
    embed_check.add_argument("--q", type=_positive, required=True)
    census_flags(embed_check)

    return parser


def _overrides(args) -> dict:
    values = {
        LOG_LEVEL: getattr(args, "log_level", None),
        CENSUS_BUDGET: getattr(args, "budget", None),
        CENSUS_SHARDS: getattr(args, "shards", None),
        CENSUS_WORKERS: getattr(args, "workers", None),
        CENSUS_BATCH_SIZE: getattr(args, "batch_size", None),
        CENSUS_PROGRESS: getattr(args, "progress", None),
        TANGENT_MAX_DEGREE: getattr(args, "max_degree", None),
    }
    return {k: str(v) for k, v in values.items() if v is not None}


def _error_result(error: CommandError, diagnostics: List[str]) -> dict:
    payload = {"error": error.message}
    if error.path:
        payload["path"] = error.path
    cause = error.__cause__
    if cause is not None:
        payload["type"] = type(cause).__name__
    return {"status": "error", "payload": payload, "diagnostics": diagnostics}


def run(argv: Optional[List[str]] = None) -> int:
    """Runs one command, prints its result as JSON on stdout and returns the exit code."""
    diagnostics: List[str] = []
    tracer = Telemetry.get_tracer("nc_hilbert.main")
    try:
        try:
            args = build_parser().parse_args(argv)
            config = get_config('refresh', settings_file=args.config, overrides=_overrides(args))
            Telemetry.configure_logging(config)
            Telemetry.configure_tracing(config)
        except HilbertError as e:
            handle_exception(e)

        with tracer.start_as_current_span(f"command {args.command}") as span:
            try:
                logger.info("Running %s", args.command)
                payload = handlers.HANDLERS[args.command](args, config, diagnostics)
            except HilbertError as e:
                Telemetry.record_exception(span, e)
                handle_exception(e)
            except (RecursionError, MemoryError) as e:
                Telemetry.record_exception(span, e)
                handle_exception(e)
    except CommandError as error:
        print(dumps(_error_result(error, diagnostics)))
        return error.exit_code

    print(dumps({"status": "ok", "payload": payload, "diagnostics": diagnostics}))
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
