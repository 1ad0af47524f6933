import argparse
import logging
import sys
from collections.abc import Sequence

from glm_optimal_scaling import __version__
from glm_optimal_scaling.commands import cv, fit, plotdata, predict
from glm_optimal_scaling.config import get_settings
from glm_optimal_scaling.exceptions import USAGE_ERRORS, GlmOsError
from glm_optimal_scaling.logging_config import log_message, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glm-os",
        description="Logistic regression with optimal scaling transformations of the predictors",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    fit.register(subparsers)
    cv.register(subparsers)
    predict.register(subparsers)
    plotdata.register(subparsers)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand and return its exit status.

    Input and configuration problems exit with 2, other library errors
    with 1. Warnings never change the exit status.
    """
    # Logging is configured once, here
    setup_logging()
    args = build_parser().parse_args(argv)
    logger.debug(
        log_message(
            "Starting command", command=args.command, environment=get_settings().environment
        )
    )
    try:
        status: int = args.handler(args)
    except USAGE_ERRORS as e:
        logger.error(log_message("Command failed", command=args.command, error=str(e)))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except GlmOsError as e:
        logger.error(log_message("Command failed", command=args.command, error=str(e)))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    return status


if __name__ == "__main__":
    sys.exit(main())
