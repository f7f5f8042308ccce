import argparse
import logging
import os
import sys
from typing import List

from vaesynth.cli.commands import COMMANDS
from vaesynth.cli.config import resolve_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2


class UsageError(ValueError):
    """Raised for a malformed command line."""


class ArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message):
        raise UsageError(message)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="vaesynth",
        description="Train a variational autoencoder on a labeled image set, expand the set with synthetic "
                    "images and evaluate the result.")
    parser.add_argument("command", choices=list(COMMANDS), help="Pipeline step to run.")
    parser.add_argument("overrides", nargs="*", metavar="key=value", help="Configuration overrides.")
    parser.add_argument("-c", "--config", default=None, help="JSON configuration file.")
    parser.add_argument("-s", "--seed", type=int, default=None, help="Master seed, overrides every other source.")
    parser.add_argument("-o", "--out", default=None, help="Output directory.")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log progress.")
    return parser


def main(argv: List[str] | None = None) -> int:
    """
    Run one pipeline command.

    :param argv: Command line arguments without the program name; defaults to sys.argv[1:].
    :return: 0 on success, 1 on invalid input or configuration, 2 on an I/O error.
    """
    parser = build_parser()
    try:
        args = parser.parse_intermixed_args(argv)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"vaesynth: {e}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args.config, args.overrides, args.out, args.seed, os.environ)
        print(cfg.to_json(), flush=True)
        COMMANDS[args.command](cfg)
    except OSError as e:
        print(f"vaesynth {args.command}: {e}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError) as e:
        print(f"vaesynth {args.command}: {e}", file=sys.stderr)
        return EXIT_INVALID
    logger.info("%s finished", args.command)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
