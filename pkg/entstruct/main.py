"""Command-line entry point.

Exit codes: 0 on success, 2 on usage errors, 1 on runtime and I/O failures.
"""

import argparse
import sys

from entstruct import __version__
from entstruct.cli import commands
from entstruct.core.exceptions import EntStructError, UsageError
from entstruct.core.logging import logger, setup_logging

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, default=None, help="qubit count")
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker count (default: all cores)")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per command."""
    parser = argparse.ArgumentParser(
        prog="entstruct",
        description="Learn and analyze entanglement intactness and depth of multi-qubit states",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a labeled dataset")
    _common(gen)
    gen.add_argument("--per-comp", type=int, default=None,
                     help="samples per composition (default from settings)")
    gen.set_defaults(handler=commands.cmd_gen)

    train = sub.add_parser("train", help="train a classifier on a dataset")
    _common(train)
    train.add_argument("--dataset", required=True, help="dataset file or directory")
    train.add_argument("--arch", choices=("base", "ghz"), default="base")
    train.add_argument("--epochs", type=int, default=None, help="override the preset epochs")
    train.add_argument("--validation-points", type=int, default=None,
                       help="sweep-validation grid size for the ghz preset")
    train.set_defaults(handler=commands.cmd_train)

    evaluate = sub.add_parser("eval", help="accuracy of a model on a dataset split")
    _common(evaluate)
    evaluate.add_argument("--model", required=True)
    evaluate.add_argument("--dataset", required=True)
    evaluate.add_argument("--split", choices=("train", "validation", "test"), default="test")
    evaluate.set_defaults(handler=commands.cmd_eval)

    sweep = sub.add_parser("sweep", help="predict along a GHZ-family parameter grid")
    _common(sweep)
    sweep.add_argument("--model", required=True)
    sweep.add_argument("--kind", choices=("gen-ghz", "noised-ghz"), required=True)
    sweep.add_argument("--points", type=int, default=None)
    sweep.set_defaults(handler=commands.cmd_sweep)

    bounds = sub.add_parser("bounds", help="extract learned bounds from a noised-GHZ sweep")
    _common(bounds)
    bounds.add_argument("--sweep", required=True, help="sweep CSV written by 'sweep'")
    bounds.add_argument("--tolerance", type=float, default=None)
    bounds.set_defaults(handler=commands.cmd_bounds)

    predict = sub.add_parser("predict", help="classify measured feature vectors")
    _common(predict)
    predict.add_argument("--model", required=True)
    predict.add_argument("--input", required=True, help="measurement CSV")
    predict.set_defaults(handler=commands.cmd_predict)

    return parser


def main(argv: list[str] | None = None) -> int:
    """Parse ``argv``, run the selected command and return its exit code."""
    setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        return args.handler(args)
    except UsageError as e:
        logger.error(f"Usage error: {e.message}", extra={"code": e.code})
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_USAGE
    except EntStructError as e:
        logger.error(f"{args.command} failed: {e.message}",
                     extra={"code": e.code, "context": e.context})
        print(f"error [{e.code}]: {e.message}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
