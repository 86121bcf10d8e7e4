import argparse
import logging
import sys
from typing import List, Optional

from app.api.v1.commands import compile as compile_cmd
from app.api.v1.commands import library as library_cmd
from app.api.v1.commands import predicate as predicate_cmd
from app.api.v1.commands import run as run_cmd
from app.api.v1.commands import translate as translate_cmd
from app.api.v1.commands import verify as verify_cmd
from app.core.config import get_settings
from app.core.logging import configure_logging
from app.domain.errors import WorkbenchError

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog="iompp", description=f"{settings.APP_NAME}: compile and check IO simulations")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # ------- Commands -------
    compile_cmd.register(subparsers)
    run_cmd.register(subparsers)
    predicate_cmd.register(subparsers)
    verify_cmd.register(subparsers)
    translate_cmd.register(subparsers)
    library_cmd.register(subparsers)       # list / self-test shipped protocols
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    level = logging.DEBUG if (args.verbose or settings.DEBUG) else logging.INFO
    if args.quiet:
        level = logging.WARNING
    configure_logging(level=level)

    try:
        code = args.handler(args)
    except WorkbenchError as e:
        logger.error("%s: %s", type(e).__name__, e)
        code = e.code
    logger.debug("command=%s exit=%d", args.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
