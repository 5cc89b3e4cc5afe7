"""Command-line entry: one subcommand module per workflow step."""

from typing import List, Optional

from pydantic import ValidationError

from app.cli import (
    detect_command,
    filter_command,
    fixture_command,
    report_command,
    stats_command,
    sweep_command,
    vectors_command,
)
from app.cli.common import BenchArgumentParser
from app.core.config import settings
from app.core.errors import BenchError, UsageError
from app.core.logging import configure_logging, get_logger

logger = get_logger()

COMMANDS = [
    stats_command,
    filter_command,
    vectors_command,
    detect_command,
    sweep_command,
    report_command,
    fixture_command,
]


def build_parser() -> BenchArgumentParser:
    parser = BenchArgumentParser(prog="likeminded-bench", description=settings.APP_NAME)
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=BenchArgumentParser)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run a subcommand; 0 on success, 1 on usage errors, 2 on data errors."""
    configure_logging()
    try:
        args = build_parser().parse_args(argv)
        return args.handler(args)
    except ValidationError as e:
        logger.error(f"Invalid arguments: {e}")
        return UsageError.exit_code
    except BenchError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
