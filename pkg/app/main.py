import argparse
import logging
from typing import Optional, Sequence

from app.commands import COMMANDS
from app.config import get_settings
from app.errors import (
    CheckpointError,
    ConfigError,
    NonFiniteGradientError,
    SystemKindError,
    TrainingDivergedError,
)

logger = logging.getLogger("app")

EXIT_BAD_INPUT = 2
EXIT_DIVERGED = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oshape",
        description="ACO-OFDM constellation shaping: training, evaluation and baselines.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def configure_logging() -> None:
    logging.basicConfig(
        level=getattr(logging, get_settings().log_level.upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )


def run(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CheckpointError, SystemKindError) as e:
        logger.error("%s", e)
        return EXIT_BAD_INPUT
    except (TrainingDivergedError, NonFiniteGradientError) as e:
        logger.error("Training aborted: %s", e)
        return EXIT_DIVERGED
