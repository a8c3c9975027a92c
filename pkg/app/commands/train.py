import argparse
import logging
from pathlib import Path

from app.commands.common import TRAIN_FLAGS, add_common_flags, add_flags, resolve, snr_dir
from app.errors import TrainingDivergedError
from app.models.config import ExperimentConfig
from app.services.artifacts import ensure_out_dir, write_resolved_config, write_trace
from app.services.checkpoint import checkpoint_save
from app.services.trainer_service import train_two_phase

logger = logging.getLogger(__name__)

CHECKPOINT_FILE = "model.ckpt"
TRACE_FILE = "trace.csv"


def register(subparsers) -> None:
    parser = subparsers.add_parser("train", help="two-phase training of the shaping networks")
    add_common_flags(parser)
    add_flags(parser, TRAIN_FLAGS)
    parser.add_argument(
        "--snr-grid", dest="snr_grid", default=None,
        help="train one model per SNR into <out>/snr_<value>/",
    )
    parser.set_defaults(func=run)


def train_one(cfg: ExperimentConfig, out_dir: Path) -> None:
    out_dir = ensure_out_dir(out_dir)
    write_resolved_config(cfg, out_dir)
    try:
        run = train_two_phase(cfg.to_train_config())
    except TrainingDivergedError as e:
        write_trace(out_dir / TRACE_FILE, cfg, e.trace)
        logger.error("Training diverged at step %d; partial trace in %s", e.step, out_dir / TRACE_FILE)
        raise
    checkpoint_save(run, out_dir / CHECKPOINT_FILE)
    write_trace(out_dir / TRACE_FILE, cfg, run.trace)
    logger.info("Final replay loss %.6f after phase %d", run.final_loss, run.phase, extra={"snr_db": cfg.snr_db})


def run(args: argparse.Namespace) -> int:
    cfg = resolve(args)
    out_dir = cfg.require_out_dir()
    cfg.require_seed()

    if args.snr_grid is None:
        train_one(cfg, out_dir)
        return 0

    logger.info("Training %d models over SNR grid %s", len(cfg.snr_grid), cfg.snr_grid)
    for snr in cfg.snr_grid:
        train_one(cfg.model_copy(update={"snr_db": snr}), snr_dir(out_dir, snr))
    return 0
