import argparse
import logging
from pathlib import Path
from typing import Dict, Optional

from app.commands.common import EVAL_FLAGS, add_common_flags, add_flags, resolve, snr_dir
from app.commands.train import CHECKPOINT_FILE
from app.errors import CheckpointError, ConfigError
from app.models.config import ExperimentConfig
from app.services.artifacts import write_curve, write_resolved_config, write_text
from app.services.checkpoint import checkpoint_load
from app.services.evaluation_service import (
    eval_mi,
    eval_papr_ccdf,
    eval_ser,
    export_constellation,
    metric_curve,
)
from app.services.trainer_service import TrainRun
from app.systems import get_system
from app.systems.shaped import ShapedSystem

logger = logging.getLogger(__name__)

METRICS = ("mi", "ser", "papr", "constellation")
MODEL_KEYS = ("m", "n_data", "snr_db", "lam", "tau", "batch_symbols", "steps_phase1", "steps_phase2", "lr")


def register(subparsers) -> None:
    parser = subparsers.add_parser("eval", help="evaluate a trained checkpoint")
    parser.add_argument(
        "--checkpoint", type=Path, required=True,
        help="model.ckpt, or a sweep directory holding snr_<value>/model.ckpt",
    )
    parser.add_argument("--metric", choices=METRICS, required=True)
    parser.add_argument("--snr-db", dest="snr_db", type=float, default=None, help="SNR for papr/constellation")
    parser.add_argument("--m", dest="m", type=int, default=None)
    parser.add_argument("--n-data", dest="n_data", type=int, default=None)
    add_common_flags(parser)
    add_flags(parser, EVAL_FLAGS)
    parser.set_defaults(func=run)


class ModelSource:
    """One checkpoint for every SNR, or one per SNR from a sweep directory."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self._single: Optional[TrainRun] = None
        self._sweep: Dict[float, TrainRun] = {}

    @property
    def is_sweep(self) -> bool:
        return self.path.is_dir()

    def at(self, snr_db: float) -> TrainRun:
        if not self.is_sweep:
            if self._single is None:
                self._single = checkpoint_load(self.path)
            return self._single
        if snr_db not in self._sweep:
            self._sweep[snr_db] = checkpoint_load(snr_dir(self.path, snr_db) / CHECKPOINT_FILE)
        return self._sweep[snr_db]

    def reference(self) -> TrainRun:
        """The model whose M, N and training settings seed the resolved config."""
        if not self.is_sweep:
            return self.at(0.0)
        candidates = sorted(self.path.glob(f"snr_*/{CHECKPOINT_FILE}"))
        if not candidates:
            raise CheckpointError(f"no snr_*/{CHECKPOINT_FILE} under {self.path}")
        return checkpoint_load(candidates[0])


def check_compatible(cfg: ExperimentConfig, run: TrainRun) -> None:
    for key in ("m", "n_data"):
        if getattr(cfg, key) != getattr(run.config, key):
            raise ConfigError(key, f"checkpoint was trained with {key}={getattr(run.config, key)}")


def shaped_at(source: ModelSource, cfg: ExperimentConfig, snr_db: float) -> ShapedSystem:
    run = source.at(snr_db)
    check_compatible(cfg, run)
    return get_system("shaped", cfg, nets=run.nets, snr_db=snr_db)


def run(args: argparse.Namespace) -> int:
    source = ModelSource(args.checkpoint)
    reference = source.reference()
    trained = reference.config.model_dump()
    cfg = resolve(args, base={k: trained[k] for k in MODEL_KEYS})
    out_dir = cfg.require_out_dir()
    seed = cfg.require_seed()
    check_compatible(cfg, reference)
    write_resolved_config(cfg, out_dir)

    if args.metric == "mi":
        n_frames = -(-cfg.n_symbols // cfg.n_data)
        curve = metric_curve(
            "mi", "shaped", cfg.snr_grid,
            lambda snr: eval_mi(shaped_at(source, cfg, snr), snr, n_frames, seed, cfg.threads),
            seed,
        )
        write_curve(out_dir / "mi.csv", cfg, curve)
    elif args.metric == "ser":
        curve = metric_curve(
            "ser", "shaped", cfg.snr_grid,
            lambda snr: eval_ser(shaped_at(source, cfg, snr), snr, cfg.n_symbols, seed, cfg.threads),
            seed,
        )
        write_curve(out_dir / "ser.csv", cfg, curve)
    elif args.metric == "papr":
        system = shaped_at(source, cfg, cfg.snr_db)
        curve = eval_papr_ccdf(system, cfg.n_frames, cfg.thresholds_db, seed, cfg.threads)
        write_curve(out_dir / "ccdf.csv", cfg, curve)
    else:
        grid = cfg.snr_grid if args.snr_grid is not None else [cfg.snr_db]
        for snr in grid:
            system = shaped_at(source, cfg, snr)
            body = export_constellation(system.constellation, snr)
            name = "constellation.txt" if args.snr_grid is None else f"constellation_snr_{snr:g}.txt"
            write_text(out_dir / name, cfg, body)
    return 0
