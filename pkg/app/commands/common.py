import argparse
from pathlib import Path
from typing import Any, Dict, Optional

from app.config import get_settings
from app.models.config import ExperimentConfig, resolve_experiment_config

# flag dest -> ExperimentConfig key
TRAIN_FLAGS = {
    "m": ("--m", int, "constellation size M"),
    "n_data": ("--n-data", int, "data subcarriers per frame"),
    "snr_db": ("--snr-db", float, "training SNR in dB"),
    "lam": ("--lambda", float, "PAPR penalty weight for phase 2"),
    "tau": ("--tau", float, "Gumbel-Softmax temperature"),
    "batch_symbols": ("--batch-symbols", int, "symbols per mini-batch"),
    "steps_phase1": ("--steps-phase1", int, "optimizer steps in phase 1"),
    "steps_phase2": ("--steps-phase2", int, "optimizer steps in phase 2"),
    "lr": ("--lr", float, "Adam learning rate"),
}
EVAL_FLAGS = {
    "snr_grid": ("--snr-grid", str, "SNR grid, start:stop:step or a comma list"),
    "n_frames": ("--n-frames", int, "frames for the PAPR CCDF"),
    "n_symbols": ("--n-symbols", int, "symbols per MI/SER point"),
    "thresholds_db": ("--thresholds-db", str, "PAPR0 thresholds, start:stop:step or a comma list"),
    "threads": ("--threads", int, "evaluation worker threads"),
}


def add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="key=value experiment file")
    parser.add_argument("--seed", type=int, default=None, help="RNG seed (required)")
    parser.add_argument("--out", dest="out_dir", default=None, help="output directory (required)")


def add_flags(parser: argparse.ArgumentParser, flags: Dict[str, tuple]) -> None:
    for dest, (flag, kind, help_text) in flags.items():
        parser.add_argument(flag, dest=dest, type=kind, default=None, help=help_text)


def overrides_from(args: argparse.Namespace, *keys: str) -> Dict[str, Any]:
    values = {key: getattr(args, key, None) for key in keys}
    if "threads" in values and values["threads"] is None:
        values["threads"] = get_settings().threads
    return values


def resolve(args: argparse.Namespace, base: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Defaults < `base` < config file < flags."""
    keys = ["seed", "out_dir", *TRAIN_FLAGS, *EVAL_FLAGS, "cr_db", "slm_u", "reference_steps"]
    overrides = dict(base or {})
    file_cfg = resolve_experiment_config(args.config) if args.config is not None else None
    if file_cfg is not None:
        overrides.update(file_cfg.model_dump(exclude_unset=True))
    overrides.update({k: v for k, v in overrides_from(args, *keys).items() if v is not None})
    return resolve_experiment_config(None, overrides)


def snr_dir(out_dir: Path, snr_db: float) -> Path:
    return Path(out_dir) / f"snr_{snr_db:g}"
