import argparse
import logging

from app.baselines import qam_constellation
from app.commands.common import EVAL_FLAGS, add_common_flags, add_flags, resolve
from app.errors import SystemKindError
from app.models.config import ExperimentConfig
from app.services.artifacts import write_curve, write_resolved_config
from app.services.evaluation_service import PointEstimate, eval_mi, eval_papr_ccdf, eval_ser, metric_curve
from app.services.trainer_service import train_reference_demapper
from app.systems import get_system

logger = logging.getLogger(__name__)

BASELINE_KINDS = ("uniform", "clip", "slm")


def register(subparsers) -> None:
    parser = subparsers.add_parser("baseline", help="evaluate a non-learning reference system")
    parser.add_argument("kind", help="uniform, clip or slm")
    parser.add_argument("--metric", choices=("mi", "ser", "papr"), required=True)
    parser.add_argument("--m", dest="m", type=int, default=None)
    parser.add_argument("--n-data", dest="n_data", type=int, default=None)
    parser.add_argument("--snr-db", dest="snr_db", type=float, default=None)
    parser.add_argument("--cr-db", dest="cr_db", type=float, default=None, help="clipping ratio in dB (clip)")
    parser.add_argument("--u", dest="slm_u", type=int, default=None, help="SLM candidates (slm)")
    parser.add_argument(
        "--reference-steps", dest="reference_steps", type=int, default=None,
        help="training steps of the auxiliary demapper behind uniform MI",
    )
    parser.add_argument("--lr", dest="lr", type=float, default=None)
    parser.add_argument("--batch-symbols", dest="batch_symbols", type=int, default=None)
    add_common_flags(parser)
    add_flags(parser, EVAL_FLAGS)
    parser.set_defaults(func=run)


def uniform_mi(cfg: ExperimentConfig, snr_db: float, seed: int) -> PointEstimate:
    """MI of uniform QAM through a demapper trained for it at this SNR."""
    train_cfg = cfg.model_copy(update={"snr_db": snr_db}).to_train_config()
    demapper = train_reference_demapper(qam_constellation(cfg.m), train_cfg, cfg.reference_steps)
    system = get_system("uniform", cfg, demapper=demapper)
    n_frames = -(-cfg.n_symbols // cfg.n_data)
    return eval_mi(system, snr_db, n_frames, seed, cfg.threads)


def run(args: argparse.Namespace) -> int:
    if args.kind not in BASELINE_KINDS:
        raise SystemKindError(f"unknown baseline '{args.kind}', expected one of {', '.join(BASELINE_KINDS)}")
    if args.metric == "mi" and args.kind != "uniform":
        raise SystemKindError(f"baseline '{args.kind}' has no soft demapper, MI is only defined for uniform")

    cfg = resolve(args)
    out_dir = cfg.require_out_dir()
    seed = cfg.require_seed()
    write_resolved_config(cfg, out_dir)
    system = get_system(args.kind, cfg)
    logger.info("Baseline %s, metric %s", args.kind, args.metric, extra={"system": args.kind})

    if args.metric == "mi":
        curve = metric_curve("mi", system.name, cfg.snr_grid, lambda snr: uniform_mi(cfg, snr, seed), seed)
        write_curve(out_dir / "mi.csv", cfg, curve)
    elif args.metric == "ser":
        curve = metric_curve(
            "ser", system.name, cfg.snr_grid,
            lambda snr: eval_ser(system, snr, cfg.n_symbols, seed, cfg.threads),
            seed,
        )
        write_curve(out_dir / "ser.csv", cfg, curve)
    else:
        curve = eval_papr_ccdf(system, cfg.n_frames, cfg.thresholds_db, seed, cfg.threads)
        write_curve(out_dir / "ccdf.csv", cfg, curve)
    return 0
