"""
Monte-Carlo evaluation of link systems: MI and SER against SNR, and the
PAPR CCDF of the transmitted frames.

Frame f draws its symbols and then its noise from default_rng([seed, f]).
Frames are processed in fixed blocks and block results are reduced in frame
order, so estimates do not depend on the number of worker threads.
"""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, TypeVar

import numpy as np

from app.config import get_settings
from app.models.results import MetricCurve
from app.models.signals import NoiseSpec
from app.ofdm import ccdf, draw_noise, papr_db
from app.shaping import ShapedConstellation, format_constellation
from app.systems import LinkSystem, Transmission

logger = logging.getLogger(__name__)

T = TypeVar("T")


def frame_rng(seed: int, frame: int) -> np.random.Generator:
    return np.random.default_rng([seed, frame])


def block_frames(n_data: int) -> int:
    return max(1, get_settings().eval_chunk_symbols // n_data)


def run_blocks(n_frames: int, block: int, fn: Callable[[range], T], threads: int = 1) -> List[T]:
    """Apply `fn` to consecutive frame ranges; results come back in frame order."""
    blocks = [range(start, min(start + block, n_frames)) for start in range(0, n_frames, block)]
    if threads <= 1 or len(blocks) <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, blocks))


@dataclass(frozen=True)
class LinkBlock:
    tx: Transmission
    y: np.ndarray


def simulate_block(system: LinkSystem, noise: NoiseSpec, seed: int, frames: range) -> LinkBlock:
    rngs = [frame_rng(seed, f) for f in frames]
    indices = np.concatenate([system.draw_indices(rng) for rng in rngs], axis=0)
    tx = system.transmit(indices)
    z = np.stack([draw_noise(tx.signal.shape[-1], noise, rng) for rng in rngs], axis=0)
    return LinkBlock(tx=tx, y=tx.signal + z)


@dataclass(frozen=True)
class PointEstimate:
    value: float
    n_symbols: int


def eval_mi(
    system: LinkSystem,
    snr_db: float,
    n_frames: int,
    seed: int,
    threads: int = 1,
) -> PointEstimate:
    """H(s) - mean(-log2 q(s|y)) over n_frames * N symbols, in bits."""
    noise = NoiseSpec.from_snr_db(snr_db)

    def block_nll(frames: range) -> float:
        link = simulate_block(system, noise, seed, frames)
        return float(np.sum(system.nll_bits(link.y, link.tx)))

    totals = run_blocks(n_frames, block_frames(system.n_data), block_nll, threads)
    n_symbols = n_frames * system.n_data
    mi = system.entropy_bits() - math.fsum(totals) / n_symbols
    logger.info(
        "MI of %s at %.2f dB: %.4f bits (H=%.4f, %d symbols)",
        system.name, snr_db, mi, system.entropy_bits(), n_symbols,
        extra={"system": system.name, "snr_db": snr_db},
    )
    return PointEstimate(value=mi, n_symbols=n_symbols)


def eval_ser(
    system: LinkSystem,
    snr_db: float,
    n_symbols: int,
    seed: int,
    threads: int = 1,
) -> PointEstimate:
    """Symbol-error rate over at least n_symbols symbols (whole frames), as an exact count ratio."""
    noise = NoiseSpec.from_snr_db(snr_db)
    n_frames = -(-n_symbols // system.n_data)

    def block_errors(frames: range) -> int:
        link = simulate_block(system, noise, seed, frames)
        return int(np.count_nonzero(system.detect(link.y, link.tx) != link.tx.indices))

    errors = sum(run_blocks(n_frames, block_frames(system.n_data), block_errors, threads))
    total = n_frames * system.n_data
    logger.info(
        "SER of %s at %.2f dB: %d/%d errors",
        system.name, snr_db, errors, total,
        extra={"system": system.name, "snr_db": snr_db},
    )
    return PointEstimate(value=errors / total, n_symbols=total)


def eval_papr_ccdf(
    system: LinkSystem,
    n_frames: int,
    thresholds_db: Sequence[float],
    seed: int,
    threads: int = 1,
) -> MetricCurve:
    """CCDF of the per-frame PAPR of the transmitted signal."""
    transmit_seconds: List[float] = []

    def block_paprs(frames: range) -> np.ndarray:
        indices = np.concatenate([system.draw_indices(frame_rng(seed, f)) for f in frames], axis=0)
        started = time.perf_counter()
        tx = system.transmit(indices)
        transmit_seconds.append(time.perf_counter() - started)
        return papr_db(tx.signal)

    paprs = np.concatenate(run_blocks(n_frames, block_frames(system.n_data), block_paprs, threads))
    logger.info(
        "Transmit time of %s: %.1f us/frame over %d frames",
        system.name, 1e6 * sum(transmit_seconds) / n_frames, n_frames,
        extra={"system": system.name},
    )
    return ccdf(paprs, thresholds_db, label=system.name, seed=seed)


def metric_curve(
    kind: str,
    label: str,
    snr_grid: Sequence[float],
    estimate: Callable[[float], PointEstimate],
    seed: int,
) -> MetricCurve:
    """Assemble an MI or SER curve from one estimate per grid SNR."""
    points = [estimate(snr) for snr in snr_grid]
    return MetricCurve(
        label=label,
        kind=kind,
        x=list(snr_grid),
        y=[p.value for p in points],
        n_samples=[p.n_symbols for p in points],
        seed=seed,
    )


def export_constellation(constellation: ShapedConstellation, snr_db: float, extra: Optional[Dict] = None) -> str:
    header = {"snr_db": snr_db, "m": constellation.m, "gamma": float(constellation.gamma.data)}
    header.update(extra or {})
    logger.info(
        "Constellation at %.2f dB: entropy %.4f bits, average energy %.12f",
        snr_db, constellation.entropy_bits(), constellation.average_energy(),
        extra={"snr_db": snr_db},
    )
    return format_constellation(constellation, header)
