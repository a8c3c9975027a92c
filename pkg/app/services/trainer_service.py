"""
End-to-end training of the shaping networks.

One step: NN1 gives the symbol distribution, Gumbel-max draws a batch of
symbols (straight-through into the relaxed sample), NN2's normalized
constellation maps them to data subcarriers, the ACO chain modulates, clips
and adds noise, NN3 demaps, and the loss is cross-entropy minus entropy,
plus lambda times the batch-mean PAPR in phase 2.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from app.baselines.qam import UniformQam
from app.config import get_settings
from app.core import Adam, ComplexTensor, Mlp, Tensor, stack
from app.errors import NonFiniteError, NonFiniteGradientError, TrainingDivergedError
from app.models.config import TrainConfig
from app.models.results import LossBreakdown, TraceRow
from app.models.signals import NoiseSpec
from app.ofdm import channel, demodulate, draw_noise, modulate, papr
from app.shaping import (
    NetConfig,
    ShapingNetworks,
    gumbel_draw,
    nn1_distribution,
    nn2_constellation,
    nn3_log_posterior,
    normalize,
    sample_gumbel,
    ste_combine,
)

logger = logging.getLogger(__name__)

# extra stream of the run seed used to replay the final loss
REPLAY_STREAM = 7919


@dataclass(frozen=True)
class BatchNoise:
    gumbel: np.ndarray   # [B, M]
    channel: np.ndarray  # [F, 4N]


@dataclass
class BatchResult:
    loss: LossBreakdown
    total: Tensor
    indices: np.ndarray


@dataclass
class TrainRun:
    config: TrainConfig
    nets: ShapingNetworks
    phase: int
    final_loss: float
    trace: List[TraceRow] = field(default_factory=list)
    seconds: float = 0.0


def make_rngs(seed: int) -> Tuple[np.random.Generator, np.random.Generator]:
    """(initialization stream, data stream) derived from one seed."""
    init_seq, data_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(init_seq), np.random.default_rng(data_seq)


def init_networks(cfg: TrainConfig) -> ShapingNetworks:
    init_rng, _ = make_rngs(cfg.seed)
    return ShapingNetworks(NetConfig(m=cfg.m), init_rng)


def draw_batch_noise(cfg: TrainConfig, rng: np.random.Generator) -> BatchNoise:
    gumbel = sample_gumbel((cfg.batch_symbols, cfg.m), rng)
    z = draw_noise((cfg.frames_per_batch, 4 * cfg.n_data), NoiseSpec.from_snr_db(cfg.snr_db), rng)
    return BatchNoise(gumbel=gumbel, channel=z)


def forward_batch(
    nets: ShapingNetworks,
    cfg: TrainConfig,
    rng: Optional[np.random.Generator] = None,
    phase: int = 1,
    noise: Optional[BatchNoise] = None,
    straight_through: bool = True,
) -> BatchResult:
    """
    Build the loss graph for one batch; pass `noise` to freeze all randomness.

    With `straight_through=False` the one-hot draw is a constant, so NN1 only
    receives gradient through the entropy and the normalization. The forward
    value is the same either way.
    """
    if noise is None:
        noise = draw_batch_noise(cfg, rng)
    frames, n = cfg.frames_per_batch, cfg.n_data

    dist = nn1_distribution(cfg.snr_db, nets)
    draw = gumbel_draw(dist.probs, cfg.tau, gumbel=noise.gumbel)
    constellation = normalize(nn2_constellation(nets), dist.probs)
    one_hot = ste_combine(draw) if straight_through else Tensor(draw.hard)
    symbols = (one_hot @ constellation.points).reshape(frames, n, 2)

    frame = modulate(ComplexTensor(symbols[..., 0], symbols[..., 1]))
    y = channel(frame.time_clipped, NoiseSpec.from_snr_db(cfg.snr_db), z=noise.channel)
    received = demodulate(y)
    y_sub = stack([received.re, received.im], axis=-1).reshape(cfg.batch_symbols, 2)

    cross_entropy = -nn3_log_posterior(y_sub, nets).pick(draw.index).mean()
    entropy = dist.entropy()
    papr_term = papr(frame.time_clipped).mean()

    total = cross_entropy - entropy
    if phase == 2 and cfg.lam > 0:
        total = total + papr_term * cfg.lam

    loss = LossBreakdown(
        cross_entropy=cross_entropy.item(),
        entropy=entropy.item(),
        papr_term=papr_term.item(),
        total=total.item(),
        phase=phase,
    )
    return BatchResult(loss=loss, total=total, indices=draw.index)


class DivergenceGuard:
    """Abort when the loss stays above `factor` x the initial scale for `patience` steps."""

    def __init__(self, factor: float = 10.0, patience: int = 100, floor: float = 1.0):
        self.factor = factor
        self.patience = patience
        self.floor = floor
        self.limit: Optional[float] = None
        self.run = 0

    def observe(self, step: int, total: float, trace: List[TraceRow]) -> None:
        if self.limit is None:
            self.limit = self.factor * max(abs(total), self.floor)
        self.run = self.run + 1 if total > self.limit else 0
        if self.run >= self.patience:
            raise TrainingDivergedError(
                f"loss above {self.limit:.4g} for {self.patience} consecutive steps", step, trace
            )


def replay_loss(nets: ShapingNetworks, cfg: TrainConfig, phase: int) -> float:
    """Loss on the seeded replay batch; stored in checkpoints for verification."""
    rng = np.random.default_rng([cfg.seed, REPLAY_STREAM])
    return forward_batch(nets, cfg, rng, phase=phase).loss.total


def train_two_phase(
    cfg: TrainConfig,
    nets: Optional[ShapingNetworks] = None,
    on_step: Optional[Callable[[TraceRow], None]] = None,
) -> TrainRun:
    """Phase 1 minimizes CE - H; phase 2 continues from its weights adding lambda * PAPR."""
    settings = get_settings()
    _, data_rng = make_rngs(cfg.seed)
    nets = nets if nets is not None else init_networks(cfg)
    optimizer = Adam(nets.parameters(), lr=cfg.lr)

    logger.info(
        "Training M=%d N=%d at %.2f dB: phase 1 %d steps, phase 2 %d steps, "
        "%d symbols/batch (%d frames), lambda=%g, tau=%g, lr=%g",
        cfg.m, cfg.n_data, cfg.snr_db, cfg.steps_phase1, cfg.steps_phase2,
        cfg.batch_symbols, cfg.frames_per_batch, cfg.lam, cfg.tau, cfg.lr,
        extra={"seed": cfg.seed, "snr_db": cfg.snr_db},
    )

    started = time.perf_counter()
    trace: List[TraceRow] = []
    guard = DivergenceGuard()
    step = 0
    last_phase = 1
    for phase, steps in ((1, cfg.steps_phase1), (2, cfg.steps_phase2)):
        if steps == 0:
            continue
        last_phase = phase
        logger.info("Entering phase %d", phase, extra={"phase": phase, "step": step})
        for _ in range(steps):
            step += 1
            try:
                result = forward_batch(nets, cfg, data_rng, phase=phase)
            except NonFiniteError as e:
                raise TrainingDivergedError(f"non-finite loss: {e}", step, trace) from e

            row = TraceRow.from_breakdown(step, result.loss)
            trace.append(row)
            if on_step is not None:
                on_step(row)
            guard.observe(step, row.total, trace)

            result.total.backward()
            try:
                optimizer.step()
            except NonFiniteGradientError as e:
                logger.error("Non-finite gradient for %s at step %d", e.parameter, step)
                raise NonFiniteGradientError(step, e.parameter) from e

            if step % settings.train_log_every == 0:
                logger.info(
                    "step %d phase %d: total=%.5f ce=%.5f H=%.5f mi=%.4f bits papr=%.3f dB",
                    step, phase, row.total, row.cross_entropy, row.entropy,
                    result.loss.mi_bits, row.papr_db,
                    extra={"step": step, "phase": phase},
                )

    final_loss = replay_loss(nets, cfg, last_phase)
    seconds = time.perf_counter() - started
    logger.info("Training finished in %.1f s (%d steps)", seconds, step, extra={"steps": step})
    return TrainRun(config=cfg, nets=nets, phase=last_phase, final_loss=final_loss, trace=trace, seconds=seconds)


def reference_loss(
    demapper: Mlp,
    qam: UniformQam,
    cfg: TrainConfig,
    rng: np.random.Generator,
) -> Tensor:
    """Cross-entropy of an NN3 demapper on uniform QAM frames through the ACO chain."""
    frames, n = cfg.frames_per_batch, cfg.n_data
    indices = rng.integers(0, qam.m, size=cfg.batch_symbols)
    x = modulate(qam.points[indices].reshape(frames, n)).time_clipped.data
    y = x + draw_noise(x.shape, NoiseSpec.from_snr_db(cfg.snr_db), rng)
    received = demodulate(Tensor(y)).numpy().reshape(-1)
    y_sub = Tensor(np.stack([received.real, received.imag], axis=-1))
    return -demapper(y_sub).log_softmax(axis=-1).pick(indices).mean()


def train_reference_demapper(qam: UniformQam, cfg: TrainConfig, steps: int) -> Mlp:
    """Train NN3 alone against a fixed uniform QAM transmitter."""
    init_rng, data_rng = make_rngs(cfg.seed)
    demapper = Mlp(NetConfig(m=qam.m).nn3_widths, "nn3", init_rng)
    optimizer = Adam(demapper.parameters(), lr=cfg.lr)
    logger.info(
        "Training reference demapper for %d-QAM at %.2f dB for %d steps",
        qam.m, cfg.snr_db, steps, extra={"snr_db": cfg.snr_db},
    )
    for step in range(1, steps + 1):
        loss = reference_loss(demapper, qam, cfg, data_rng)
        loss.backward()
        try:
            optimizer.step()
        except NonFiniteGradientError as e:
            raise NonFiniteGradientError(step, e.parameter) from e
    return demapper
