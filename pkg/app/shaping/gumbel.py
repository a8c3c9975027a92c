"""
Gumbel-max sampling with a softmax relaxation and a straight-through
estimator: the forward pass sees the one-hot sample, the backward pass sees
the relaxed sample.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.core import Tensor, straight_through

logger = logging.getLogger(__name__)

PROB_FLOOR = 1e-30


@dataclass
class SamplerStats:
    clamped: int = 0


sampler_stats = SamplerStats()


@dataclass(frozen=True)
class SymbolDraw:
    hard: np.ndarray   # [B, M] one-hot
    soft: Tensor       # [B, M] relaxed sample
    index: np.ndarray  # [B]


def sample_gumbel(shape, rng: np.random.Generator) -> np.ndarray:
    """-log(-log(u)), u ~ U(0, 1)."""
    u = np.maximum(rng.random(shape), np.finfo(np.float64).tiny)
    return -np.log(-np.log(u))


def gumbel_draw(
    probs: Tensor,
    tau: float,
    rng: Optional[np.random.Generator] = None,
    batch: int = 1,
    gumbel: Optional[np.ndarray] = None,
    stats: Optional[SamplerStats] = None,
) -> SymbolDraw:
    """
    Draw `batch` symbols from `probs`. Pass `gumbel` ([batch, M]) to replay a
    fixed noise realization instead of consuming `rng`.
    """
    if tau <= 0:
        raise ValueError(f"temperature must be positive, got {tau}")
    stats = stats if stats is not None else sampler_stats
    m = probs.shape[-1]

    n_clamped = int(np.count_nonzero(probs.data < PROB_FLOOR))
    if n_clamped:
        stats.clamped += n_clamped
        logger.warning("Clamped %d symbol probabilities to %g before log", n_clamped, PROB_FLOOR)

    if gumbel is None:
        if rng is None:
            raise ValueError("gumbel_draw() needs either rng or a gumbel realization")
        gumbel = sample_gumbel((batch, m), rng)

    perturbed = probs.clamp_min(PROB_FLOOR).log() + gumbel
    index = np.argmax(perturbed.data, axis=-1)
    hard = np.eye(m)[index]
    soft = (perturbed * (1.0 / tau)).softmax(axis=-1)
    return SymbolDraw(hard=hard, soft=soft, index=index)


def ste_combine(draw: SymbolDraw) -> Tensor:
    return straight_through(draw.hard, draw.soft)
