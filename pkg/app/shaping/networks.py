"""
The three shaping networks.

NN1 maps the SNR (dB, unscaled) to symbol-distribution logits, NN2 maps
one-hot symbol vectors to (Re, Im) constellation points, and NN3 maps one
received data subcarrier (Re, Im) to a posterior over the M symbols. Only
NN1 sees the SNR; one model is trained per SNR point.
"""
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from pydantic import BaseModel, Field

from app.core import Mlp, Tensor

HIDDEN_WIDTHS: Tuple[int, ...] = (128, 512, 128)


class NetConfig(BaseModel):
    model_config = {"frozen": True}

    m: int = Field(..., ge=2, description="Constellation size M")

    @property
    def nn1_widths(self) -> Tuple[int, ...]:
        return (1, *HIDDEN_WIDTHS, self.m)

    @property
    def nn2_widths(self) -> Tuple[int, ...]:
        return (self.m, *HIDDEN_WIDTHS, 2)

    @property
    def nn3_widths(self) -> Tuple[int, ...]:
        return (2, *HIDDEN_WIDTHS, self.m)


class ShapingNetworks:
    """theta_P (nn1), theta_G (nn2) and theta_D (nn3)."""

    def __init__(self, config: NetConfig, rng: np.random.Generator):
        self.config = config
        self.nn1 = Mlp(config.nn1_widths, "nn1", rng)
        self.nn2 = Mlp(config.nn2_widths, "nn2", rng)
        self.nn3 = Mlp(config.nn3_widths, "nn3", rng)

    @property
    def m(self) -> int:
        return self.config.m

    def parameters(self) -> Dict[str, Tensor]:
        return {**self.nn1.parameters(), **self.nn2.parameters(), **self.nn3.parameters()}


@dataclass(frozen=True)
class SymbolDistribution:
    probs: Tensor
    log_probs: Tensor

    def entropy(self) -> Tensor:
        """-sum p log p, nats."""
        return -(self.probs * self.log_probs).sum()


def nn1_distribution(snr_db: float, nets: ShapingNetworks) -> SymbolDistribution:
    logits = nets.nn1(Tensor([[float(snr_db)]]))
    log_probs = logits.log_softmax(axis=-1).reshape(nets.m)
    return SymbolDistribution(probs=log_probs.exp(), log_probs=log_probs)


def nn2_constellation(nets: ShapingNetworks) -> Tensor:
    """Unnormalized points, row i = (Re, Im) of symbol i, from the M x M identity."""
    return nets.nn2(Tensor(np.eye(nets.m)))


def nn3_log_posterior(y_sub: Tensor, nets: ShapingNetworks) -> Tensor:
    return nets.nn3(y_sub).log_softmax(axis=-1)


def nn3_demap(y_sub: Tensor, nets: ShapingNetworks) -> Tensor:
    """Posterior over the M symbols for each received (Re, Im) row."""
    return nets.nn3(y_sub).softmax(axis=-1)
