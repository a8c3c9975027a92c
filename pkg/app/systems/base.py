import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.core import Tensor
from app.errors import SystemKindError
from app.ofdm import demodulate


@dataclass(frozen=True)
class Transmission:
    indices: np.ndarray                    # [F, N] transmitted symbol indices
    signal: np.ndarray                     # [F, 4N] real transmit samples
    side_info: Optional[np.ndarray] = None  # e.g. the SLM candidate per frame


def received_subcarriers(y: np.ndarray) -> np.ndarray:
    """Complex data subcarriers [..., N] of received frames [..., 4N]."""
    return demodulate(Tensor(y)).numpy()


def subcarrier_pairs(y_sub: np.ndarray) -> Tensor:
    y_sub = np.asarray(y_sub).reshape(-1)
    return Tensor(np.stack([y_sub.real, y_sub.imag], axis=-1))


class LinkSystem(ABC):
    """
    Interface that every transmit/receive system implements.
    The evaluation service runs MI, SER and PAPR over any of them.
    """

    name: str = "system"

    def __init__(self, m: int, n_data: int):
        self.m = m
        self.n_data = n_data

    @property
    @abstractmethod
    def probs(self) -> np.ndarray:
        """Symbol probabilities used to draw transmit indices."""
        ...

    @abstractmethod
    def transmit(self, indices: np.ndarray) -> Transmission:
        """Map [F, N] symbol indices to [F, 4N] transmit frames."""
        ...

    @abstractmethod
    def detect(self, y: np.ndarray, tx: Transmission) -> np.ndarray:
        """Hard decisions [F, N] from received frames."""
        ...

    @property
    def has_posterior(self) -> bool:
        return False

    def entropy_bits(self) -> float:
        p = self.probs[self.probs > 0]
        return float(-np.sum(p * np.log2(p)))

    def draw_indices(self, rng: np.random.Generator, frames: int = 1) -> np.ndarray:
        return rng.choice(self.m, size=(frames, self.n_data), p=self.probs)

    def log_posterior(self, y: np.ndarray, tx: Transmission) -> np.ndarray:
        """Natural-log posteriors [F*N, M]."""
        raise SystemKindError(f"system '{self.name}' has no soft demapper, MI is undefined")

    def nll_bits(self, y: np.ndarray, tx: Transmission) -> np.ndarray:
        """-log2 q(s_k | y_k) for every transmitted symbol."""
        log_q = self.log_posterior(y, tx)
        picked = log_q[np.arange(log_q.shape[0]), tx.indices.reshape(-1)]
        return -picked / math.log(2.0)
