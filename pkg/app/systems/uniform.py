from typing import Optional

import numpy as np

from app.baselines import UniformQam, ml_detect
from app.core import Mlp
from app.ofdm import modulate
from app.systems.base import LinkSystem, Transmission, received_subcarriers, subcarrier_pairs


class UniformQamSystem(LinkSystem):
    """
    Conventional ACO-OFDM: square QAM, uniform signaling, minimum-distance
    detection after undoing the clipping halving. An optional NN3 demapper
    trained for this transmitter provides the soft posteriors for MI.
    """

    name = "uniform"

    def __init__(self, qam: UniformQam, n_data: int, demapper: Optional[Mlp] = None):
        super().__init__(qam.m, n_data)
        self.qam = qam
        self._demapper = demapper.detached() if demapper is not None else None

    @property
    def probs(self) -> np.ndarray:
        return self.qam.probs

    @property
    def has_posterior(self) -> bool:
        return self._demapper is not None

    def entropy_bits(self) -> float:
        return self.qam.entropy_bits()

    def transmit(self, indices: np.ndarray) -> Transmission:
        frame = modulate(self.qam.points[indices])
        return Transmission(indices=indices, signal=frame.time_clipped.data)

    def detect(self, y: np.ndarray, tx: Transmission) -> np.ndarray:
        return ml_detect(received_subcarriers(y), self.qam.points)

    def log_posterior(self, y: np.ndarray, tx: Transmission) -> np.ndarray:
        if self._demapper is None:
            return super().log_posterior(y, tx)
        logits = self._demapper(subcarrier_pairs(received_subcarriers(y)))
        return logits.log_softmax(axis=-1).data
