import numpy as np

from app.baselines import UniformQam, amp_clip, ml_detect
from app.ofdm import modulate
from app.systems.base import LinkSystem, Transmission, received_subcarriers


class ClippingSystem(LinkSystem):
    """Uniform QAM with amplitude clipping at `cr_db`; the receiver does not compensate the distortion."""

    name = "clip"

    def __init__(self, qam: UniformQam, n_data: int, cr_db: float):
        super().__init__(qam.m, n_data)
        self.qam = qam
        self.cr_db = cr_db

    @property
    def probs(self) -> np.ndarray:
        return self.qam.probs

    def entropy_bits(self) -> float:
        return self.qam.entropy_bits()

    def transmit(self, indices: np.ndarray) -> Transmission:
        frame = modulate(self.qam.points[indices])
        return Transmission(indices=indices, signal=amp_clip(frame.time_clipped.data, self.cr_db))

    def detect(self, y: np.ndarray, tx: Transmission) -> np.ndarray:
        return ml_detect(received_subcarriers(y), self.qam.points)
