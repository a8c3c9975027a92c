import numpy as np

from app.baselines import UniformQam, ml_detect, slm_derotate, slm_phase_sequences, slm_select
from app.models.config import SlmConfig
from app.systems.base import LinkSystem, Transmission, received_subcarriers


class SlmSystem(LinkSystem):
    """
    Uniform QAM with selected mapping. The candidate table is drawn once from
    the SLM seed; the chosen index reaches the receiver as side information.
    """

    name = "slm"

    def __init__(self, qam: UniformQam, n_data: int, cfg: SlmConfig):
        super().__init__(qam.m, n_data)
        self.qam = qam
        self.cfg = cfg
        self.phases = slm_phase_sequences(n_data, cfg)

    @property
    def probs(self) -> np.ndarray:
        return self.qam.probs

    def entropy_bits(self) -> float:
        return self.qam.entropy_bits()

    def transmit(self, indices: np.ndarray) -> Transmission:
        selection = slm_select(self.qam.points[indices], self.cfg, phases=self.phases)
        return Transmission(indices=indices, signal=selection.frame.time_clipped.data, side_info=selection.index)

    def detect(self, y: np.ndarray, tx: Transmission) -> np.ndarray:
        y_sub = slm_derotate(received_subcarriers(y), tx.side_info, self.phases)
        return ml_detect(y_sub, self.qam.points)
