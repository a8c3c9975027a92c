import numpy as np

from app.core import no_grad
from app.ofdm import modulate
from app.shaping import ShapedConstellation, ShapingNetworks, nn1_distribution, nn2_constellation, normalize
from app.systems.base import LinkSystem, Transmission, received_subcarriers, subcarrier_pairs


class ShapedSystem(LinkSystem):
    """
    The learned transmitter and NN3 receiver at one SNR.

    Distribution and constellation are evaluated once; NN3 runs on a detached
    copy of its weights so frames can be demapped from worker threads.
    """

    name = "shaped"

    def __init__(self, nets: ShapingNetworks, snr_db: float, n_data: int):
        super().__init__(nets.m, n_data)
        self.snr_db = snr_db
        with no_grad():
            dist = nn1_distribution(snr_db, nets)
            self.constellation: ShapedConstellation = normalize(nn2_constellation(nets), dist.probs)
        self._probs = self.constellation.probs.data.copy()
        self._probs /= self._probs.sum()
        self._points = self.constellation.complex_points()
        self._demapper = nets.nn3.detached()

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    @property
    def has_posterior(self) -> bool:
        return True

    def transmit(self, indices: np.ndarray) -> Transmission:
        frame = modulate(self._points[indices])
        return Transmission(indices=indices, signal=frame.time_clipped.data)

    def log_posterior(self, y: np.ndarray, tx: Transmission) -> np.ndarray:
        logits = self._demapper(subcarrier_pairs(received_subcarriers(y)))
        return logits.log_softmax(axis=-1).data

    def detect(self, y: np.ndarray, tx: Transmission) -> np.ndarray:
        logits = self._demapper(subcarrier_pairs(received_subcarriers(y))).data
        return np.argmax(logits, axis=-1).reshape(tx.indices.shape)
