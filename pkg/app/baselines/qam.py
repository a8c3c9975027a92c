import math
from dataclasses import dataclass

import numpy as np

from app.errors import ConfigError


@dataclass(frozen=True)
class UniformQam:
    m: int
    points: np.ndarray  # complex, unit average energy
    probs: np.ndarray   # uniform

    def entropy_bits(self) -> float:
        return math.log2(self.m)


QAM_ORDERS = (4, 16, 64)


def qam_constellation(m: int) -> UniformQam:
    """Square M-QAM on odd integer coordinates, scaled to unit average energy."""
    if m not in QAM_ORDERS:
        raise ConfigError("m", f"uniform QAM supports M in {QAM_ORDERS}, got {m}")
    side = math.isqrt(m)
    levels = 2.0 * np.arange(side) - (side - 1)
    grid = np.array([complex(levels[i // side], levels[i % side]) for i in range(m)])
    points = grid / np.sqrt(np.mean(np.abs(grid) ** 2))
    return UniformQam(m=m, points=points, probs=np.full(m, 1.0 / m))


def ml_detect(y_sub: np.ndarray, points: np.ndarray, prescale: float = 2.0) -> np.ndarray:
    """
    Minimum-distance detection of `prescale * y_sub`; the default 2 undoes the
    ACO halving of the data subcarriers. Ties go to the lowest index.
    """
    y = prescale * np.asarray(y_sub, dtype=np.complex128)
    distances = np.abs(y[..., None] - points) ** 2
    return np.argmin(distances, axis=-1)
