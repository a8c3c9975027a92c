"""
Selected mapping: rotate the data subcarriers by one of U quaternary phase
sequences and transmit the candidate with the lowest PAPR. Rotation happens
before the Hermitian mapping, so mirrored subcarriers inherit the conjugate
rotation and the time signal stays real.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.models.config import SlmConfig
from app.ofdm import OfdmFrame, modulate, papr_linear

SLM_PHASES = np.array([1.0, -1.0, 1.0j, -1.0j])


@dataclass(frozen=True)
class SlmSelection:
    frame: OfdmFrame
    index: np.ndarray   # chosen candidate per frame
    phases: np.ndarray  # [U, N] candidate table, row 0 all ones


def slm_phase_sequences(n_data: int, cfg: SlmConfig, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    table = SLM_PHASES[rng.integers(0, SLM_PHASES.size, size=(cfg.u, n_data))]
    table[0] = 1.0
    return table


def slm_select(
    data: np.ndarray,
    cfg: SlmConfig,
    rng: Optional[np.random.Generator] = None,
    phases: Optional[np.ndarray] = None,
) -> SlmSelection:
    """
    Pick the minimum-PAPR candidate for each frame of `data` ([..., N]).
    Ties go to the lowest candidate index, so identity wins when nothing helps.
    """
    data = np.asarray(data, dtype=np.complex128)
    if phases is None:
        phases = slm_phase_sequences(data.shape[-1], cfg, rng)

    candidates = data[..., None, :] * phases
    paprs = papr_linear(modulate(candidates).time_clipped.data)
    index = np.argmin(paprs, axis=-1)

    chosen = np.take_along_axis(candidates, index[..., None, None], axis=-2)[..., 0, :]
    return SlmSelection(frame=modulate(chosen), index=index, phases=phases)


def slm_derotate(y_sub: np.ndarray, index: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """Undo the chosen rotation at the receiver (candidate index is side information)."""
    return np.asarray(y_sub) / phases[index]
