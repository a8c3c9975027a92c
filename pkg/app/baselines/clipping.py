import numpy as np


def clip_threshold(x: np.ndarray, cr_db: float) -> np.ndarray:
    """A = sqrt(mean power) * 10^(CR/20), one value per frame (last axis)."""
    rms = np.sqrt(np.mean(np.asarray(x, dtype=np.float64) ** 2, axis=-1, keepdims=True))
    return rms * 10.0 ** (cr_db / 20.0)


def amp_clip(x: np.ndarray, cr_db: float) -> np.ndarray:
    """Amplitude clipping of a nonnegative ACO signal at the clipping ratio `cr_db`."""
    x = np.asarray(x, dtype=np.float64)
    return np.minimum(x, clip_threshold(x, cr_db))
